//! Feasible positioning volume.
//!
//! Every user gets a coverage sphere whose radius is the largest distance at
//! which its demand is still met. The venue box is scanned on a lattice
//! anchored at `(x_min, y_min, z_min)`; each lattice point's covering set is
//! the users whose spheres contain it. The region is the largest covering set
//! realised by some lattice point, together with all points realising it.
//!
//! Ties between equally large sets go to the larger summed demand, then to
//! the set with more lattice points, then to the lexicographically smallest
//! id list.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::point::Point3;
use crate::radio::{max_distance, required_snr, RadioError};
use crate::scenario::{Scenario, UeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("no valid grid point lies inside any coverage sphere")]
    EmptyRegion,
    #[error("no coverage spheres given")]
    NoSpheres,
    #[error(transparent)]
    Radio(#[from] RadioError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageSphere {
    pub ue_id: UeId,
    pub center: Point3,
    pub radius_m: f64,
}

impl CoverageSphere {
    pub fn contains(&self, p: Point3) -> bool {
        self.center.distance(p) <= self.radius_m
    }
}

/// Path-loss assumption used for the sphere radii.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereMode {
    /// Free-space radius; obstruction is left to the optimizer's fitness.
    #[default]
    LosAssumed,
    /// Radius shrunk by the NLoS penalty, so every link is covered even if
    /// obstructed.
    NlosConservative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion {
    /// Sorted ascending.
    pub associated_ues: Vec<UeId>,
    pub candidates: Vec<Point3>,
    pub grid_step_m: f64,
}

impl FeasibleRegion {
    /// Axis-aligned box of the candidates as `(min, max)`.
    pub fn bounding_box(&self) -> Option<(Point3, Point3)> {
        let first = *self.candidates.first()?;
        Some(self.candidates.iter().fold((first, first), |(lo, hi), p| {
            (
                Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
                Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z)),
            )
        }))
    }
}

pub fn build_spheres(scenario: &Scenario, mode: SphereMode) -> Result<Vec<CoverageSphere>, RadioError> {
    let los_assumed = mode == SphereMode::LosAssumed;
    scenario
        .users
        .iter()
        .map(|u| {
            let snr_req = required_snr(u.demand_bps, &scenario.mcs_table)?;
            Ok(CoverageSphere {
                ue_id: u.id,
                center: u.position,
                radius_m: max_distance(&scenario.link_budget, snr_req, los_assumed),
            })
        })
        .collect()
}

/// The scan lattice over the venue box.
#[derive(Debug, Clone, Copy)]
pub struct Lattice {
    pub origin: Point3,
    pub step: f64,
    pub counts: [usize; 3],
}

impl Lattice {
    pub fn for_scenario(scenario: &Scenario) -> Self {
        let v = &scenario.venue;
        let step = scenario.grid_step_m;
        let count = |lo: f64, hi: f64| ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Self {
            origin: Point3::new(v.x_min, v.y_min, v.z_min),
            step,
            counts: [count(v.x_min, v.x_max), count(v.y_min, v.y_max), count(v.z_min, v.z_max)],
        }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> Point3 {
        Point3::new(
            self.origin.x + i as f64 * self.step,
            self.origin.y + j as f64 * self.step,
            self.origin.z + k as f64 * self.step,
        )
    }

    /// Points of z-slice `k` in (y, x) order.
    pub fn slice(&self, k: usize) -> impl Iterator<Item = Point3> + '_ {
        let [nx, ny, _] = self.counts;
        (0..ny).flat_map(move |j| (0..nx).map(move |i| self.point(i, j, k)))
    }

    /// All points, z-major then y then x.
    pub fn points(&self) -> impl Iterator<Item = Point3> + '_ {
        (0..self.counts[2]).flat_map(move |k| self.slice(k))
    }
}

/// Bit set over sphere indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CoverSet(Vec<u64>);

impl CoverSet {
    fn of(p: Point3, spheres: &[CoverageSphere]) -> Self {
        let mut words = vec![0u64; spheres.len().div_ceil(64)];
        for (i, s) in spheres.iter().enumerate() {
            if s.contains(p) {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        CoverSet(words)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(w, bits)| (0..64).filter(move |b| bits & (1 << b) != 0).map(move |b| w * 64 + b))
    }
}

/// Grid points where the SNR expression is undefined (on a user) are skipped.
fn usable(p: Point3, scenario: &Scenario) -> bool {
    scenario.users.iter().all(|u| u.position != p)
}

pub fn select_region(spheres: &[CoverageSphere], scenario: &Scenario) -> Result<FeasibleRegion, RegionError> {
    if spheres.is_empty() {
        return Err(RegionError::NoSpheres);
    }
    let lattice = Lattice::for_scenario(scenario);

    let tallies: Vec<HashMap<CoverSet, usize>> = (0..lattice.counts[2])
        .into_par_iter()
        .map(|k| {
            let mut tally = HashMap::new();
            for p in lattice.slice(k).filter(|&p| usable(p, scenario)) {
                *tally.entry(CoverSet::of(p, spheres)).or_insert(0) += 1;
            }
            tally
        })
        .collect();
    let mut merged: HashMap<CoverSet, usize> = HashMap::new();
    for tally in tallies {
        for (set, n) in tally {
            *merged.entry(set).or_insert(0) += n;
        }
    }

    let demand_of = |i: usize| {
        scenario.user(spheres[i].ue_id).map_or(0.0, |u| u.demand_bps)
    };
    let ids_of = |set: &CoverSet| {
        let mut ids: Vec<UeId> = set.members().map(|i| spheres[i].ue_id).collect();
        ids.sort_unstable();
        ids
    };
    let best = merged
        .iter()
        .filter(|(set, _)| set.len() > 0)
        .map(|(set, &count)| {
            let demand: f64 = set.members().map(demand_of).sum();
            (set, count, demand, ids_of(set))
        })
        .max_by(|a, b| {
            a.0.len()
                .cmp(&b.0.len())
                .then(a.2.total_cmp(&b.2))
                .then(a.1.cmp(&b.1))
                .then(b.3.cmp(&a.3))
        });
    let Some((chosen, _, _, associated_ues)) = best else {
        return Err(RegionError::EmptyRegion);
    };

    // Maximal cardinality makes "covers at least the chosen set" the same as
    // "covers exactly the chosen set".
    let candidates: Vec<Point3> = (0..lattice.counts[2])
        .into_par_iter()
        .map(|k| {
            lattice
                .slice(k)
                .filter(|&p| usable(p, scenario) && &CoverSet::of(p, spheres) == chosen)
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();

    Ok(FeasibleRegion { associated_ues, candidates, grid_step_m: scenario.grid_step_m })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub candidate_count: usize,
    pub associated_count: usize,
    pub associated_ues: Vec<UeId>,
    pub uncovered_ues: Vec<UeId>,
    pub bbox_min: Option<Point3>,
    pub bbox_max: Option<Point3>,
    pub grid_step_m: f64,
    pub spheres: Vec<CoverageSphere>,
}

pub fn region_report(region: &FeasibleRegion, spheres: &[CoverageSphere]) -> RegionSummary {
    let mut uncovered_ues: Vec<UeId> = spheres
        .iter()
        .map(|s| s.ue_id)
        .filter(|id| !region.associated_ues.contains(id))
        .collect();
    uncovered_ues.sort_unstable();
    let bbox = region.bounding_box();
    RegionSummary {
        candidate_count: region.candidates.len(),
        associated_count: region.associated_ues.len(),
        associated_ues: region.associated_ues.clone(),
        uncovered_ues,
        bbox_min: bbox.map(|b| b.0),
        bbox_max: bbox.map(|b| b.1),
        grid_step_m: region.grid_step_m,
        spheres: spheres.to_vec(),
    }
}
