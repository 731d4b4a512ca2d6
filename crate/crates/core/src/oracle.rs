//! Brute-force references for cross-checking the optimizer and the LoS
//! kernel. `grid_search` shares the radio and geometry code with the
//! optimizer's fitness; `sampled_los` does not touch the triangle meshes at
//! all, it walks the segment and asks "inside footprint and under the roof?".

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{point_in_polygon, PolygonPrism, PrismMesh};
use crate::point::Point3;
use crate::pso::{rank_positions, same_optimum, PlacementResult};
use crate::radio::{evaluate_links, LinkEvaluation, RadioError};
use crate::region::FeasibleRegion;
use crate::scenario::Scenario;

pub const DEFAULT_CANDIDATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{count} candidates exceed the exhaustive-search cap of {cap}")]
    CandidateCapExceeded { count: usize, cap: usize },
    #[error("candidate set is empty")]
    EmptyCandidateSet,
    #[error(transparent)]
    Radio(#[from] RadioError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_fitness_bps: f64,
    /// Every candidate within the optimum tolerance, sorted by coordinates.
    pub argmax_positions: Vec<Point3>,
    pub evaluations: usize,
}

/// Evaluates every candidate and returns the best fitness plus all positions
/// attaining it (full per-candidate evaluations alongside).
pub fn grid_search_detailed(
    region: &FeasibleRegion,
    scenario: &Scenario,
    meshes: &[PrismMesh],
    cap: usize,
) -> Result<(OracleResult, Vec<(Point3, LinkEvaluation)>), OracleError> {
    let count = region.candidates.len();
    if count == 0 {
        return Err(OracleError::EmptyCandidateSet);
    }
    if count > cap {
        return Err(OracleError::CandidateCapExceeded { count, cap });
    }
    let evaluated: Vec<(Point3, LinkEvaluation)> = region
        .candidates
        .par_iter()
        .map(|&p| evaluate_links(p, scenario, meshes).map(|ev| (p, ev)))
        .collect::<Result<_, _>>()?;
    let best = evaluated.iter().map(|(_, e)| e.served_bps).fold(f64::NEG_INFINITY, f64::max);
    let mut winners: Vec<(Point3, LinkEvaluation)> = evaluated
        .into_iter()
        .filter(|(_, e)| same_optimum(e.served_bps, best))
        .collect();
    winners.sort_by(|a, b| a.0.lex_cmp(&b.0));
    let result = OracleResult {
        best_fitness_bps: best,
        argmax_positions: winners.iter().map(|w| w.0).collect(),
        evaluations: count,
    };
    Ok((result, winners))
}

pub fn grid_search(
    region: &FeasibleRegion,
    scenario: &Scenario,
    meshes: &[PrismMesh],
    cap: usize,
) -> Result<OracleResult, OracleError> {
    grid_search_detailed(region, scenario, meshes, cap).map(|(r, _)| r)
}

/// Exhaustive search packaged in the optimizer's result shape.
pub fn grid_search_placement(
    region: &FeasibleRegion,
    scenario: &Scenario,
    meshes: &[PrismMesh],
    cap: usize,
) -> Result<PlacementResult, OracleError> {
    let (result, winners) = grid_search_detailed(region, scenario, meshes, cap)?;
    let ranked = rank_positions(winners, &region.associated_ues);
    Ok(PlacementResult {
        g_best: ranked.first().map(|r| r.position),
        g_best_fitness_bps: ranked.first().map_or(result.best_fitness_bps, |r| r.fitness_bps),
        optimal_positions: ranked,
        iterations_run: 0,
        fitness_history: Vec::new(),
        evaluations: result.evaluations,
        early_stopped: false,
        slot: scenario.slot,
        region: None,
    })
}

/// LoS by dense sampling: blocked iff some interior sample
/// `uav + (k / samples)(ue − uav)`, `k = 1..samples−1`, lies over a footprint
/// at or below its roof.
pub fn sampled_los(uav: Point3, ue: Point3, prisms: &[PolygonPrism], samples: usize) -> bool {
    let samples = samples.max(2);
    !(1..samples).any(|k| {
        let p = uav.lerp(ue, k as f64 / samples as f64);
        prisms
            .iter()
            .any(|b| p.z <= b.height && point_in_polygon(p.xy(), &b.bottom_corners))
    })
}
