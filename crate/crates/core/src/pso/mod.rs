//! Particle swarm search over the discrete candidate set.
//!
//! Particles carry continuous velocities but always sit on a candidate: after
//! each velocity update the target position is projected onto the nearest
//! candidate. Fitness is the aggregate demand-capped throughput with per-link
//! obstruction. Every visited position whose fitness matches the final best
//! is reported, ranked by line-of-sight links and mean user distance.
//!
//! Randomness: particle `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on
//! stream `k + 1`; stream 0 draws the initial positions (distinct candidates
//! when there are at least as many as particles). Evaluations within an
//! iteration run in parallel but are applied in particle order, so results do
//! not depend on the worker count.

mod projection;

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use projection::CandidateIndex;

use crate::geometry::PrismMesh;
use crate::point::{Point3, Vec3};
use crate::radio::{evaluate_links, LinkEvaluation, RadioError};
use crate::region::{FeasibleRegion, RegionSummary};
use crate::scenario::{Scenario, UeId};

/// Relative tolerance under which two fitness values count as the same optimum.
pub const OPTIMUM_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsoError {
    #[error("candidate set is empty")]
    EmptyCandidateSet,
    #[error("invalid PSO configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Radio(#[from] RadioError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub particles: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub early_stop_after: usize,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            particles: 30,
            max_iterations: 100,
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
            early_stop_after: 10,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<(), PsoError> {
        if self.particles == 0 {
            return Err(PsoError::InvalidConfig("particles must be >= 1"));
        }
        if self.max_iterations == 0 {
            return Err(PsoError::InvalidConfig("max_iterations must be >= 1"));
        }
        if !(self.inertia > 0.0 && self.inertia < 1.0) {
            return Err(PsoError::InvalidConfig("inertia must lie in (0, 1)"));
        }
        if !(self.cognitive > 0.0 && self.social > 0.0) {
            return Err(PsoError::InvalidConfig("c1 and c2 must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub candidate: usize,
    pub position: Point3,
    pub velocity: Vec3,
    pub p_best: Point3,
    pub p_best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPosition {
    pub position: Point3,
    pub fitness_bps: f64,
    pub los_count: usize,
    /// Mean distance to the associated users.
    pub mean_distance_m: f64,
    pub evaluation: LinkEvaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementResult {
    pub optimal_positions: Vec<RankedPosition>,
    pub g_best: Option<Point3>,
    pub g_best_fitness_bps: f64,
    pub iterations_run: usize,
    pub fitness_history: Vec<f64>,
    pub evaluations: usize,
    pub early_stopped: bool,
    pub slot: u64,
    pub region: Option<RegionSummary>,
}

impl PlacementResult {
    /// A result with nothing ranked; what a writer sees for an empty search.
    pub fn empty(slot: u64) -> Self {
        Self {
            optimal_positions: Vec::new(),
            g_best: None,
            g_best_fitness_bps: 0.0,
            iterations_run: 0,
            fitness_history: Vec::new(),
            evaluations: 0,
            early_stopped: false,
            slot,
            region: None,
        }
    }
}

/// Perfect means every demand is met in full and every associated user is
/// reached in line of sight.
pub fn is_perfect(evaluation: &LinkEvaluation, scenario: &Scenario, associated: &[UeId]) -> bool {
    let all_met = evaluation.links.iter().all(|l| l.demand_met)
        && evaluation.served_bps >= scenario.total_demand_bps() * (1.0 - 1e-12);
    all_met
        && associated
            .iter()
            .all(|id| evaluation.links.iter().any(|l| l.ue_id == *id && l.los))
}

pub fn same_optimum(a: f64, best: f64) -> bool {
    (a - best).abs() <= OPTIMUM_REL_TOL * best.abs().max(f64::MIN_POSITIVE)
}

fn mean_distance(ev: &LinkEvaluation, associated: &[UeId]) -> f64 {
    let ds: Vec<f64> = ev
        .links
        .iter()
        .filter(|l| associated.contains(&l.ue_id))
        .map(|l| l.distance_m)
        .collect();
    if ds.is_empty() {
        0.0
    } else {
        ds.iter().sum::<f64>() / ds.len() as f64
    }
}

/// Orders positions by fitness (desc), LoS links (desc), mean distance to
/// associated users (asc), then coordinates.
pub fn rank_positions(
    entries: impl IntoIterator<Item = (Point3, LinkEvaluation)>,
    associated: &[UeId],
) -> Vec<RankedPosition> {
    let mut ranked: Vec<RankedPosition> = entries
        .into_iter()
        .map(|(position, evaluation)| RankedPosition {
            position,
            fitness_bps: evaluation.served_bps,
            los_count: evaluation.los_count(),
            mean_distance_m: mean_distance(&evaluation, associated),
            evaluation,
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.fitness_bps
            .total_cmp(&a.fitness_bps)
            .then(b.los_count.cmp(&a.los_count))
            .then(a.mean_distance_m.total_cmp(&b.mean_distance_m))
            .then_with(|| a.position.lex_cmp(&b.position))
    });
    ranked
}

/// Fitness cache keyed by candidate index.
struct Evaluations<'a> {
    region: &'a FeasibleRegion,
    scenario: &'a Scenario,
    meshes: &'a [PrismMesh],
    cache: BTreeMap<usize, LinkEvaluation>,
}

impl<'a> Evaluations<'a> {
    fn ensure(&mut self, wanted: impl IntoIterator<Item = usize>) -> Result<(), RadioError> {
        let mut missing: Vec<usize> =
            wanted.into_iter().filter(|i| !self.cache.contains_key(i)).collect();
        missing.sort_unstable();
        missing.dedup();
        let (region, scenario, meshes) = (self.region, self.scenario, self.meshes);
        let fresh: Vec<(usize, Result<LinkEvaluation, RadioError>)> = missing
            .par_iter()
            .map(|&i| (i, evaluate_links(region.candidates[i], scenario, meshes)))
            .collect();
        for (i, ev) in fresh {
            self.cache.insert(i, ev?);
        }
        Ok(())
    }

    fn fitness(&self, i: usize) -> f64 {
        self.cache[&i].served_bps
    }
}

fn clamp_velocity(v: Vec3, limit: Vec3) -> Vec3 {
    Vec3::new(
        v.x.clamp(-limit.x, limit.x),
        v.y.clamp(-limit.y, limit.y),
        v.z.clamp(-limit.z, limit.z),
    )
}

pub fn optimize(
    region: &FeasibleRegion,
    scenario: &Scenario,
    meshes: &[PrismMesh],
    cfg: &PsoConfig,
) -> Result<PlacementResult, PsoError> {
    cfg.validate()?;
    let n = region.candidates.len();
    if n == 0 {
        return Err(PsoError::EmptyCandidateSet);
    }
    let index = CandidateIndex::new(&region.candidates, region.grid_step_m.max(f64::MIN_POSITIVE));
    let (lo, hi) = region.bounding_box().expect("non-empty region");
    // Each axis is capped at half the box diagonal.
    let half_diag = 0.5 * (hi - lo).norm();
    let v_limit = Vec3::new(half_diag, half_diag, half_diag);

    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    init_rng.set_stream(0);
    let mut rngs: Vec<ChaCha8Rng> = (0..cfg.particles)
        .map(|k| {
            let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
            r.set_stream(k as u64 + 1);
            r
        })
        .collect();
    // Distinct starting candidates while there are enough of them.
    let starts: Vec<usize> = if cfg.particles <= n {
        rand::seq::index::sample(&mut init_rng, n, cfg.particles).into_vec()
    } else {
        (0..cfg.particles).map(|_| init_rng.gen_range(0..n)).collect()
    };
    let mut swarm: Vec<Particle> = starts
        .into_iter()
        .map(|c| {
            let p = region.candidates[c];
            Particle {
                candidate: c,
                position: p,
                velocity: Vec3::ZERO,
                p_best: p,
                p_best_fitness: f64::NEG_INFINITY,
            }
        })
        .collect();

    let mut evals = Evaluations { region, scenario, meshes, cache: BTreeMap::new() };
    let mut g_best: Option<(usize, f64)> = None;
    let mut history = Vec::with_capacity(cfg.max_iterations);
    let mut iterations_run = 0;
    let mut early_stopped = false;

    while iterations_run < cfg.max_iterations {
        evals.ensure(swarm.iter().map(|p| p.candidate))?;
        for particle in &mut swarm {
            let f = evals.fitness(particle.candidate);
            if f > particle.p_best_fitness {
                particle.p_best_fitness = f;
                particle.p_best = particle.position;
            }
            if g_best.is_none_or(|(_, best)| f > best) {
                g_best = Some((particle.candidate, f));
            }
        }
        let (g_idx, g_fit) = g_best.expect("at least one particle evaluated");
        history.push(g_fit);
        iterations_run += 1;

        let perfect = is_perfect(&evals.cache[&g_idx], scenario, &region.associated_ues);
        if iterations_run >= cfg.early_stop_after && perfect {
            early_stopped = true;
            break;
        }
        // Every candidate already scored: further moves cannot change the answer.
        if evals.cache.len() == n {
            break;
        }
        if iterations_run == cfg.max_iterations {
            break;
        }

        let g_pos = region.candidates[g_idx];
        for (particle, rng) in swarm.iter_mut().zip(rngs.iter_mut()) {
            let r1: f64 = rng.gen();
            let r2: f64 = rng.gen();
            let v = particle.velocity * cfg.inertia
                + (particle.p_best - particle.position) * (cfg.cognitive * r1)
                + (g_pos - particle.position) * (cfg.social * r2);
            particle.velocity = clamp_velocity(v, v_limit);
            let target = particle.position + particle.velocity;
            let c = index.nearest(target).expect("index is non-empty");
            particle.candidate = c;
            particle.position = region.candidates[c];
        }
    }

    let (g_idx, g_fit) = g_best.expect("loop ran at least once");
    let co_optimal = evals
        .cache
        .iter()
        .filter(|(_, ev)| same_optimum(ev.served_bps, g_fit))
        .map(|(&i, ev)| (region.candidates[i], ev.clone()));
    let optimal_positions = rank_positions(co_optimal, &region.associated_ues);

    Ok(PlacementResult {
        optimal_positions,
        g_best: Some(region.candidates[g_idx]),
        g_best_fitness_bps: g_fit,
        iterations_run,
        fitness_history: history,
        evaluations: evals.cache.len(),
        early_stopped,
        slot: scenario.slot,
        region: None,
    })
}
