//! End-to-end placement: scenario → coverage spheres → feasible region →
//! swarm search (or exhaustive search).

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::oracle::{grid_search_placement, OracleError, DEFAULT_CANDIDATE_CAP};
use crate::pso::{optimize, PlacementResult, PsoConfig, PsoError};
use crate::radio::RadioError;
use crate::region::{build_spheres, region_report, select_region, FeasibleRegion, RegionError, SphereMode};
use crate::scenario::{Scenario, ScenarioError};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const EMPTY_REGION: i32 = 3;
    pub const DEMAND_EXCEEDS_TABLE: i32 = 4;
    pub const IO: i32 = 5;
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Pso(#[from] PsoError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error("{0}")]
    Usage(String),
}

fn radio_code(e: &RadioError) -> i32 {
    match e {
        RadioError::DemandExceedsTable { .. } => exit::DEMAND_EXCEEDS_TABLE,
        RadioError::ZeroDistance => exit::VALIDATION,
    }
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Scenario(ScenarioError::Io { .. }) => exit::IO,
            Error::Scenario(ScenarioError::DemandExceedsTable { .. }) => exit::DEMAND_EXCEEDS_TABLE,
            Error::Scenario(_) | Error::Geometry(_) | Error::Usage(_) => exit::VALIDATION,
            Error::Region(RegionError::EmptyRegion | RegionError::NoSpheres) => exit::EMPTY_REGION,
            Error::Region(RegionError::Radio(e)) | Error::Radio(e) => radio_code(e),
            Error::Pso(PsoError::EmptyCandidateSet) => exit::EMPTY_REGION,
            Error::Pso(PsoError::InvalidConfig(_)) => exit::VALIDATION,
            Error::Pso(PsoError::Radio(e)) | Error::Oracle(OracleError::Radio(e)) => radio_code(e),
            Error::Oracle(OracleError::EmptyCandidateSet) => exit::EMPTY_REGION,
            Error::Oracle(OracleError::CandidateCapExceeded { .. }) => exit::VALIDATION,
        }
    }

    /// Short machine-readable name of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Scenario(ScenarioError::Io { .. }) => "io",
            Error::Scenario(ScenarioError::Parse(_)) => "parse",
            Error::Scenario(ScenarioError::Validation(_)) | Error::Geometry(_) => "validation",
            Error::Usage(_) => "usage",
            Error::Oracle(OracleError::CandidateCapExceeded { .. }) => "candidate_cap_exceeded",
            Error::Pso(PsoError::InvalidConfig(_)) => "invalid_config",
            _ => match self.exit_code() {
                exit::EMPTY_REGION => "empty_region",
                exit::DEMAND_EXCEEDS_TABLE => "demand_exceeds_table",
                _ => "validation",
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Search {
    Swarm,
    Exhaustive { cap: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub pso: PsoConfig,
    pub sphere_mode: SphereMode,
    pub search: Search,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { pso: PsoConfig::default(), sphere_mode: SphereMode::default(), search: Search::Swarm }
    }
}

impl PipelineConfig {
    pub fn exhaustive() -> Self {
        Self { search: Search::Exhaustive { cap: DEFAULT_CANDIDATE_CAP }, ..Self::default() }
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub meshes_s: f64,
    pub region_s: f64,
    pub search_s: f64,
}

#[derive(Debug, Clone)]
pub struct Run {
    /// Carries the region summary.
    pub result: PlacementResult,
    pub region: FeasibleRegion,
    pub timings: StageTimings,
}

/// Runs every stage and attaches the region summary to the result.
pub fn run(scenario: &Scenario, cfg: &PipelineConfig) -> Result<Run, Error> {
    let mut timings = StageTimings::default();
    let t = Instant::now();
    let meshes = scenario.meshes()?;
    timings.meshes_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let spheres = build_spheres(scenario, cfg.sphere_mode)?;
    let region = select_region(&spheres, scenario)?;
    timings.region_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mut result = match cfg.search {
        Search::Swarm => optimize(&region, scenario, &meshes, &cfg.pso)?,
        Search::Exhaustive { cap } => grid_search_placement(&region, scenario, &meshes, cap)?,
    };
    timings.search_s = t.elapsed().as_secs_f64();
    result.region = Some(region_report(&region, &spheres));
    Ok(Run { result, region, timings })
}
