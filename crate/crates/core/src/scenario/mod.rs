//! Problem instance: venue box, buildings, users with demands and the radio
//! configuration. Everything is validated on construction so downstream
//! stages can assume the invariants.

mod output;
mod schema;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::polygon::point_strictly_inside;
use crate::geometry::{triangulate_all, GeometryError, PolygonPrism, PrismMesh};
use crate::point::Point3;
use crate::radio::{required_mcs, LinkBudget, McsEntry, RadioError};

pub use output::{render_result_json, write_result, ResultDocument, CSV_HEADER};
pub use schema::{
    BuildingSpec, McsSpec, RadioSpec, ScenarioFile, UserSpec, VenueSpec, DEFAULT_CEILING_M,
    DEFAULT_GRID_STEP_M, DEFAULT_MARGIN_M,
};

pub type UeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VenueBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl VenueBounds {
    pub fn contains(&self, p: Point3) -> bool {
        (self.x_min..=self.x_max).contains(&p.x)
            && (self.y_min..=self.y_max).contains(&p.y)
            && (self.z_min..=self.z_max).contains(&p.z)
    }

    pub fn contains_xy(&self, p: Point3) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub id: u32,
    pub prism: PolygonPrism,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserEquipment {
    pub id: UeId,
    pub position: Point3,
    pub demand_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub venue: VenueBounds,
    pub ceiling_m: f64,
    pub buildings: Vec<Building>,
    pub users: Vec<UserEquipment>,
    pub link_budget: LinkBudget,
    pub mcs_table: Vec<McsEntry>,
    pub grid_step_m: f64,
    /// Time slot the snapshot belongs to; carried through to results.
    pub slot: u64,
}

/// The first invariant a scenario breaks.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoUsers,
    DuplicateUserId(UeId),
    DuplicateBuildingId(u32),
    NonFiniteUserPosition(UeId),
    UserNotOnGround(UeId),
    NonPositiveDemand { ue: UeId, demand_bps: f64 },
    UserOutsideVenue(UeId),
    UserInsideBuilding { ue: UeId, building: u32 },
    InvalidBuilding { building: u32, reason: GeometryError },
    NonFiniteVenue,
    EmptyVenue(&'static str),
    VenueBelowRoofs { z_min: f64, tallest: f64 },
    VenueAboveCeiling { z_max: f64, ceiling: f64 },
    NonPositiveGridStep(f64),
    InvalidRadio(&'static str),
    EmptyMcsTable,
    InvalidMcsEntry(u32),
    McsNotIncreasing(u32),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoUsers => write!(f, "scenario has no users"),
            DuplicateUserId(id) => write!(f, "user id {id} appears more than once"),
            DuplicateBuildingId(id) => write!(f, "building id {id} appears more than once"),
            NonFiniteUserPosition(id) => write!(f, "user {id} has a non-finite position"),
            UserNotOnGround(id) => write!(f, "user {id} must be at z = 0"),
            NonPositiveDemand { ue, demand_bps } => {
                write!(f, "user {ue} demand must be > 0, got {demand_bps} bit/s")
            }
            UserOutsideVenue(id) => write!(f, "user {id} lies outside the venue bounds"),
            UserInsideBuilding { ue, building } => {
                write!(f, "user {ue} lies strictly inside building {building}")
            }
            InvalidBuilding { building, reason } => write!(f, "building {building}: {reason}"),
            NonFiniteVenue => write!(f, "venue bounds must be finite"),
            EmptyVenue(axis) => write!(f, "venue {axis} range is empty (min > max)"),
            VenueBelowRoofs { z_min, tallest } => {
                write!(f, "venue z_min {z_min} is below the tallest building ({tallest} m)")
            }
            VenueAboveCeiling { z_max, ceiling } => {
                write!(f, "venue z_max {z_max} exceeds the altitude ceiling {ceiling} m")
            }
            NonPositiveGridStep(s) => write!(f, "grid step must be positive, got {s}"),
            InvalidRadio(what) => write!(f, "radio: {what}"),
            EmptyMcsTable => write!(f, "MCS table is empty"),
            InvalidMcsEntry(i) => write!(f, "MCS entry {i} needs positive rate and threshold"),
            McsNotIncreasing(i) => {
                write!(f, "MCS entry {i}: rates and thresholds must strictly increase")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Validation(Violation),
    #[error("user {ue}: {source}")]
    DemandExceedsTable { ue: UeId, source: RadioError },
}

impl From<Violation> for ScenarioError {
    fn from(v: Violation) -> Self {
        ScenarioError::Validation(v)
    }
}

impl Scenario {
    pub fn tallest_building(&self) -> f64 {
        self.buildings.iter().map(|b| b.prism.height).fold(0.0, f64::max)
    }

    pub fn prisms(&self) -> Vec<PolygonPrism> {
        self.buildings.iter().map(|b| b.prism.clone()).collect()
    }

    /// Triangle meshes in building order.
    pub fn meshes(&self) -> Result<Vec<PrismMesh>, GeometryError> {
        triangulate_all(&self.prisms())
    }

    pub fn total_demand_bps(&self) -> f64 {
        self.users.iter().map(|u| u.demand_bps).sum()
    }

    pub fn user(&self, id: UeId) -> Option<&UserEquipment> {
        self.users.iter().find(|u| u.id == id)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.users.is_empty() {
            return Err(Violation::NoUsers.into());
        }
        if !(self.grid_step_m.is_finite() && self.grid_step_m > 0.0) {
            return Err(Violation::NonPositiveGridStep(self.grid_step_m).into());
        }
        validate_radio(&self.link_budget)?;
        validate_mcs(&self.mcs_table)?;

        for (i, b) in self.buildings.iter().enumerate() {
            if self.buildings[..i].iter().any(|o| o.id == b.id) {
                return Err(Violation::DuplicateBuildingId(b.id).into());
            }
            b.prism
                .validate()
                .map_err(|reason| Violation::InvalidBuilding { building: b.id, reason })?;
        }

        let v = &self.venue;
        let coords = [v.x_min, v.x_max, v.y_min, v.y_max, v.z_min, v.z_max, self.ceiling_m];
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Violation::NonFiniteVenue.into());
        }
        for (axis, lo, hi) in [("x", v.x_min, v.x_max), ("y", v.y_min, v.y_max), ("z", v.z_min, v.z_max)] {
            if lo > hi {
                return Err(Violation::EmptyVenue(axis).into());
            }
        }
        let tallest = self.tallest_building();
        if v.z_min < tallest {
            return Err(Violation::VenueBelowRoofs { z_min: v.z_min, tallest }.into());
        }
        if v.z_max > self.ceiling_m {
            return Err(Violation::VenueAboveCeiling { z_max: v.z_max, ceiling: self.ceiling_m }.into());
        }

        for (i, u) in self.users.iter().enumerate() {
            if self.users[..i].iter().any(|o| o.id == u.id) {
                return Err(Violation::DuplicateUserId(u.id).into());
            }
            if !u.position.is_finite() {
                return Err(Violation::NonFiniteUserPosition(u.id).into());
            }
            if u.position.z != 0.0 {
                return Err(Violation::UserNotOnGround(u.id).into());
            }
            if !(u.demand_bps.is_finite() && u.demand_bps > 0.0) {
                return Err(Violation::NonPositiveDemand { ue: u.id, demand_bps: u.demand_bps }.into());
            }
            if !v.contains_xy(u.position) {
                return Err(Violation::UserOutsideVenue(u.id).into());
            }
            if let Some(b) = self
                .buildings
                .iter()
                .find(|b| point_strictly_inside(u.position.xy(), &b.prism.bottom_corners))
            {
                return Err(Violation::UserInsideBuilding { ue: u.id, building: b.id }.into());
            }
        }
        for u in &self.users {
            required_mcs(u.demand_bps, &self.mcs_table)
                .map_err(|source| ScenarioError::DemandExceedsTable { ue: u.id, source })?;
        }
        Ok(())
    }
}

fn validate_radio(lb: &LinkBudget) -> Result<(), Violation> {
    let positive = [
        (lb.frequency_hz, "frequency must be positive"),
        (lb.bandwidth_hz, "bandwidth must be positive"),
        (lb.tx_power_w, "transmit power must be positive"),
        (lb.tx_gain, "transmit gain must be positive"),
        (lb.rx_gain, "receive gain must be positive"),
        (lb.noise_floor_w, "noise floor must be positive"),
    ];
    for (x, what) in positive {
        if !(x.is_finite() && x > 0.0) {
            return Err(Violation::InvalidRadio(what));
        }
    }
    if !(lb.nlos_extra_loss_db.is_finite() && lb.nlos_extra_loss_db >= 0.0) {
        return Err(Violation::InvalidRadio("NLoS loss must be >= 0 dB"));
    }
    if let Some(c) = lb.channel_capacity_cap_bps {
        if !(c.is_finite() && c > 0.0) {
            return Err(Violation::InvalidRadio("capacity cap must be positive"));
        }
    }
    Ok(())
}

fn validate_mcs(table: &[McsEntry]) -> Result<(), Violation> {
    if table.is_empty() {
        return Err(Violation::EmptyMcsTable);
    }
    for (i, e) in table.iter().enumerate() {
        let ok = e.rate_bps.is_finite()
            && e.rate_bps > 0.0
            && e.min_snr_linear.is_finite()
            && e.min_snr_linear > 0.0;
        if !ok {
            return Err(Violation::InvalidMcsEntry(e.index));
        }
        if i > 0 {
            let prev = &table[i - 1];
            if e.rate_bps <= prev.rate_bps || e.min_snr_linear <= prev.min_snr_linear {
                return Err(Violation::McsNotIncreasing(e.index));
            }
        }
    }
    Ok(())
}

/// Parses and validates a scenario from JSON text.
pub fn parse_scenario(json: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(json)?;
    file.into_scenario()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    parse_scenario(&text)
}

/// Pretty JSON in the input schema with every default made explicit.
pub fn scenario_to_json(scenario: &Scenario) -> String {
    let mut s = serde_json::to_string_pretty(&ScenarioFile::from_scenario(scenario))
        .expect("scenario file serializes");
    s.push('\n');
    s
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    std::fs::write(path, scenario_to_json(scenario))
        .map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })
}
