//! On-disk JSON form of a scenario. Radio quantities are given in dB/dBm and
//! MHz here and converted to linear SI units once, in [`ScenarioFile::into_scenario`].

use serde::{Deserialize, Serialize};

use super::{Building, Scenario, ScenarioError, UserEquipment, VenueBounds};
use crate::geometry::PolygonPrism;
use crate::point::Point3;
use crate::radio::{
    db_to_linear, dbm_to_watts, default_mcs_table, linear_to_db, shannon_min_snr, watts_to_dbm,
    LinkBudget, McsEntry,
};

pub const DEFAULT_GRID_STEP_M: f64 = 1.0;
pub const DEFAULT_MARGIN_M: f64 = 2.0;
pub const DEFAULT_CEILING_M: f64 = 100.0;

/// Venue box; any bound left out is derived. x/y default to the user bounding
/// box grown by `margin_m`, `z_min` to the tallest roof and `z_max` to the
/// ceiling.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VenueSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    pub bottom_corners: Vec<[f64; 2]>,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserSpec {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub demand_mbps: f64,
}

/// Radio settings; absent fields take the reference values
/// (5250 MHz, 20 MHz, 20 dBm, 0 dBi, −85 dBm, 25 dB).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_gain_dbi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx_gain_dbi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_floor_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nlos_loss_db: Option<f64>,
}

impl RadioSpec {
    pub const DEFAULT_FREQUENCY_MHZ: f64 = 5250.0;
    pub const DEFAULT_BANDWIDTH_MHZ: f64 = 20.0;
    pub const DEFAULT_TX_POWER_DBM: f64 = 20.0;
    pub const DEFAULT_GAIN_DBI: f64 = 0.0;
    pub const DEFAULT_NOISE_FLOOR_DBM: f64 = -85.0;
    pub const DEFAULT_NLOS_LOSS_DB: f64 = 25.0;

    pub fn to_link_budget(&self, c_max_mbps: Option<f64>) -> LinkBudget {
        LinkBudget {
            frequency_hz: self.frequency_mhz.unwrap_or(Self::DEFAULT_FREQUENCY_MHZ) * 1e6,
            bandwidth_hz: self.bandwidth_mhz.unwrap_or(Self::DEFAULT_BANDWIDTH_MHZ) * 1e6,
            tx_power_w: dbm_to_watts(self.tx_power_dbm.unwrap_or(Self::DEFAULT_TX_POWER_DBM)),
            tx_gain: db_to_linear(self.tx_gain_dbi.unwrap_or(Self::DEFAULT_GAIN_DBI)),
            rx_gain: db_to_linear(self.rx_gain_dbi.unwrap_or(Self::DEFAULT_GAIN_DBI)),
            noise_floor_w: dbm_to_watts(
                self.noise_floor_dbm.unwrap_or(Self::DEFAULT_NOISE_FLOOR_DBM),
            ),
            nlos_extra_loss_db: self.nlos_loss_db.unwrap_or(Self::DEFAULT_NLOS_LOSS_DB),
            channel_capacity_cap_bps: c_max_mbps.map(|c| c * 1e6),
        }
    }

    pub fn from_link_budget(lb: &LinkBudget) -> Self {
        Self {
            frequency_mhz: Some(lb.frequency_hz / 1e6),
            bandwidth_mhz: Some(lb.bandwidth_hz / 1e6),
            tx_power_dbm: Some(watts_to_dbm(lb.tx_power_w)),
            tx_gain_dbi: Some(linear_to_db(lb.tx_gain)),
            rx_gain_dbi: Some(linear_to_db(lb.rx_gain)),
            noise_floor_dbm: Some(watts_to_dbm(lb.noise_floor_w)),
            nlos_loss_db: Some(lb.nlos_extra_loss_db),
        }
    }
}

/// MCS entry; without `min_snr_db` the threshold is the Shannon inversion
/// `2^(rate / W) − 1` at the scenario bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McsSpec {
    pub index: u32,
    pub rate_mbps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_snr_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub venue: VenueSpec,
    #[serde(default)]
    pub buildings: Vec<BuildingSpec>,
    pub users: Vec<UserSpec>,
    #[serde(default)]
    pub radio: RadioSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcs_table: Option<Vec<McsSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_max_mbps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<u64>,
}

impl ScenarioFile {
    /// Applies defaults, converts units and validates.
    pub fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let link_budget = self.radio.to_link_budget(self.c_max_mbps);
        let mcs_table = match &self.mcs_table {
            None => default_mcs_table(link_budget.bandwidth_hz),
            Some(entries) => entries
                .iter()
                .map(|e| {
                    let rate_bps = e.rate_mbps * 1e6;
                    McsEntry {
                        index: e.index,
                        rate_bps,
                        min_snr_linear: e.min_snr_db.map_or_else(
                            || shannon_min_snr(rate_bps, link_budget.bandwidth_hz),
                            db_to_linear,
                        ),
                    }
                })
                .collect(),
        };

        let buildings: Vec<Building> = self
            .buildings
            .into_iter()
            .enumerate()
            .map(|(i, b)| Building {
                id: b.id.unwrap_or(i as u32),
                prism: PolygonPrism { bottom_corners: b.bottom_corners, height: b.height },
            })
            .collect();
        let users: Vec<UserEquipment> = self
            .users
            .iter()
            .map(|u| UserEquipment {
                id: u.id,
                position: Point3::new(u.x, u.y, 0.0),
                demand_bps: u.demand_mbps * 1e6,
            })
            .collect();

        let v = &self.venue;
        let margin = v.margin_m.unwrap_or(DEFAULT_MARGIN_M);
        let ceiling_m = v.ceiling_m.unwrap_or(DEFAULT_CEILING_M);
        let fold = |f: fn(&UserEquipment) -> f64, init: f64, pick: fn(f64, f64) -> f64| {
            users.iter().map(f).fold(init, pick)
        };
        let tallest = buildings.iter().map(|b| b.prism.height).fold(0.0, f64::max);
        let venue = VenueBounds {
            x_min: v.x_min.unwrap_or_else(|| fold(|u| u.position.x, f64::INFINITY, f64::min) - margin),
            x_max: v.x_max.unwrap_or_else(|| fold(|u| u.position.x, f64::NEG_INFINITY, f64::max) + margin),
            y_min: v.y_min.unwrap_or_else(|| fold(|u| u.position.y, f64::INFINITY, f64::min) - margin),
            y_max: v.y_max.unwrap_or_else(|| fold(|u| u.position.y, f64::NEG_INFINITY, f64::max) + margin),
            z_min: v.z_min.unwrap_or(tallest),
            z_max: v.z_max.unwrap_or(ceiling_m),
        };

        let scenario = Scenario {
            venue,
            ceiling_m,
            buildings,
            users,
            link_budget,
            mcs_table,
            grid_step_m: self.grid_step_m.unwrap_or(DEFAULT_GRID_STEP_M),
            slot: self.slot.unwrap_or(0),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Fully explicit file form of a scenario.
    pub fn from_scenario(s: &Scenario) -> Self {
        let v = &s.venue;
        Self {
            venue: VenueSpec {
                x_min: Some(v.x_min),
                x_max: Some(v.x_max),
                y_min: Some(v.y_min),
                y_max: Some(v.y_max),
                z_min: Some(v.z_min),
                z_max: Some(v.z_max),
                margin_m: None,
                ceiling_m: Some(s.ceiling_m),
            },
            buildings: s
                .buildings
                .iter()
                .map(|b| BuildingSpec {
                    id: Some(b.id),
                    bottom_corners: b.prism.bottom_corners.clone(),
                    height: b.prism.height,
                })
                .collect(),
            users: s
                .users
                .iter()
                .map(|u| UserSpec {
                    id: u.id,
                    x: u.position.x,
                    y: u.position.y,
                    demand_mbps: u.demand_bps / 1e6,
                })
                .collect(),
            radio: RadioSpec::from_link_budget(&s.link_budget),
            mcs_table: Some(
                s.mcs_table
                    .iter()
                    .map(|e| McsSpec {
                        index: e.index,
                        rate_mbps: e.rate_bps / 1e6,
                        min_snr_db: Some(linear_to_db(e.min_snr_linear)),
                    })
                    .collect(),
            ),
            grid_step_m: Some(s.grid_step_m),
            c_max_mbps: s.link_budget.channel_capacity_cap_bps.map(|c| c / 1e6),
            slot: Some(s.slot),
        }
    }
}
