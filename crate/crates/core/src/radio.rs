//! Link-budget arithmetic: free-space SNR with a scalar NLoS penalty,
//! Shannon capacity, demand-capped throughput and the coverage radius that
//! inverts the SNR relation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{has_los, PrismMesh};
use crate::point::Point3;
use crate::scenario::{Scenario, UeId};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Rates of the 802.11ac ladder (80 MHz, 2 spatial streams, 800 ns GI), bit/s.
pub const DEFAULT_MCS_RATES_BPS: [f64; 9] = [
    58.5e6, 117e6, 175.5e6, 234e6, 351e6, 468e6, 526.5e6, 585e6, 702e6,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadioError {
    #[error("SNR is undefined at zero distance")]
    ZeroDistance,
    #[error("demand of {demand_bps} bit/s exceeds the highest MCS rate {max_rate_bps} bit/s")]
    DemandExceedsTable { demand_bps: f64, max_rate_bps: f64 },
}

/// Everything the SNR expression needs, in linear SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_w: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    /// Total noise power over the channel, watts.
    pub noise_floor_w: f64,
    pub nlos_extra_loss_db: f64,
    pub channel_capacity_cap_bps: Option<f64>,
}

impl LinkBudget {
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    /// `P_T G_T G_R λ² / ((4π)² N)`: the SNR at one meter with no extra loss.
    fn snr_at_unit_distance(&self) -> f64 {
        let lambda = self.wavelength_m();
        let four_pi = 4.0 * std::f64::consts::PI;
        self.tx_power_w * self.tx_gain * self.rx_gain * lambda * lambda
            / (four_pi * four_pi * self.noise_floor_w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McsEntry {
    pub index: u32,
    pub rate_bps: f64,
    pub min_snr_linear: f64,
}

/// Smallest SNR whose Shannon capacity over `bandwidth_hz` reaches `rate_bps`.
pub fn shannon_min_snr(rate_bps: f64, bandwidth_hz: f64) -> f64 {
    (rate_bps / bandwidth_hz).exp2() - 1.0
}

/// Default MCS ladder with Shannon-inverted thresholds at the given bandwidth.
pub fn default_mcs_table(bandwidth_hz: f64) -> Vec<McsEntry> {
    DEFAULT_MCS_RATES_BPS
        .iter()
        .enumerate()
        .map(|(i, &rate)| McsEntry {
            index: i as u32,
            rate_bps: rate,
            min_snr_linear: shannon_min_snr(rate, bandwidth_hz),
        })
        .collect()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w * 1e3)
}

pub fn distance(a: Point3, b: Point3) -> f64 {
    a.distance(b)
}

/// 1 on a clear link, `10^(L/10)` when obstructed.
pub fn loss_factor(los: bool, nlos_extra_loss_db: f64) -> f64 {
    if los {
        1.0
    } else {
        db_to_linear(nlos_extra_loss_db)
    }
}

pub fn snr(lb: &LinkBudget, distance_m: f64, los: bool) -> Result<f64, RadioError> {
    if distance_m == 0.0 {
        return Err(RadioError::ZeroDistance);
    }
    let loss = loss_factor(los, lb.nlos_extra_loss_db);
    Ok(lb.snr_at_unit_distance() / (distance_m * distance_m * loss))
}

/// Shannon–Hartley capacity, bit/s.
pub fn capacity(lb: &LinkBudget, snr_linear: f64) -> f64 {
    lb.bandwidth_hz * snr_linear.ln_1p() / std::f64::consts::LN_2
}

/// Threshold of the cheapest MCS entry whose rate covers the demand.
pub fn required_snr(demand_bps: f64, mcs_table: &[McsEntry]) -> Result<f64, RadioError> {
    required_mcs(demand_bps, mcs_table).map(|e| e.min_snr_linear)
}

pub fn required_mcs(demand_bps: f64, mcs_table: &[McsEntry]) -> Result<&McsEntry, RadioError> {
    mcs_table
        .iter()
        .find(|e| e.rate_bps >= demand_bps)
        .ok_or(RadioError::DemandExceedsTable {
            demand_bps,
            max_rate_bps: mcs_table.last().map_or(0.0, |e| e.rate_bps),
        })
}

/// Largest distance at which `snr` still reaches `snr_req`.
pub fn max_distance(lb: &LinkBudget, snr_req: f64, los_assumed: bool) -> f64 {
    let loss = loss_factor(los_assumed, lb.nlos_extra_loss_db);
    (lb.snr_at_unit_distance() / (loss * snr_req)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkMetrics {
    pub ue_id: UeId,
    pub distance_m: f64,
    pub los: bool,
    pub snr_linear: f64,
    pub capacity_bps: f64,
    pub served_bps: f64,
    pub demand_met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkEvaluation {
    pub links: Vec<LinkMetrics>,
    /// Aggregate served throughput, the optimizer's fitness.
    pub served_bps: f64,
    /// Sum of link capacities.
    pub capacity_bps: f64,
    /// `Some(true)` when a capacity cap is configured and exceeded.
    pub c_max_violated: Option<bool>,
}

impl LinkEvaluation {
    pub fn los_count(&self) -> usize {
        self.links.iter().filter(|l| l.los).count()
    }
}

/// Evaluates every user link from `uav`, in scenario user order.
pub fn evaluate_links(
    uav: Point3,
    scenario: &Scenario,
    meshes: &[PrismMesh],
) -> Result<LinkEvaluation, RadioError> {
    let lb = &scenario.link_budget;
    let mut links = Vec::with_capacity(scenario.users.len());
    for ue in &scenario.users {
        let d = distance(uav, ue.position);
        let los = has_los(uav, ue.position, meshes);
        let snr_linear = snr(lb, d, los)?;
        let capacity_bps = capacity(lb, snr_linear);
        let served_bps = ue.demand_bps.min(capacity_bps);
        links.push(LinkMetrics {
            ue_id: ue.id,
            distance_m: d,
            los,
            snr_linear,
            capacity_bps,
            served_bps,
            demand_met: capacity_bps >= ue.demand_bps,
        });
    }
    let served_bps = links.iter().map(|l| l.served_bps).sum();
    let capacity_bps: f64 = links.iter().map(|l| l.capacity_bps).sum();
    let c_max_violated = lb.channel_capacity_cap_bps.map(|cap| capacity_bps > cap);
    Ok(LinkEvaluation { links, served_bps, capacity_bps, c_max_violated })
}
