//! Scenario templates and generators.
//!
//! The fig3-like layout is hand-authored: three buildings (one L-shaped) and
//! eight users spread so that a high-altitude position sees everyone. It
//! reproduces the structure of the reference deployment, not its coordinates.
//! Random layouts feed the property suites.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::polygon::point_strictly_inside;
use crate::radio::DEFAULT_MCS_RATES_BPS;
use crate::scenario::{
    BuildingSpec, RadioSpec, Scenario, ScenarioError, ScenarioFile, UserSpec, VenueSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DemandPattern {
    /// Every user asks for the same rate.
    Uniform { mbps: f64 },
    /// First half of the users (by id) ask for `high_mbps`, the rest `low_mbps`.
    TwoTier { high_mbps: f64, low_mbps: f64 },
    /// User `k` (0-based, by id) asks for ladder rate `first_index + k`.
    Ladder { first_index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BuildingLayout {
    Fig3Like,
    /// Venue `[0, width] × [0, depth]`, flight band from the tallest roof up
    /// to `z_max` (eight lattice layers when absent). Footprints are
    /// rectangles or L-shapes.
    Random {
        width: f64,
        depth: f64,
        z_max: Option<f64>,
        buildings: usize,
        min_height: f64,
        max_height: f64,
        grid_step_m: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTemplate {
    pub name: String,
    pub ue_count: usize,
    pub demand: DemandPattern,
    pub layout: BuildingLayout,
    /// Seed used when the caller does not pick one.
    pub seed: u64,
    #[serde(default)]
    pub radio: RadioSpec,
}

pub const FIG3_USERS: [(u32, f64, f64); 8] = [
    (1, 15.0, 60.0),
    (2, 55.0, 50.0),
    (3, 45.0, 20.0),
    (4, 5.0, 8.0),
    (5, 20.0, 40.0),
    (6, 35.0, 35.0),
    (7, 92.0, 88.0),
    (8, 98.0, 82.0),
];

fn fig3_buildings() -> Vec<BuildingSpec> {
    let b = |id, corners: &[[f64; 2]], height| BuildingSpec {
        id: Some(id),
        bottom_corners: corners.to_vec(),
        height,
    };
    vec![
        b(1, &[[22.0, 18.0], [30.0, 18.0], [30.0, 26.0], [22.0, 26.0]], 12.0),
        b(
            2,
            &[[60.0, 25.0], [75.0, 25.0], [75.0, 40.0], [68.0, 40.0], [68.0, 32.0], [60.0, 32.0]],
            15.0,
        ),
        b(3, &[[64.0, 60.0], [72.0, 60.0], [72.0, 68.0], [64.0, 68.0]], 10.0),
    ]
}

/// Ladder demands need the wider channel: at 20 MHz the upper rungs' coverage
/// spheres do not reach above the roofs at all.
fn ladder_radio() -> RadioSpec {
    RadioSpec { bandwidth_mhz: Some(80.0), tx_power_dbm: Some(10.0), ..RadioSpec::default() }
}

impl ScenarioTemplate {
    pub fn usecase_a() -> Self {
        Self {
            name: "usecase_a".into(),
            ue_count: 8,
            demand: DemandPattern::Uniform { mbps: 58.5 },
            layout: BuildingLayout::Fig3Like,
            seed: 0,
            radio: RadioSpec::default(),
        }
    }

    pub fn usecase_b() -> Self {
        Self {
            name: "usecase_b".into(),
            demand: DemandPattern::TwoTier { high_mbps: 117.0, low_mbps: 58.5 },
            ..Self::usecase_a()
        }
    }

    pub fn usecase_c() -> Self {
        Self {
            name: "usecase_c".into(),
            demand: DemandPattern::Ladder { first_index: 0 },
            radio: ladder_radio(),
            ..Self::usecase_a()
        }
    }

    /// Ladder shifted one rung up (indices 1 through 8).
    pub fn usecase_c_shifted() -> Self {
        Self {
            name: "usecase_c_mcs1".into(),
            demand: DemandPattern::Ladder { first_index: 1 },
            ..Self::usecase_c()
        }
    }

    /// Small random venues for optimizer-vs-exhaustive comparisons; at most
    /// 25 × 25 × 8 lattice points.
    pub fn random_small() -> Self {
        Self {
            name: "random_small".into(),
            ue_count: 5,
            demand: DemandPattern::Ladder { first_index: 2 },
            layout: BuildingLayout::Random {
                width: 24.0,
                depth: 24.0,
                z_max: None,
                buildings: 3,
                min_height: 3.0,
                max_height: 8.0,
                grid_step_m: 1.0,
            },
            seed: 0,
            radio: ladder_radio(),
        }
    }

    /// Random venues up to 60 × 60 × 20 m.
    pub fn random_venue() -> Self {
        Self {
            name: "random_venue".into(),
            ue_count: 6,
            demand: DemandPattern::Ladder { first_index: 2 },
            layout: BuildingLayout::Random {
                width: 60.0,
                depth: 60.0,
                z_max: Some(20.0),
                buildings: 4,
                min_height: 3.0,
                max_height: 10.0,
                grid_step_m: 1.0,
            },
            seed: 0,
            radio: ladder_radio(),
        }
    }

    pub fn builtin() -> Vec<Self> {
        vec![
            Self::usecase_a(),
            Self::usecase_b(),
            Self::usecase_c(),
            Self::usecase_c_shifted(),
            Self::random_small(),
            Self::random_venue(),
        ]
    }

    pub fn by_name(name: &str) -> Option<Self> {
        Self::builtin().into_iter().find(|t| t.name == name)
    }

    fn demand_mbps(&self, k: usize) -> f64 {
        match self.demand {
            DemandPattern::Uniform { mbps } => mbps,
            DemandPattern::TwoTier { high_mbps, low_mbps } => {
                if 2 * k < self.ue_count {
                    high_mbps
                } else {
                    low_mbps
                }
            }
            // Past the top rung the demand is left unservable on purpose;
            // loading reports it.
            DemandPattern::Ladder { first_index } => {
                let top = DEFAULT_MCS_RATES_BPS[DEFAULT_MCS_RATES_BPS.len() - 1];
                DEFAULT_MCS_RATES_BPS.get(first_index + k).map_or(2.0 * top, |&r| r) / 1e6
            }
        }
    }
}

fn rectangle(x0: f64, y0: f64, w: f64, d: f64) -> Vec<[f64; 2]> {
    vec![[x0, y0], [x0 + w, y0], [x0 + w, y0 + d], [x0, y0 + d]]
}

/// L-shape: the `w × d` box with its upper-right `cw × cd` corner removed.
fn l_shape(x0: f64, y0: f64, w: f64, d: f64, cw: f64, cd: f64) -> Vec<[f64; 2]> {
    vec![
        [x0, y0],
        [x0 + w, y0],
        [x0 + w, y0 + d - cd],
        [x0 + w - cw, y0 + d - cd],
        [x0 + w - cw, y0 + d],
        [x0, y0 + d],
    ]
}

fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

/// File form of the generated scenario, with defaults left implicit.
pub fn generate_file(template: &ScenarioTemplate, seed: u64) -> ScenarioFile {
    let (venue, buildings, positions, grid_step_m) = match template.layout {
        BuildingLayout::Fig3Like => {
            let users = FIG3_USERS.iter().take(template.ue_count).map(|&(_, x, y)| (x, y)).collect();
            (VenueSpec::default(), fig3_buildings(), users, None)
        }
        BuildingLayout::Random { width, depth, z_max, buildings, min_height, max_height, grid_step_m } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let specs: Vec<BuildingSpec> = (0..buildings)
                .map(|i| {
                    let w = round1(rng.gen_range(0.15..0.35) * width);
                    let d = round1(rng.gen_range(0.15..0.35) * depth);
                    let x0 = round1(rng.gen_range(0.05 * width..0.95 * width - w));
                    let y0 = round1(rng.gen_range(0.05 * depth..0.95 * depth - d));
                    let corners = if rng.gen_bool(0.5) {
                        let cw = round1(w * rng.gen_range(0.3..0.6));
                        let cd = round1(d * rng.gen_range(0.3..0.6));
                        l_shape(x0, y0, w, d, cw, cd)
                    } else {
                        rectangle(x0, y0, w, d)
                    };
                    BuildingSpec {
                        id: Some(i as u32 + 1),
                        bottom_corners: corners,
                        height: round1(rng.gen_range(min_height..=max_height)),
                    }
                })
                .collect();
            let mut users = Vec::with_capacity(template.ue_count);
            while users.len() < template.ue_count {
                let p = (round1(rng.gen_range(0.0..=width)), round1(rng.gen_range(0.0..=depth)));
                let blocked = specs.iter().any(|b| point_strictly_inside([p.0, p.1], &b.bottom_corners));
                let taken = users.iter().any(|&(x, y): &(f64, f64)| (x - p.0).hypot(y - p.1) < 1.0);
                if !blocked && !taken {
                    users.push(p);
                }
            }
            let tallest = specs.iter().map(|b| b.height).fold(0.0, f64::max);
            let venue = VenueSpec {
                x_min: Some(0.0),
                x_max: Some(width),
                y_min: Some(0.0),
                y_max: Some(depth),
                z_max: Some(z_max.unwrap_or(tallest + 7.0 * grid_step_m)),
                ..VenueSpec::default()
            };
            (venue, specs, users, Some(grid_step_m))
        }
    };
    let users = positions
        .into_iter()
        .enumerate()
        .map(|(k, (x, y))| UserSpec { id: k as u32 + 1, x, y, demand_mbps: template.demand_mbps(k) })
        .collect();
    ScenarioFile {
        venue,
        buildings,
        users,
        radio: template.radio.clone(),
        mcs_table: None,
        grid_step_m,
        c_max_mbps: None,
        slot: None,
    }
}

/// Deterministic in `(template, seed)`.
pub fn generate(template: &ScenarioTemplate, seed: u64) -> Result<Scenario, ScenarioError> {
    generate_file(template, seed).into_scenario()
}
