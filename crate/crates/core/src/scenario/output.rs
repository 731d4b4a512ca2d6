use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::point::Point3;
use crate::pso::PlacementResult;
use crate::radio::LinkMetrics;
use crate::region::RegionSummary;

pub const CSV_HEADER: [&str; 7] =
    ["rank", "x", "y", "z", "fitness_bps", "los_count", "mean_distance_m"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub rank: usize,
    pub position: Point3,
    pub fitness_bps: f64,
    pub los_count: usize,
    pub mean_distance_m: f64,
    pub capacity_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub served_bps: f64,
    pub capacity_bps: f64,
    pub c_max_violated: Option<bool>,
}

/// On-disk result shape. `per_ue` and `aggregate` describe the top-ranked
/// position and are absent when nothing was ranked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub slot: u64,
    pub g_best: Option<Point3>,
    pub fitness_bps: f64,
    pub iterations_run: usize,
    pub fitness_history: Vec<f64>,
    pub evaluations: usize,
    pub early_stopped: bool,
    pub ranking: Vec<RankingRow>,
    pub per_ue: Vec<LinkMetrics>,
    pub aggregate: Option<Aggregate>,
    pub region: Option<RegionSummary>,
}

impl From<&PlacementResult> for ResultDocument {
    fn from(r: &PlacementResult) -> Self {
        let ranking = r
            .optimal_positions
            .iter()
            .enumerate()
            .map(|(i, p)| RankingRow {
                rank: i + 1,
                position: p.position,
                fitness_bps: p.fitness_bps,
                los_count: p.los_count,
                mean_distance_m: p.mean_distance_m,
                capacity_bps: p.evaluation.capacity_bps,
            })
            .collect();
        let top = r.optimal_positions.first().map(|p| &p.evaluation);
        Self {
            slot: r.slot,
            g_best: r.g_best,
            fitness_bps: r.g_best_fitness_bps,
            iterations_run: r.iterations_run,
            fitness_history: r.fitness_history.clone(),
            evaluations: r.evaluations,
            early_stopped: r.early_stopped,
            ranking,
            per_ue: top.map(|e| e.links.clone()).unwrap_or_default(),
            aggregate: top.map(|e| Aggregate {
                served_bps: e.served_bps,
                capacity_bps: e.capacity_bps,
                c_max_violated: e.c_max_violated,
            }),
            region: r.region.clone(),
        }
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn render_result_json(result: &PlacementResult) -> String {
    // serde_json's default map is ordered, so going through Value sorts keys.
    let value = serde_json::to_value(ResultDocument::from(result)).expect("result serializes");
    let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
    s.push('\n');
    s
}

fn render_csv(result: &PlacementResult) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for (i, p) in result.optimal_positions.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            p.position.x.to_string(),
            p.position.y.to_string(),
            p.position.z.to_string(),
            p.fitness_bps.to_string(),
            p.los_count.to_string(),
            p.mean_distance_m.to_string(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes `path` as JSON and the ranking as CSV next to it (same stem,
/// `.csv` extension).
pub fn write_result(result: &PlacementResult, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    let io = |source| ScenarioError::Io { path: path.to_path_buf(), source };
    fs::write(path, render_result_json(result)).map_err(io)?;
    let csv_path = path.with_extension("csv");
    fs::write(&csv_path, render_csv(result))
        .map_err(|source| ScenarioError::Io { path: csv_path.clone(), source })
}
