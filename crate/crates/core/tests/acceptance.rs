//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the verdict lines always reach the
//! output. `cargo test --test acceptance -- 3` runs criterion 3 only.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::*;
use uav_placement::bench::{generate, generate_file, ScenarioTemplate};
use uav_placement::geometry::{has_los, triangulate, PolygonPrism, PrismMesh};
use uav_placement::oracle::{grid_search, sampled_los, DEFAULT_CANDIDATE_CAP};
use uav_placement::pso::{optimize, same_optimum, PsoConfig};
use uav_placement::radio::{capacity, max_distance, required_snr, snr, LinkBudget};
use uav_placement::region::{build_spheres, select_region, Lattice, SphereMode};
use uav_placement::scenario::{load_scenario, Scenario};
use uav_placement::{run, PipelineConfig, Point3};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn within(elapsed: Duration, budget_s: f64) -> (bool, String) {
    let s = elapsed.as_secs_f64();
    (s < budget_s, format!("{s:.2}s of {budget_s}s"))
}

// ---------------------------------------------------------------- 1

fn link_budget() -> Verdict {
    let start = Instant::now();
    let text = fs::read_to_string(manifest_dir().join("tests/fixtures/linkbudget_oracle.json")).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    let cases = doc["cases"].as_array().unwrap();
    let f = |c: &Value, k: &str| c[k].as_f64().unwrap();
    let (mut worst_ref, mut worst_inv) = (0.0f64, 0.0f64);
    for c in cases {
        let lb = LinkBudget {
            frequency_hz: f(c, "frequency_hz"),
            bandwidth_hz: f(c, "bandwidth_hz"),
            tx_power_w: f(c, "tx_power_w"),
            tx_gain: f(c, "tx_gain"),
            rx_gain: f(c, "rx_gain"),
            noise_floor_w: f(c, "noise_floor_w"),
            nlos_extra_loss_db: f(c, "nlos_extra_loss_db"),
            channel_capacity_cap_bps: None,
        };
        let los = c["los"].as_bool().unwrap();
        let s = snr(&lb, f(c, "distance_m"), los).unwrap();
        let req = f(c, "snr_req");
        let d_max = max_distance(&lb, req, los);
        worst_ref = worst_ref
            .max(rel_err(s, f(c, "snr")))
            .max(rel_err(capacity(&lb, s), f(c, "capacity_bps")))
            .max(rel_err(d_max, f(c, "max_distance_m")));
        worst_inv = worst_inv.max(rel_err(snr(&lb, d_max, los).unwrap(), req));
    }
    let (fast, time) = within(start.elapsed(), 5.0);
    let pass = cases.len() >= 1000 && worst_ref <= 1e-9 && worst_inv <= 1e-9 && fast;
    verdict(
        pass,
        format!(
            "{} cases, worst rel err vs arbitrary precision {worst_ref:.2e}, inverse {worst_inv:.2e}, {time}",
            cases.len()
        ),
    )
}

// ---------------------------------------------------------------- 2

const BAND_M: f64 = 1e-6;

fn random_footprint(rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let x0 = rng.gen_range(0.0..30.0);
    let y0 = rng.gen_range(0.0..30.0);
    let w = rng.gen_range(4.0..15.0);
    let d = rng.gen_range(4.0..15.0);
    match rng.gen_range(0..5) {
        0 => vec![[x0, y0], [x0 + w, y0], [x0 + w, y0 + d], [x0, y0 + d]],
        1 => {
            let (cw, cd) = (w * rng.gen_range(0.3..0.7), d * rng.gen_range(0.3..0.7));
            vec![
                [x0, y0],
                [x0 + w, y0],
                [x0 + w, y0 + d - cd],
                [x0 + w - cw, y0 + d - cd],
                [x0 + w - cw, y0 + d],
                [x0, y0 + d],
            ]
        }
        2 => {
            let a = w * rng.gen_range(0.15..0.35);
            let b = d * rng.gen_range(0.2..0.7);
            vec![
                [x0, y0],
                [x0 + w, y0],
                [x0 + w, y0 + d],
                [x0 + w - a, y0 + d],
                [x0 + w - a, y0 + b],
                [x0 + a, y0 + b],
                [x0 + a, y0 + d],
                [x0, y0 + d],
            ]
        }
        // Star-shaped, generally non-convex.
        3 => {
            let n = rng.gen_range(5..11);
            let (cx, cy) = (x0 + w / 2.0, y0 + d / 2.0);
            (0..n)
                .map(|k| {
                    let t = std::f64::consts::TAU * (k as f64 + rng.gen_range(0.0..0.6)) / n as f64;
                    let r = rng.gen_range(2.0..8.0);
                    [cx + r * t.cos(), cy + r * t.sin()]
                })
                .collect()
        }
        // Convex polygon.
        _ => {
            let n = rng.gen_range(3..9);
            let r = rng.gen_range(3.0..8.0);
            let phase = rng.gen_range(0.0..1.0);
            (0..n)
                .map(|k| {
                    let t = std::f64::consts::TAU * (k as f64 + phase) / n as f64;
                    [x0 + r * t.cos(), y0 + r * t.sin()]
                })
                .collect()
        }
    }
}

fn in_band(a: Point3, b: Point3, meshes: &[PrismMesh]) -> bool {
    meshes.iter().any(|m| {
        m.triangles.iter().any(|t| {
            let near_end = [a, b].iter().any(|&p| point_triangle_distance(p, t.v0, t.v1, t.v2) < BAND_M);
            near_end
                || [(t.v0, t.v1), (t.v1, t.v2), (t.v2, t.v0)]
                    .iter()
                    .any(|&(e0, e1)| segment_segment_distance(a, b, e0, e1) < BAND_M)
        })
    })
}

fn los_kernel() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x105);
    let (mut checked, mut excluded, mut blocked, mut disagree, mut nonconvex) = (0, 0, 0, 0, 0);
    while checked < 2000 {
        let count = rng.gen_range(1..5);
        let prisms: Vec<PolygonPrism> = (0..count)
            .filter_map(|_| {
                let corners = random_footprint(&mut rng);
                PolygonPrism::new(corners, rng.gen_range(3.0..25.0)).ok()
            })
            .collect();
        if prisms.is_empty() {
            continue;
        }
        let meshes: Vec<PrismMesh> = prisms.iter().map(|p| triangulate(p).unwrap()).collect();
        // Half the segments are aimed through a building's footprint box.
        let (a, b) = if rng.gen_bool(0.5) {
            (
                Point3::new(rng.gen_range(-10.0..50.0), rng.gen_range(-10.0..50.0), rng.gen_range(0.0..40.0)),
                Point3::new(rng.gen_range(-10.0..50.0), rng.gen_range(-10.0..50.0), 0.0),
            )
        } else {
            let target = &prisms[rng.gen_range(0..prisms.len())];
            let (lo, hi) = target.footprint_bbox();
            let through = Point3::new(
                rng.gen_range(lo[0]..hi[0]),
                rng.gen_range(lo[1]..hi[1]),
                rng.gen_range(0.0..target.height * 1.3),
            );
            let dir = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-0.6..0.6));
            let (s, t) = (rng.gen_range(5.0..40.0), rng.gen_range(5.0..40.0));
            let (mut a, mut b) = (through + dir * s, through - dir * t);
            a.z = a.z.max(0.0);
            b.z = b.z.max(0.0);
            (a, b)
        };
        if a.distance(b) < 1e-3 {
            continue;
        }
        if in_band(a, b, &meshes) {
            excluded += 1;
            continue;
        }
        checked += 1;
        nonconvex += usize::from(prisms.iter().any(|p| {
            !uav_placement::geometry::polygon::is_strictly_convex(&p.bottom_corners)
        }));
        let kernel = has_los(a, b, &meshes);
        blocked += usize::from(!kernel);
        if kernel != sampled_los(a, b, &prisms, 10_000) {
            disagree += 1;
            if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
                eprintln!("disagreement: kernel {kernel} a {a:?} b {b:?} prisms {prisms:?}");
            }
        }
    }
    let (fast, time) = within(start.elapsed(), 30.0);
    verdict(
        disagree == 0 && fast,
        format!(
            "{checked} cases ({blocked} blocked, {nonconvex} with non-convex footprints), \
             {disagree} disagreements, {excluded} excluded in the {BAND_M:e} m band, {time}"
        ),
    )
}

// ---------------------------------------------------------------- 3

fn region_certificate() -> Verdict {
    let start = Instant::now();
    let template = ScenarioTemplate::random_venue();
    let (mut bad_cert, mut bad_max, mut bad_complete, mut split) = (0, 0, 0, 0);
    let mut candidates = 0usize;
    for seed in 0..50 {
        let s = generate(&template, seed).unwrap();
        let v = s.venue;
        assert!(v.x_max - v.x_min <= 60.0 && v.y_max - v.y_min <= 60.0 && v.z_max - v.z_min <= 20.0);
        let spheres = build_spheres(&s, SphereMode::LosAssumed).unwrap();
        let region = match select_region(&spheres, &s) {
            Ok(r) => r,
            Err(_) => {
                bad_max += 1;
                continue;
            }
        };
        candidates += region.candidates.len();
        if region.associated_ues.len() < s.users.len() {
            split += 1;
        }
        let lb = &s.link_budget;
        let tallest = s.tallest_building();
        for &p in &region.candidates {
            let ok_bounds = v.contains(p) && p.z >= tallest && p.z <= s.ceiling_m;
            let ok_cover = region.associated_ues.iter().all(|id| {
                let u = s.user(*id).unwrap();
                let req = required_snr(u.demand_bps, &s.mcs_table).unwrap();
                u.position.distance(p) <= max_distance(lb, req, true) + 1e-9
            });
            if !(ok_bounds && ok_cover) {
                bad_cert += 1;
            }
        }
        // Independent scan: covering set of every lattice point, straight
        // from the radii.
        let lattice = Lattice::for_scenario(&s);
        let mut best = 0usize;
        let mut realising: BTreeSet<(i64, i64, i64)> = BTreeSet::new();
        let chosen: BTreeSet<u32> = region.associated_ues.iter().copied().collect();
        for p in lattice.points() {
            if s.users.iter().any(|u| u.position == p) {
                continue;
            }
            let cover: BTreeSet<u32> =
                spheres.iter().filter(|sp| sp.center.distance(p) <= sp.radius_m).map(|sp| sp.ue_id).collect();
            best = best.max(cover.len());
            if cover == chosen {
                realising.insert(key(p));
            }
        }
        let emitted: BTreeSet<_> = region.candidates.iter().map(|&p| key(p)).collect();
        if best != chosen.len() {
            bad_max += 1;
        }
        if emitted != realising {
            bad_complete += 1;
        }
    }
    let (fast, time) = within(start.elapsed(), 60.0);
    verdict(
        bad_cert == 0 && bad_max == 0 && bad_complete == 0 && fast,
        format!(
            "50 venues, {candidates} candidates, {bad_cert} certificate violations, \
             {bad_max} non-maximal, {bad_complete} incomplete, {split} with uncovered users, {time}"
        ),
    )
}

fn key(p: Point3) -> (i64, i64, i64) {
    ((p.x * 1e6).round() as i64, (p.y * 1e6).round() as i64, (p.z * 1e6).round() as i64)
}

// ---------------------------------------------------------------- 4

fn pso_vs_oracle() -> Verdict {
    let start = Instant::now();
    let template = ScenarioTemplate::random_small();
    let (mut runs, mut exact, mut within_1pct, mut monotone, mut largest) = (0, 0, 0, 0, 0);
    let mut worst_gap = 0.0f64;
    for scenario_seed in 0..20 {
        let s = generate(&template, 1000 + scenario_seed).unwrap();
        let meshes = s.meshes().unwrap();
        let region = select_region(&build_spheres(&s, SphereMode::LosAssumed).unwrap(), &s).unwrap();
        largest = largest.max(region.candidates.len());
        assert!(region.candidates.len() <= 5000);
        let truth = grid_search(&region, &s, &meshes, DEFAULT_CANDIDATE_CAP).unwrap();
        for seed in 0..5 {
            let r = optimize(&region, &s, &meshes, &PsoConfig::default().with_seed(seed)).unwrap();
            runs += 1;
            let gap = (truth.best_fitness_bps - r.g_best_fitness_bps) / truth.best_fitness_bps;
            worst_gap = worst_gap.max(gap);
            exact += usize::from(same_optimum(r.g_best_fitness_bps, truth.best_fitness_bps));
            within_1pct += usize::from(gap <= 0.01);
            monotone += usize::from(r.fitness_history.windows(2).all(|w| w[0] <= w[1]));
        }
    }
    let (fast, time) = within(start.elapsed(), 300.0);
    verdict(
        exact >= 95 && within_1pct == runs && monotone == runs && fast,
        format!(
            "{exact}/{runs} exact optimum, {within_1pct}/{runs} within 1% (worst gap {:.3}%), \
             {monotone}/{runs} monotone histories, up to {largest} candidates, {time}",
            worst_gap * 100.0
        ),
    )
}

// ---------------------------------------------------------------- 5

fn all_los_exact(s: &Scenario, expected_bps: f64, seeds: &[u64]) -> Result<String, String> {
    let mut sizes = Vec::new();
    for &seed in seeds {
        let cfg = PipelineConfig { pso: PsoConfig::default().with_seed(seed), ..PipelineConfig::default() };
        let r = run(s, &cfg).map_err(|e| e.to_string())?.result;
        if r.optimal_positions.is_empty() {
            return Err(format!("seed {seed}: empty co-optimal set"));
        }
        if r.g_best_fitness_bps != expected_bps {
            return Err(format!("seed {seed}: fitness {}", r.g_best_fitness_bps));
        }
        for p in &r.optimal_positions {
            if p.fitness_bps != expected_bps || p.los_count != s.users.len() {
                return Err(format!(
                    "seed {seed}: position {} has fitness {} and {} LoS links",
                    p.position, p.fitness_bps, p.los_count
                ));
            }
        }
        sizes.push(r.optimal_positions.len());
    }
    Ok(format!("{} co-optimal positions per seed", sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("/")))
}

fn use_cases() -> Verdict {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, template) in [
        ("usecase_a", ScenarioTemplate::usecase_a()),
        ("usecase_b", ScenarioTemplate::usecase_b()),
        ("usecase_c", ScenarioTemplate::usecase_c()),
    ] {
        let loaded = load_scenario(bundled(name)).unwrap();
        if loaded != generate_file(&template, template.seed).into_scenario().unwrap() {
            pass = false;
            notes.push(format!("{name}: bundled file differs from its template"));
        }
    }
    let seeds = [0, 1, 2];
    let a = load_scenario(bundled("usecase_a")).unwrap();
    match all_los_exact(&a, 468e6, &seeds) {
        Ok(n) => notes.push(format!("A 468 Mbit/s all-LoS ({n})")),
        Err(e) => {
            pass = false;
            notes.push(format!("A: {e}"));
        }
    }
    let b = load_scenario(bundled("usecase_b")).unwrap();
    match all_los_exact(&b, 702e6, &seeds) {
        Ok(n) => notes.push(format!("B 702 Mbit/s all-LoS ({n})")),
        Err(e) => {
            pass = false;
            notes.push(format!("B: {e}"));
        }
    }
    let c = load_scenario(bundled("usecase_c")).unwrap();
    let summary = run(&c, &PipelineConfig::default()).unwrap().result.region.unwrap();
    let mut high: Vec<u32> = c.users.iter().filter(|u| u.demand_bps > 500e6).map(|u| u.id).collect();
    high.sort_unstable();
    let ok_c = summary.associated_count == 6 && summary.uncovered_ues == high;
    pass &= ok_c;
    notes.push(format!(
        "C associated {:?}, uncovered {:?} (demand > 500 Mbit/s: {:?})",
        summary.associated_ues, summary.uncovered_ues, high
    ));
    let (fast, time) = within(start.elapsed(), 120.0);
    verdict(pass && fast, format!("{}; {time}", notes.join("; ")))
}

// ---------------------------------------------------------------- 6, 7

fn uavplace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uavplace")).args(args).output().expect("binary runs")
}

fn determinism() -> Verdict {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    let mut runs = 0;
    for name in BUNDLED {
        let scenario = bundled(name);
        let mut outputs = Vec::new();
        for (i, threads) in ["1", "8", "1", "8", "3"].iter().enumerate() {
            let out = tmp.path().join(format!("{name}-{i}"));
            let o = uavplace(&[
                "solve",
                "--scenario",
                scenario.to_str().unwrap(),
                "--seed",
                "17",
                "--threads",
                threads,
                "--out",
                out.to_str().unwrap(),
            ]);
            runs += 1;
            if !o.status.success() {
                failures.push(format!("{name}: exit {:?}", o.status.code()));
                continue;
            }
            outputs.push(fs::read(out.join("result.json")).unwrap());
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            failures.push(format!("{name}: result.json differs between runs"));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{runs} solves over {} scenarios with 1, 3 and 8 threads: {}; {:.2}s",
            BUNDLED.len(),
            if failures.is_empty() { "byte-identical".to_string() } else { failures.join(", ") },
            start.elapsed().as_secs_f64()
        ),
    )
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = fs::read_to_string(manifest_dir().join("schemas").join(format!("{name}.schema.json"))).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

struct Contract {
    failures: Vec<String>,
    checks: usize,
}

impl Contract {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.checks += 1;
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn valid(&mut self, v: &jsonschema::Validator, doc: &Value, what: &str) {
        let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
        self.check(errors.is_empty(), format!("{what}: {}", errors.join("; ")));
    }

    fn error_exit(&mut self, o: &Output, code: i32, kind: &str, what: &str, err_schema: &jsonschema::Validator) {
        self.check(o.status.code() == Some(code), format!("{what}: exit {:?}, want {code}", o.status.code()));
        match serde_json::from_slice::<Value>(&o.stderr) {
            Ok(doc) => {
                self.valid(err_schema, &doc, what);
                self.check(doc["error"] == kind, format!("{what}: error kind {}", doc["error"]));
                self.check(doc["exit_code"] == code, format!("{what}: exit_code field {}", doc["exit_code"]));
            }
            Err(_) => self.check(false, format!("{what}: stderr is not JSON: {}", String::from_utf8_lossy(&o.stderr))),
        }
    }
}

fn cli_contract() -> Verdict {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let (scenario_schema, result_schema) = (schema("scenario"), schema("result"));
    let (manifest_schema, region_schema, error_schema) = (schema("manifest"), schema("region"), schema("error"));
    let mut c = Contract { failures: Vec::new(), checks: 0 };

    for name in BUNDLED {
        c.valid(&scenario_schema, &json_file(&bundled(name)), &format!("{name}.json"));
    }

    // Success: solve with region dump.
    let a = bundled("usecase_a");
    let o = uavplace(&["solve", "--scenario", a.to_str().unwrap(), "--seed", "3", "--out", &p("a"), "--dump-region"]);
    c.check(o.status.success(), format!("solve: exit {:?}", o.status.code()));
    let result = json_file(&dir.join("a/result.json"));
    c.valid(&result_schema, &result, "result.json");
    c.valid(&manifest_schema, &json_file(&dir.join("a/manifest.json")), "manifest.json");
    let region = json_file(&dir.join("a/region.json"));
    c.valid(&region_schema, &region, "region.json");
    c.check(
        region["summary"]["candidate_count"].as_u64() == region["candidates"].as_array().map(|v| v.len() as u64),
        "region.json candidate count",
    );
    let csv = fs::read_to_string(dir.join("a/result.csv")).unwrap_or_default();
    c.check(
        csv.lines().count() == result["ranking"].as_array().map_or(0, |r| r.len()) + 1,
        "result.csv has one row per ranked position",
    );

    // Evaluate at g_best reproduces the fitness exactly.
    let g = &result["g_best"];
    let at = format!("{},{},{}", g["x"], g["y"], g["z"]);
    let o = uavplace(&["evaluate", "--scenario", a.to_str().unwrap(), "--uav", &at, "--out", &p("eval.json")]);
    c.check(o.status.success(), "evaluate at g_best");
    let ev = json_file(&dir.join("eval.json"));
    c.check(ev["evaluation"]["served_bps"] == result["fitness_bps"], "evaluate reproduces solve fitness");

    // Oracle verb on a small generated scenario, same schema.
    let o = uavplace(&["gen", "--template", "random_small", "--seed", "4", "--out", &p("small.json")]);
    c.check(o.status.success(), "gen");
    c.valid(&scenario_schema, &json_file(&dir.join("small.json")), "generated scenario");
    let o = uavplace(&["oracle", "--scenario", &p("small.json"), "--out", &p("oracle")]);
    c.check(o.status.success(), format!("oracle: exit {:?}", o.status.code()));
    c.valid(&result_schema, &json_file(&dir.join("oracle/result.json")), "oracle result.json");
    c.valid(&manifest_schema, &json_file(&dir.join("oracle/manifest.json")), "oracle manifest.json");
    let o = uavplace(&["oracle", "--scenario", &p("small.json"), "--out", &p("oracle2"), "--max-candidates", "1"]);
    c.error_exit(&o, 2, "candidate_cap_exceeded", "oracle over cap", &error_schema);

    // Error paths.
    let write = |name: &str, text: &str| {
        fs::write(dir.join(name), text).unwrap();
        p(name)
    };
    let empty = write(
        "empty.json",
        r#"{"users":[{"id":1,"x":0,"y":0,"demand_mbps":234}],
            "buildings":[{"bottom_corners":[[5,5],[8,5],[8,8],[5,8]],"height":40}]}"#,
    );
    let o = uavplace(&["solve", "--scenario", &empty, "--out", &p("e")]);
    c.error_exit(&o, 3, "empty_region", "EmptyRegion", &error_schema);
    let demand = write("demand.json", r#"{"users":[{"id":1,"x":0,"y":0,"demand_mbps":800}]}"#);
    let o = uavplace(&["solve", "--scenario", &demand, "--out", &p("d")]);
    c.error_exit(&o, 4, "demand_exceeds_table", "DemandExceedsTable", &error_schema);
    let malformed = write("bad.json", r#"{"users": [{"id": 1, "x": 0,"#);
    let o = uavplace(&["solve", "--scenario", &malformed, "--out", &p("m")]);
    c.error_exit(&o, 2, "parse", "malformed JSON", &error_schema);
    let invalid = write("zero.json", r#"{"users":[{"id":1,"x":0,"y":0,"demand_mbps":0}]}"#);
    let o = uavplace(&["solve", "--scenario", &invalid, "--out", &p("z")]);
    c.error_exit(&o, 2, "validation", "zero demand", &error_schema);
    let o = uavplace(&["solve", "--scenario", &p("missing.json"), "--out", &p("x")]);
    c.error_exit(&o, 5, "io", "missing scenario", &error_schema);
    let o = uavplace(&["solve", "--scenario", a.to_str().unwrap(), "--particles", "lots"]);
    c.error_exit(&o, 2, "usage", "bad flag value", &error_schema);

    // Diagnostic verbs.
    let o = uavplace(&["los-check", "--scenario", a.to_str().unwrap(), "--uav", "1,1,1", "--ue", "1,1,1"]);
    c.error_exit(&o, 2, "usage", "los-check with uav == ue", &error_schema);
    let o = uavplace(&["los-check", "--scenario", a.to_str().unwrap(), "--uav", "26,10,11", "--ue", "26,34,0"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    c.check(o.status.success() && stdout.trim() == "NLoS blocked by building 1", format!("los-check blocked: {stdout}"));
    let open = write("open.json", r#"{"users":[{"id":1,"x":0,"y":0,"demand_mbps":58.5}]}"#);
    let o = uavplace(&["los-check", "--scenario", &open, "--uav", "0,0,20", "--ue", "0,5,0"]);
    c.check(String::from_utf8_lossy(&o.stdout).trim() == "LoS", "los-check without buildings");
    let o = uavplace(&["evaluate", "--scenario", a.to_str().unwrap(), "--uav", "0,0,500"]);
    c.error_exit(&o, 2, "usage", "evaluate out of bounds", &error_schema);

    verdict(
        c.failures.is_empty(),
        format!(
            "{} checks, {} failed{}; {:.2}s",
            c.checks,
            c.failures.len(),
            if c.failures.is_empty() { String::new() } else { format!(": {}", c.failures.join(" | ")) },
            start.elapsed().as_secs_f64()
        ),
    )
}

fn main() {
    type Criterion = (&'static str, &'static str, fn() -> Verdict);
    let criteria: [Criterion; 7] = [
        ("1", "link budget vs arbitrary precision", link_budget),
        ("2", "LoS kernel vs sampling oracle", los_kernel),
        ("3", "region certificate and maximality", region_certificate),
        ("4", "swarm vs exhaustive search", pso_vs_oracle),
        ("5", "use-case structure", use_cases),
        ("6", "determinism", determinism),
        ("7", "CLI contract", cli_contract),
    ];
    // libtest-style flags (e.g. --nocapture) are ignored; bare words filter.
    let filters: HashSet<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !filters.is_empty() && !filters.contains(id) {
            continue;
        }
        let v = check();
        println!("criterion {id} {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
