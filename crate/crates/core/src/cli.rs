//! `uavplace` command line. Human-readable tables go to stdout, machine
//! formats only to files, failures to stderr as one JSON object.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::bench::{generate_file, ScenarioTemplate};
use crate::geometry::{blocking_prisms, has_los};
use crate::oracle::DEFAULT_CANDIDATE_CAP;
use crate::pipeline::{exit, run, Error, PipelineConfig, Run, Search};
use crate::point::Point3;
use crate::pso::{PlacementResult, PsoConfig};
use crate::radio::{evaluate_links, LinkEvaluation};
use crate::region::SphereMode;
use crate::scenario::{load_scenario, write_result, RadioSpec, Scenario, ScenarioError};

#[derive(Debug, Parser)]
#[command(name = "uavplace", version, about = "Aerial access point placement over a venue with buildings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Swarm search for the best position; writes result.json, result.csv, manifest.json.
    Solve(SolveArgs),
    /// Exhaustive search over the feasible region, same outputs as `solve`.
    Oracle(OracleArgs),
    /// Line-of-sight test between two points.
    LosCheck(LosCheckArgs),
    /// Per-user link metrics at one position.
    Evaluate(EvaluateArgs),
    /// Write a generated scenario.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Overrides the scenario's lattice spacing (m).
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write region.json with the summary and every candidate.
    #[arg(long)]
    pub dump_region: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Shrink coverage spheres by the NLoS penalty.
    #[arg(long)]
    pub nlos_spheres: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 30)]
    pub particles: usize,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
    pub max_candidates: usize,
}

#[derive(Debug, Args)]
pub struct LosCheckArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// `x,y,z`
    #[arg(long, value_parser = parse_point)]
    pub uav: Point3,
    /// `x,y,z`
    #[arg(long, value_parser = parse_point)]
    pub ue: Point3,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// `x,y,z`
    #[arg(long, value_parser = parse_point)]
    pub uav: Point3,
    /// Write the metrics as JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Template name; `--list` shows them.
    #[arg(long, required_unless_present = "list")]
    pub template: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub list: bool,
}

pub fn parse_point(s: &str) -> Result<Point3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Point3::new(x, y, z)),
        _ => Err(format!("expected three finite numbers x,y,z, got {s:?}")),
    }
}

/// Everything needed to rerun a `solve` or `oracle` invocation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub scenario_path: String,
    pub scenario_sha256: String,
    pub config: EffectiveConfig,
    pub timings_s: crate::pipeline::StageTimings,
    pub outputs: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct EffectiveConfig {
    pub pipeline: PipelineConfig,
    pub grid_step_m: f64,
    pub radio: RadioSpec,
    pub c_max_mbps: Option<f64>,
    pub threads: Option<usize>,
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Scenario(ScenarioError::Io { path: path.to_path_buf(), source })
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn load(path: &Path, grid_step: Option<f64>) -> Result<Scenario, Error> {
    let mut scenario = load_scenario(path)?;
    if let Some(step) = grid_step {
        scenario.grid_step_m = step;
        scenario.validate()?;
    }
    Ok(scenario)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Usage("--threads must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Usage(format!("thread pool: {e}"))),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Error> {
    let value = serde_json::to_value(value).expect("serializable");
    let mut text = serde_json::to_string_pretty(&value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn print_top(result: &PlacementResult, out: &mut impl Write) {
    let _ = writeln!(
        out,
        "fitness {:.3} Mbit/s, {} iterations, {} evaluations{}",
        result.g_best_fitness_bps / 1e6,
        result.iterations_run,
        result.evaluations,
        if result.early_stopped { ", stopped early" } else { "" }
    );
    if let Some(r) = &result.region {
        let _ = writeln!(
            out,
            "region: {} candidates, users {:?} associated, {:?} uncovered",
            r.candidate_count, r.associated_ues, r.uncovered_ues
        );
    }
    let _ = writeln!(out, "{:>4}  {:>24}  {:>14}  {:>3}  {:>12}", "rank", "position (m)", "fitness Mbit/s", "LoS", "mean dist m");
    for (i, p) in result.optimal_positions.iter().take(5).enumerate() {
        let _ = writeln!(
            out,
            "{:>4}  {:>24}  {:>14.3}  {:>3}  {:>12.3}",
            i + 1,
            format!("({}, {}, {})", p.position.x, p.position.y, p.position.z),
            p.fitness_bps / 1e6,
            p.los_count,
            p.mean_distance_m
        );
    }
    if result.optimal_positions.len() > 5 {
        let _ = writeln!(out, "({} co-optimal positions in total)", result.optimal_positions.len());
    }
}

fn run_and_write(common: &CommonArgs, cfg: PipelineConfig, command: &'static str) -> Result<(), Error> {
    let bytes = fs::read(&common.scenario).map_err(|e| io_error(&common.scenario, e))?;
    let scenario = load(&common.scenario, common.grid_step)?;
    let Run { result, region, timings } = with_threads(common.threads, || run(&scenario, &cfg))??;

    fs::create_dir_all(&common.out).map_err(|e| io_error(&common.out, e))?;
    let result_path = common.out.join("result.json");
    write_result(&result, &result_path)?;
    let mut outputs = vec!["result.json".to_string(), "result.csv".to_string()];
    if common.dump_region {
        let path = common.out.join("region.json");
        write_json(&path, &json!({ "summary": result.region, "candidates": region.candidates }))?;
        outputs.push("region.json".into());
    }
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        scenario_path: common.scenario.display().to_string(),
        scenario_sha256: sha256_hex(&bytes),
        config: EffectiveConfig {
            pipeline: cfg,
            grid_step_m: scenario.grid_step_m,
            radio: RadioSpec::from_link_budget(&scenario.link_budget),
            c_max_mbps: scenario.link_budget.channel_capacity_cap_bps.map(|c| c / 1e6),
            threads: common.threads,
        },
        timings_s: timings,
        outputs,
    };
    write_json(&common.out.join("manifest.json"), &manifest)?;
    print_top(&result, &mut std::io::stdout().lock());
    Ok(())
}

fn sphere_mode(common: &CommonArgs) -> SphereMode {
    if common.nlos_spheres {
        SphereMode::NlosConservative
    } else {
        SphereMode::LosAssumed
    }
}

fn solve(args: &SolveArgs) -> Result<(), Error> {
    let pso = PsoConfig {
        particles: args.particles,
        max_iterations: args.iterations,
        seed: args.seed,
        ..PsoConfig::default()
    };
    let cfg = PipelineConfig { pso, sphere_mode: sphere_mode(&args.common), search: Search::Swarm };
    run_and_write(&args.common, cfg, "solve")
}

fn oracle(args: &OracleArgs) -> Result<(), Error> {
    let cfg = PipelineConfig {
        sphere_mode: sphere_mode(&args.common),
        search: Search::Exhaustive { cap: args.max_candidates },
        ..PipelineConfig::default()
    };
    run_and_write(&args.common, cfg, "oracle")
}

fn los_check(args: &LosCheckArgs) -> Result<(), Error> {
    if args.uav == args.ue {
        return Err(Error::Usage("--uav and --ue must differ".into()));
    }
    let scenario = load_scenario(&args.scenario)?;
    let meshes = scenario.meshes()?;
    let mut out = std::io::stdout().lock();
    if has_los(args.uav, args.ue, &meshes) {
        let _ = writeln!(out, "LoS");
    } else {
        let ids: Vec<String> = blocking_prisms(args.uav, args.ue, &meshes)
            .into_iter()
            .map(|i| scenario.buildings[i].id.to_string())
            .collect();
        let _ = writeln!(out, "NLoS blocked by building {}", ids.join(", "));
    }
    Ok(())
}

fn print_evaluation(ev: &LinkEvaluation, out: &mut impl Write) {
    let _ = writeln!(
        out,
        "{:>4}  {:>10}  {:>4}  {:>10}  {:>14}  {:>12}  {:>4}",
        "ue", "dist m", "link", "SNR dB", "capacity Mbit/s", "served Mbit/s", "met"
    );
    for l in &ev.links {
        let _ = writeln!(
            out,
            "{:>4}  {:>10.3}  {:>4}  {:>10.3}  {:>14.3}  {:>12.3}  {:>4}",
            l.ue_id,
            l.distance_m,
            if l.los { "LoS" } else { "NLoS" },
            crate::radio::linear_to_db(l.snr_linear),
            l.capacity_bps / 1e6,
            l.served_bps / 1e6,
            if l.demand_met { "yes" } else { "no" }
        );
    }
    let cap = match ev.c_max_violated {
        None => "no cap configured",
        Some(true) => "cap exceeded",
        Some(false) => "within cap",
    };
    let _ = writeln!(
        out,
        "served {:.3} Mbit/s, capacity sum {:.3} Mbit/s, {}",
        ev.served_bps / 1e6,
        ev.capacity_bps / 1e6,
        cap
    );
}

fn evaluate(args: &EvaluateArgs) -> Result<(), Error> {
    let scenario = load_scenario(&args.scenario)?;
    if !scenario.venue.contains(args.uav) {
        return Err(Error::Usage(format!(
            "position ({}, {}, {}) lies outside the venue bounds",
            args.uav.x, args.uav.y, args.uav.z
        )));
    }
    let meshes = scenario.meshes()?;
    let ev = evaluate_links(args.uav, &scenario, &meshes)?;
    if let Some(path) = &args.out {
        write_json(path, &json!({ "position": args.uav, "evaluation": ev }))?;
    }
    print_evaluation(&ev, &mut std::io::stdout().lock());
    Ok(())
}

fn gen(args: &GenArgs) -> Result<(), Error> {
    if args.list {
        for t in ScenarioTemplate::builtin() {
            println!("{}", t.name);
        }
        return Ok(());
    }
    let name = args.template.as_deref().unwrap_or_default();
    let template = ScenarioTemplate::by_name(name)
        .ok_or_else(|| Error::Usage(format!("unknown template {name:?}; try --list")))?;
    let file = generate_file(&template, args.seed.unwrap_or(template.seed));
    // Refuse to emit something that would not load.
    file.clone().into_scenario()?;
    let mut text = serde_json::to_string_pretty(&file).expect("serializable");
    text.push('\n');
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::LosCheck(a) => los_check(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Gen(a) => gen(a),
    }
}

pub fn error_json(err: &Error) -> String {
    json!({ "error": err.kind(), "exit_code": err.exit_code(), "message": err.to_string() }).to_string()
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return exit::SUCCESS;
        }
        Err(e) => {
            let err = Error::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", error_json(&err));
            return err.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => exit::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_json(&err));
            err.exit_code()
        }
    }
}
