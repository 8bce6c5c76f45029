use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tstar_cli::bench::{draw_conditions, run_bench, BenchConfig};
use tstar_cli::io::{load_scenarios, read_scenario, scenario_file_name};
use tstar_core::gridworld::ScenarioGenerator;
use tstar_core::oracle::{CacheDump, OracleMemo, TransitionOracle};
use tstar_core::planner::{plan_tstar_eps_with, plan_tstar_with, Algorithm, PlanResult, PlannerOptions};
use tstar_core::render::render_svg;
use tstar_core::{BoundKind, Configuration, Error, Scenario, VehicleParams, WindVector};

const EXIT_NO_SOLUTION: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "tstar", version, about = "Minimum-time lattice planning for variable-speed vehicles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random solvable scenarios, one file per seed.
    Generate(GenerateArgs),
    /// Plan one scenario and print a JSON report.
    Plan(PlanArgs),
    /// Run T* and T*ε over a directory of scenarios and write CSV.
    Bench(BenchArgs),
    /// Draw a scenario, optionally with a planned path, as SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct Conditions {
    /// Override the scenario's wind, as `wx,wy`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    wind: Option<(f64, f64)>,
    /// Override the scenario's minimum speed.
    #[arg(long)]
    vmin: Option<f64>,
}

impl Conditions {
    fn apply(&self, s: Scenario) -> tstar_core::Result<Scenario> {
        if self.wind.is_none() && self.vmin.is_none() {
            return Ok(s);
        }
        let params = match self.vmin {
            Some(v) => VehicleParams::new(v, s.params.v_max, s.params.k)?,
            None => s.params,
        };
        let wind = self.wind.map_or(s.wind, |(x, y)| WindVector::new(x, y));
        s.with_conditions(params, wind)
    }
}

#[derive(Args)]
struct Search {
    #[arg(long, default_value = "tstar-eps")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Lower bound for `ĉ` and `h`; defaults to dubins in calm air and
    /// wind-lb2 otherwise.
    #[arg(long)]
    bound: Option<BoundKind>,
    /// Evaluate every transition class before searching.
    #[arg(long)]
    precompute: bool,
    /// Skip the Dubins grid path bootstrap of T*ε.
    #[arg(long)]
    no_s1: bool,
}

impl Search {
    fn options(&self) -> PlannerOptions {
        PlannerOptions { bound: self.bound, s1: !self.no_s1, precompute: self.precompute, ..Default::default() }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    out_dir: PathBuf,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 14)]
    width: usize,
    #[arg(long, default_value_t = 14)]
    height: usize,
    #[arg(long, default_value_t = 0.25)]
    p_block: f64,
    #[command(flatten)]
    conditions: Conditions,
}

#[derive(Args)]
struct PlanArgs {
    scenario: PathBuf,
    #[command(flatten)]
    search: Search,
    #[command(flatten)]
    conditions: Conditions,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Start from the classes stored in this cache file.
    #[arg(long)]
    load_cache: Option<PathBuf>,
    /// Write every class evaluated by this run to a cache file.
    #[arg(long)]
    save_cache: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    scenario_dir: PathBuf,
    /// Comma-separated ε values for T*ε.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.3, 0.5, 1.0, 2.0, 3.0])]
    epsilon: Vec<f64>,
    /// Lower bound for `ĉ` and `h`; defaults as in `plan`.
    #[arg(long)]
    bound: Option<BoundKind>,
    /// Run T*ε without the Dubins grid path bootstrap.
    #[arg(long)]
    no_s1: bool,
    /// Run T*ε both with and without S1.
    #[arg(long, conflicts_with = "no_s1")]
    compare_s1: bool,
    #[command(flatten)]
    conditions: Conditions,
    /// Draw wind magnitudes from `lo,hi` (direction uniform).
    #[arg(long, value_parser = parse_pair)]
    wind_range: Option<(f64, f64)>,
    /// Draw minimum speeds from `lo,hi`.
    #[arg(long, value_parser = parse_pair)]
    vmin_range: Option<(f64, f64)>,
    /// Number of (wind, v_min) draws shared by all scenarios.
    #[arg(long, default_value_t = 10)]
    draws: usize,
    /// Seed of the condition draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    scenario: PathBuf,
    #[arg(long)]
    svg: PathBuf,
    /// Plan first and draw the path.
    #[arg(long)]
    with_path: bool,
    #[command(flatten)]
    search: Search,
    #[command(flatten)]
    conditions: Conditions,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((a.parse().map_err(|e| format!("{a:?}: {e}"))?, b.parse().map_err(|e| format!("{b:?}: {e}"))?)),
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

enum Failure {
    NoSolution,
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OracleFailed(_) | Error::GenerationFailed { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn with_path(p: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", p.display()))
}

#[derive(Serialize)]
struct Report<'a> {
    scenario: String,
    algorithm: &'a str,
    epsilon: f64,
    bound: &'a str,
    status: tstar_core::planner::PlanStatus,
    cost: Option<f64>,
    stats: &'a tstar_core::planner::PlanStats,
    path: Vec<Configuration>,
}

fn plan(s: &Scenario, search: &Search, memo: Option<Arc<OracleMemo>>) -> Result<PlanResult, Failure> {
    let opts = PlannerOptions { memo, ..search.options() };
    Ok(match search.algorithm {
        Algorithm::TStar => plan_tstar_with(s, &opts)?,
        Algorithm::TStarEps => plan_tstar_eps_with(s, search.epsilon, &opts)?,
    })
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), Failure> {
    let mut gen = ScenarioGenerator::new(a.width, a.height, a.p_block)?;
    if let Some(v) = a.conditions.vmin {
        gen.params = VehicleParams::new(v, gen.params.v_max, gen.params.k)?;
    }
    fs::create_dir_all(&a.out_dir).map_err(with_path(&a.out_dir))?;
    let mut written = 0;
    for seed in a.seed..a.seed + a.count {
        let s = match gen.generate(seed) {
            Ok(s) => a.conditions.apply(s)?,
            Err(e @ Error::GenerationFailed { .. }) => {
                eprintln!("skipping seed {seed}: {e}");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let path = a.out_dir.join(scenario_file_name(seed));
        fs::write(&path, s.to_json()?).map_err(with_path(&path))?;
        written += 1;
    }
    eprintln!("wrote {written} scenarios to {}", a.out_dir.display());
    Ok(())
}

fn cmd_plan(a: &PlanArgs) -> Result<(), Failure> {
    let s = a.conditions.apply(read_scenario(&a.scenario)?)?;
    let oracle = TransitionOracle::new(s.params, s.wind, s.map.cell_size)?;
    let memo = match &a.load_cache {
        Some(p) => {
            let dump = CacheDump::from_json(&fs::read_to_string(p).map_err(with_path(p))?)?;
            let memo = OracleMemo::from_dump(dump)?;
            if memo.settings() != oracle.settings() {
                return Err(Failure::Input(format!("{} was built for other vehicle, wind or cell settings", p.display())));
            }
            memo
        }
        None => OracleMemo::new(*oracle.settings()),
    };
    let memo = Arc::new(memo);
    let r = plan(&s, &a.search, Some(memo.clone()))?;
    if let Some(p) = &a.save_cache {
        fs::write(p, memo.dump().to_json()?).map_err(with_path(p))?;
    }
    if let Some(p) = &a.svg {
        fs::write(p, render_svg(&s, Some(&r))).map_err(with_path(p))?;
    }
    let report = Report {
        scenario: a.scenario.display().to_string(),
        algorithm: r.algorithm.name(),
        epsilon: r.epsilon,
        bound: r.bound.name(),
        status: r.status,
        cost: r.is_solved().then_some(r.cost),
        stats: &r.stats,
        path: r.configurations(),
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    // a closed pipe downstream is not our failure
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if r.is_solved() {
        Ok(())
    } else {
        Err(Failure::NoSolution)
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<(), Failure> {
    let mut scenarios = load_scenarios(&a.scenario_dir).map_err(|e| Failure::Input(format!("{}: {e}", a.scenario_dir.display())))?;
    for (_, s) in scenarios.iter_mut() {
        *s = a.conditions.apply(s.clone())?;
    }
    let draws = match (a.wind_range, a.vmin_range) {
        (None, None) => Vec::new(),
        (w, v) => {
            let fixed_v = a.conditions.vmin.unwrap_or(VehicleParams::default().v_min);
            draw_conditions(a.seed, a.draws, w.unwrap_or((0.0, 0.0)), v.unwrap_or((fixed_v, fixed_v)))?
        }
    };
    let cfg = BenchConfig {
        epsilons: a.epsilon.clone(),
        bound: a.bound,
        s1_modes: if a.compare_s1 { vec![true, false] } else { vec![!a.no_s1] },
        draws,
        jobs: a.jobs,
    };
    let report = run_bench(&scenarios, &cfg)?;
    match &a.csv {
        Some(p) => {
            let f = fs::File::create(p).map_err(with_path(p))?;
            report.write_csv(std::io::BufWriter::new(f))?;
        }
        None => {
            if let Err(e) = report.write_csv(std::io::stdout().lock()) {
                eprintln!("writing CSV: {e}");
            }
        }
    }
    let mut err = std::io::stderr().lock();
    let reference = report.mean("tstar", 0.0, false, "oracle_calls");
    for agg in report.aggregates() {
        let calls = agg.mean[3];
        let _ = writeln!(
            err,
            "{:<9} eps={:<4} s1={:<5} solved {}/{}  mean ratio {:.4}  mean calls {:.1}  reduction {:.2}x",
            agg.algorithm,
            agg.epsilon,
            agg.s1,
            agg.solved,
            agg.runs,
            agg.mean[2],
            calls,
            reference.map_or(f64::NAN, |r| r / calls),
        );
    }
    Ok(())
}

fn cmd_render(a: &RenderArgs) -> Result<(), Failure> {
    let s = a.conditions.apply(read_scenario(&a.scenario)?)?;
    let r = if a.with_path { Some(plan(&s, &a.search, None)?) } else { None };
    fs::write(&a.svg, render_svg(&s, r.as_ref())).map_err(with_path(&a.svg))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Render(a) => cmd_render(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoSolution) => {
            eprintln!("no solution");
            ExitCode::from(EXIT_NO_SOLUTION)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
