//! `botma`: command-line front end for the bearings-only TMA workbench.
//!
//! Exit codes: 0 success, 1 validation (bad flags, config or scenario, or a
//! violated threshold), 2 runtime failure (I/O and the like).

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use botma_core::config::ExperimentConfig;
use botma_core::grid::{grid_cell_count, write_cost_volume, GridSpec, MAX_DUMP_CELLS};
use botma_core::harness::{self, MonteCarloSummary, Thresholds};
use botma_core::kinematics::synthesize_bearings;
use botma_core::{cma, ga, output, presets, BearingObjective, Scenario, SolverConfig, SolverKind, TmaError};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Grids larger than this need `--confirm-full-grid`.
const GRID_CONFIRM_CELLS: u64 = 10_000_000;

#[derive(Parser, Debug)]
#[command(name = "botma", version, about = "Bearings-only target motion analysis workbench")]
struct Cli {
    /// Worker threads for Monte Carlo runs and grid partitions (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write observer/target tracks and clean + noisy bearings as CSV.
    Simulate(SimulateArgs),
    /// Run one solver once and report the estimate.
    Solve(SolveArgs),
    /// Monte Carlo summary (mean / std / |Dev|) for one solver.
    Mc(McArgs),
    /// Monte Carlo summaries over increasing noise levels.
    Sweep(SweepArgs),
    /// Run several solvers on the same noise realizations and compare fevals.
    Compare(CompareArgs),
    /// List presets, or print one as a scenario file.
    Preset {
        /// Preset to print (trial01..trial12); omit to list names.
        name: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
struct ScenarioArgs {
    /// Built-in scenario trial01..trial12.
    #[arg(long)]
    preset: Option<String>,
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Experiment config file (TOML); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the fully resolved scenario and exit.
    #[arg(long)]
    print_preset: bool,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Solver: ga, cma or grid.
    #[arg(long)]
    solver: Option<String>,
    /// Use the 280 x 720 x 250 reference grid instead of the coarse one.
    #[arg(long)]
    full_grid: bool,
    /// Allow grids above 10^7 cells.
    #[arg(long)]
    confirm_full_grid: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Override the scenario's noise seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Solver seed (noise still comes from the scenario seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Write the per-generation CMA-ES trace.
    #[arg(long)]
    trace: bool,
    /// Write the full grid cost volume (grids under 10^6 cells).
    #[arg(long)]
    dump_volume: bool,
}

#[derive(Args, Debug, Clone)]
struct HarnessArgs {
    /// Monte Carlo runs.
    #[arg(short = 'M', long = "runs")]
    runs: Option<usize>,
    /// Use 1000 runs per summary.
    #[arg(long, conflicts_with = "runs")]
    paper_scale: bool,
    /// Master seed for per-run noise and solver streams.
    #[arg(long)]
    master_seed: Option<u64>,
}

#[derive(Args, Debug)]
struct McArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    harness: HarnessArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    harness: HarnessArgs,
    /// Comma-separated noise levels in degrees, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    harness: HarnessArgs,
    /// Comma-separated solvers to compare.
    #[arg(long, value_delimiter = ',', default_value = "cma,ga")]
    solvers: Vec<String>,
    #[arg(long)]
    full_grid: bool,
    #[arg(long)]
    confirm_full_grid: bool,
}

enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<TmaError> for Failure {
    fn from(e: TmaError) -> Self {
        match e {
            TmaError::Io(_) | TmaError::Csv(_) | TmaError::TomlSer(_) => Failure::Runtime(e.into()),
            _ => Failure::Validation(e.into()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn validation(msg: impl Into<String>) -> Failure {
    Failure::Validation(anyhow!(msg.into()))
}

struct Resolved {
    config: ExperimentConfig,
    scenario: Scenario,
    out: PathBuf,
}

fn resolve(args: &ScenarioArgs) -> Result<Resolved, Failure> {
    let mut config = match &args.config {
        Some(p) => ExperimentConfig::load(p)
            .with_context(|| format!("reading config {}", p.display()))
            .map_err(Failure::Validation)?,
        None => ExperimentConfig::default(),
    };
    if args.preset.is_some() || args.scenario.is_some() {
        config.scenario.preset = args.preset.clone();
        config.scenario.path = args.scenario.clone();
    }
    let base = args.config.as_deref().and_then(Path::parent);
    let scenario = config.scenario.load(base)?;
    let out = args
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("botma-out"));
    Ok(Resolved { config, scenario, out })
}

fn print_scenario(s: &Scenario) -> CmdResult {
    print!("{}", presets::scenario_to_toml(s)?);
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(Failure::Runtime)?;
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display())).map_err(Failure::Runtime)?;
    Ok(BufWriter::new(f))
}

fn grid_spec(config: &ExperimentConfig, full: bool, confirmed: bool) -> Result<GridSpec, Failure> {
    let spec = if full { GridSpec::reference() } else { config.grid };
    let cells = grid_cell_count(&spec)?;
    if cells > GRID_CONFIRM_CELLS && !confirmed {
        return Err(validation(format!(
            "grid has {cells} cells (> {GRID_CONFIRM_CELLS}); pass --confirm-full-grid to run it"
        )));
    }
    Ok(spec)
}

fn solver_config(config: &ExperimentConfig, args: &SolverArgs) -> Result<SolverConfig, Failure> {
    let kind = match &args.solver {
        Some(name) => name.parse::<SolverKind>()?,
        None => config.solver,
    };
    let mut cfg = config.solver_config(kind);
    if let SolverConfig::Grid(spec) = &mut cfg {
        *spec = grid_spec(config, args.full_grid, args.confirm_full_grid)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn harness_params(config: &ExperimentConfig, args: &HarnessArgs) -> Result<(usize, u64), Failure> {
    let runs = if args.paper_scale {
        1000
    } else {
        args.runs.unwrap_or(config.harness.runs)
    };
    if runs == 0 {
        return Err(validation("-M must be at least 1"));
    }
    Ok((runs, args.master_seed.unwrap_or(config.harness.master_seed)))
}

fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    let mut r = resolve(&args.scenario)?;
    if let Some(seed) = args.seed {
        r.scenario.seed = seed;
    }
    if args.scenario.print_preset {
        return print_scenario(&r.scenario);
    }
    let obs = synthesize_bearings(&r.scenario, &mut ChaCha8Rng::seed_from_u64(r.scenario.seed))?;
    output::write_track(&obs.observer, create(&r.out, "observer_track.csv")?)?;
    output::write_track(&obs.target, create(&r.out, "target_track.csv")?)?;
    output::write_bearings(&obs.clean, &obs.noisy, create(&r.out, "bearings.csv")?)?;
    create(&r.out, "scenario.toml")?.write_all(presets::scenario_to_toml(&r.scenario)?.as_bytes())?;
    println!("wrote {} samples to {}", obs.clean.len(), r.out.display());
    Ok(())
}

fn print_estimate(kind: SolverKind, r: f64, c: f64, s: f64, cost: f64, fevals: u64) {
    println!("{:<6} {:>12} {:>10} {:>8} {:>12} {:>10}", "solver", "R(m)", "C(deg)", "S(m/s)", "cost", "fevals");
    println!("{:<6} {:>12.3} {:>10.3} {:>8.3} {:>12.6} {:>10}", kind.to_string(), r, c, s, cost, fevals);
}

fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let r = resolve(&args.scenario)?;
    if args.scenario.print_preset {
        return print_scenario(&r.scenario);
    }
    let mut cfg = solver_config(&r.config, &args.solver)?;
    let obs = synthesize_bearings(&r.scenario, &mut ChaCha8Rng::seed_from_u64(r.scenario.seed))?;
    let objective = BearingObjective::new(&obs.noisy, &obs.observer)?;

    let report = match &mut cfg {
        SolverConfig::Ga(c) => {
            let seed = args.seed.unwrap_or(c.seed);
            let rep = ga::run_tmaga(&objective, c, &mut ChaCha8Rng::seed_from_u64(seed))?;
            output::write_ga_report(&rep, c, create(&r.out, "ga_inner_runs.csv")?)?;
            botma_core::SolverReport {
                kind: SolverKind::Ga,
                estimate: rep.solution.to_range_form(objective.observer_start()),
                cost: rep.best_cost,
                fevals: rep.fevals,
            }
        }
        SolverConfig::Cma(c) => {
            c.trace |= args.trace;
            let seed = args.seed.unwrap_or(c.seed);
            let rep = cma::run_cma(&objective, c, &mut ChaCha8Rng::seed_from_u64(seed))?;
            if c.trace {
                output::write_cma_trace(&rep.trace, create(&r.out, "cma_trace.csv")?)?;
            }
            botma_core::SolverReport {
                kind: SolverKind::Cma,
                estimate: rep.best,
                cost: rep.best_cost,
                fevals: rep.fevals,
            }
        }
        SolverConfig::Grid(spec) => {
            if args.dump_volume {
                if grid_cell_count(spec)? >= MAX_DUMP_CELLS {
                    return Err(validation(format!("--dump-volume needs a grid under {MAX_DUMP_CELLS} cells")));
                }
                write_cost_volume(&objective, spec, create(&r.out, "cost_volume.csv")?)?;
            }
            let rep = botma_core::grid::grid_search(&objective, spec)?;
            botma_core::SolverReport {
                kind: SolverKind::Grid,
                estimate: rep.best,
                cost: rep.best_cost,
                fevals: rep.fevals,
            }
        }
    };
    output::write_solver_report(&report, create(&r.out, "solve_report.csv")?)?;
    let e = report.estimate;
    print_estimate(report.kind, e.r0, e.course, e.speed, report.cost, report.fevals);
    Ok(())
}

fn print_summary(label: &str, s: &MonteCarloSummary) {
    println!(
        "{label}  noise={}  runs={}  total fevals={}",
        s.noise_sigma, s.runs, s.total_fevals
    );
    println!("  {:<8} {:>12} {:>10} {:>8}", "", "R(m)", "C(deg)", "S(m/s)");
    println!("  {:<8} {:>12.3} {:>10.3} {:>8.3}", "truth", s.truth.r0, s.truth.course, s.truth.speed);
    let [r, c, sp] = s.stats();
    println!("  {:<8} {:>12.3} {:>10.3} {:>8.3}", "mu", r.mean, c.mean, sp.mean);
    println!("  {:<8} {:>12.3} {:>10.3} {:>8.3}", "sigma", r.std, c.std, sp.std);
    println!("  {:<8} {:>12.3} {:>10.3} {:>8.3}", "|Dev|", r.abs_dev, c.abs_dev, sp.abs_dev);
}

fn enforce(thresholds: Option<&Thresholds>, violations: impl FnOnce(&Thresholds) -> Vec<String>) -> CmdResult {
    let Some(t) = thresholds else { return Ok(()) };
    let v = violations(t);
    if v.is_empty() {
        return Ok(());
    }
    for line in &v {
        eprintln!("threshold violated: {line}");
    }
    Err(validation(format!("{} threshold violation(s)", v.len())))
}

fn cmd_mc(args: &McArgs) -> CmdResult {
    let r = resolve(&args.scenario)?;
    if args.scenario.print_preset {
        return print_scenario(&r.scenario);
    }
    let cfg = solver_config(&r.config, &args.solver)?;
    let (runs, seed) = harness_params(&r.config, &args.harness)?;
    let summary = harness::run_monte_carlo(&cfg, &r.scenario, runs, seed)?;
    let label = cfg.kind().to_string();
    output::write_run_records(&summary.records, create(&r.out, "mc_runs.csv")?)?;
    output::write_summary(&label, &summary, create(&r.out, "mc_summary.csv")?)?;
    print_summary(&label, &summary);
    enforce(r.config.harness.thresholds.as_ref(), |t| t.check_summary(&summary))
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let r = resolve(&args.scenario)?;
    if args.scenario.print_preset {
        return print_scenario(&r.scenario);
    }
    let cfg = solver_config(&r.config, &args.solver)?;
    let (runs, seed) = harness_params(&r.config, &args.harness)?;
    let sigmas = args.sigmas.clone().unwrap_or_else(|| r.config.harness.sigmas.clone());
    let sweep = harness::noise_sweep(&cfg, &r.scenario, &sigmas, runs, seed)?;
    let label = cfg.kind().to_string();
    output::write_sweep(&label, &sweep, create(&r.out, "sweep_summary.csv")?)?;
    for (_, s) in &sweep.rows {
        print_summary(&label, s);
    }
    enforce(r.config.harness.thresholds.as_ref(), |t| t.check_sweep(&sweep))
}

fn cmd_compare(args: &CompareArgs) -> CmdResult {
    let r = resolve(&args.scenario)?;
    if args.scenario.print_preset {
        return print_scenario(&r.scenario);
    }
    let (runs, seed) = harness_params(&r.config, &args.harness)?;
    let mut configs = Vec::new();
    for name in &args.solvers {
        let solver_args = SolverArgs {
            solver: Some(name.clone()),
            full_grid: args.full_grid,
            confirm_full_grid: args.confirm_full_grid,
        };
        let cfg = solver_config(&r.config, &solver_args)?;
        configs.push((cfg.kind().to_string(), cfg));
    }
    let cmp = harness::compare_solvers(&r.scenario, &configs, runs, seed)?;
    output::write_comparison(&cmp, create(&r.out, "compare_summary.csv")?)?;
    for row in &cmp.rows {
        print_summary(&row.label, &row.summary);
    }
    println!("{:<8} {:>14}", "solver", "fevals/run");
    for row in &cmp.rows {
        println!("{:<8} {:>14.1}", row.label, row.fevals_per_run());
    }
    let base = &cmp.rows[0];
    for row in &cmp.rows[1..] {
        if let Some(ratio) = cmp.feval_ratio(&row.label, &base.label) {
            println!("fevals {} / {} = {:.3}", row.label, base.label, ratio);
        }
    }
    Ok(())
}

fn cmd_preset(name: Option<&str>) -> CmdResult {
    match name {
        Some(n) => print_scenario(&presets::preset(n)?),
        None => {
            for n in presets::preset_names() {
                let s = presets::preset(n)?;
                println!(
                    "{n}  R={} C={} S={} noise={}",
                    s.truth.r0, s.truth.course, s.truth.speed, s.noise_sigma
                );
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(validation("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Runtime(e.into()))?;
    }
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Preset { name } => cmd_preset(name.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
