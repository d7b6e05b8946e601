//! The `outbreak` command line: `run`, `sweep`, `calibrate` and `report`.
//!
//! Exit codes: 0 success, 1 simulation failure, 2 configuration error,
//! 3 I/O error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::{
    effective_r_series, estimate_beta, expected_infectious_duration, pooled_early_window_mean,
    ReproductionSeries,
};
use crate::config::ScenarioConfig;
use crate::engine::{run_replicates, Execution, ReplicateSet};
use crate::error::SimError;
use crate::output::{self, OutputError};
use crate::sweep::{run_sweep, ComparisonReport, ScenarioStats, SweepError, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "outbreak", version, about = "Agent-based epidemic simulation with testing, isolation and vaccination")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run replicates of one scenario.
    Run(RunArgs),
    /// Run every cell of a scenario grid and write a comparison report.
    Sweep(SweepArgs),
    /// Estimate β for a target R0.
    Calibrate(CalibrateArgs),
    /// Recompute a sweep report from its run CSVs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Jobs {
    /// Worker threads; 1 runs replicates sequentially. Defaults to all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario config (JSON). Omitted keys take default values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `baseSeed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep spec (JSON) with `base`, `axes` and `replicates`.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `outDir` in the spec.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "target-r0")]
    pub target_r0: f64,
    /// Also simulate with the estimated β and report the early-window R_t.
    #[arg(long)]
    pub validate: bool,
    #[arg(long, default_value_t = 20)]
    pub runs: u64,
    /// Writes `calibration.json`, `calibration.csv` and, with
    /// `--validate`, the per-run `r_t.csv` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory written by `sweep`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("simulation failed: {0}")]
    Simulation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Simulation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(_)
            | SimError::InvalidDistribution(_)
            | SimError::UnsupportedDistribution { .. }
            | SimError::NonPositiveTarget(_)
            | SimError::Degenerate(_)
            | SimError::EmptyPopulation => CliError::Config(e.to_string()),
            SimError::Inconsistency { .. } => CliError::Simulation(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Sim(s) => s.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Calibrate(a) => cmd_calibrate(&a),
        Command::Report(a) => cmd_report(&a),
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    let config = match path {
        Some(p) => ScenarioConfig::from_json(&read_to_string(p)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => ScenarioConfig::default(),
    };
    config.ensure_valid()?;
    Ok(config)
}

fn create_file(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create_file(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path, e))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

fn output_err(path: &Path, e: OutputError) -> CliError {
    CliError::io(path, e)
}

/// Runs `f` on a pool of `jobs` threads, or sequentially for `jobs == 1`.
fn with_jobs<T>(jobs: &Jobs, f: impl FnOnce(Execution) -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    match jobs.jobs {
        Some(0) => Err(CliError::Config("--jobs must be at least 1".into())),
        Some(1) => Ok(f(Execution::Sequential)),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Simulation(e.to_string()))?;
            Ok(pool.install(|| f(Execution::Parallel)))
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(f(Execution::Sequential)),
        None => Ok(f(Execution::Parallel)),
    }
}

/// Writes `run_NNN.csv`, `summary_NNN.json`, `aggregate.csv` and the
/// resolved `config.json` into `dir`.
pub fn write_replicates(dir: &Path, config: &ScenarioConfig, set: &ReplicateSet) -> Result<(), CliError> {
    create_dir(dir)?;
    write_json(&dir.join("config.json"), config)?;
    for run in &set.runs {
        let idx = run.summary.run_index;
        let csv_path = dir.join(format!("run_{idx:03}.csv"));
        output::write_run_csv(create_file(&csv_path)?, &run.records).map_err(|e| output_err(&csv_path, e))?;
        write_json(&dir.join(format!("summary_{idx:03}.json")), &run.summary)?;
    }
    let agg_path = dir.join("aggregate.csv");
    output::write_aggregate_csv(create_file(&agg_path)?, &set.aggregate).map_err(|e| output_err(&agg_path, e))
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    if args.runs == 0 {
        return Err(CliError::Config("--runs must be at least 1".into()));
    }
    let set = with_jobs(&args.jobs, |ex| run_replicates(&config, args.runs, ex))??;
    write_replicates(&args.out, &config, &set)?;
    let label = format!("{} run(s)", args.runs);
    let outcomes: Vec<_> = set.summaries().map(Into::into).collect();
    print_stats(&[ScenarioStats::from_outcomes(&label, &outcomes)]);
    println!("wrote {}", args.out.display());
    Ok(())
}

/// Maps a scenario label to a directory name.
pub fn cell_dir_name(index: usize, label: &str) -> String {
    let slug: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    format!("{index:03}_{slug}")
}

/// Index of a sweep output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepIndex {
    pub cells: Vec<SweepIndexEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepIndexEntry {
    pub label: String,
    pub dir: String,
}

fn write_report(dir: &Path, report: &ComparisonReport) -> Result<(), CliError> {
    let csv_path = dir.join("report.csv");
    output::write_report_csv(create_file(&csv_path)?, report).map_err(|e| output_err(&csv_path, e))?;
    write_json(&dir.join("report.json"), report)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let spec: SweepSpec = serde_json::from_str(&read_to_string(&args.config)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let out = args
        .out
        .clone()
        .or_else(|| spec.out_dir.clone())
        .ok_or_else(|| CliError::Config("no output directory: pass --out or set outDir".into()))?;
    // fail on bad cells before any simulation
    spec.expand()?;
    let results = with_jobs(&args.jobs, |ex| run_sweep(&spec, ex))??;
    create_dir(&out)?;
    let mut index = SweepIndex { cells: Vec::new() };
    for (i, r) in results.iter().enumerate() {
        let dir = cell_dir_name(i, &r.cell.label);
        write_replicates(&out.join(&dir), &r.cell.config, &r.replicates)?;
        index.cells.push(SweepIndexEntry { label: r.cell.label.clone(), dir });
    }
    write_json(&out.join("cells.json"), &index)?;
    let report = ComparisonReport::from_results(&results);
    write_report(&out, &report)?;
    print_stats(&report.scenarios);
    println!("wrote {}", out.display());
    Ok(())
}

/// Rebuilds the comparison report of a sweep directory from its run CSVs.
pub fn recompute_report(dir: &Path) -> Result<ComparisonReport, CliError> {
    let index_path = dir.join("cells.json");
    let index: SweepIndex = serde_json::from_str(&read_to_string(&index_path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", index_path.display())))?;
    let mut scenarios = Vec::with_capacity(index.cells.len());
    for entry in &index.cells {
        let cell_dir = dir.join(&entry.dir);
        let mut files: Vec<PathBuf> = fs::read_dir(&cell_dir)
            .map_err(|e| CliError::io(&cell_dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("run_") && n.ends_with(".csv"))
            })
            .collect();
        files.sort();
        let mut outcomes = Vec::with_capacity(files.len());
        for f in &files {
            let file = File::open(f).map_err(|e| CliError::io(f, e))?;
            let records = output::read_run_csv(file).map_err(|e| output_err(f, e))?;
            outcomes.push(
                output::outcome_from_records(&records)
                    .ok_or_else(|| CliError::Io(format!("{}: no rows", f.display())))?,
            );
        }
        if outcomes.is_empty() {
            return Err(CliError::Io(format!("{}: no run CSVs", cell_dir.display())));
        }
        scenarios.push(ScenarioStats::from_outcomes(&entry.label, &outcomes));
    }
    Ok(ComparisonReport { scenarios })
}

pub fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let report = recompute_report(&args.out)?;
    write_report(&args.out, &report)?;
    print_stats(&report.scenarios);
    Ok(())
}

/// Result of `calibrate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub target_r0: f64,
    pub tau_i: f64,
    pub beta: f64,
    /// Mean R_t over the early-window days of all validation runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub early_window_r_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation_runs: Option<u64>,
    /// One series per validation run.
    #[serde(skip)]
    pub series: Vec<ReproductionSeries>,
}

pub fn calibrate(
    config: &ScenarioConfig,
    target_r0: f64,
    validate_runs: Option<u64>,
    execution: Execution,
) -> Result<Calibration, SimError> {
    let tau_i = expected_infectious_duration(config)?;
    let beta = estimate_beta(target_r0, config)?;
    let mut cal = Calibration { target_r0, tau_i, beta, early_window_r_t: None, validation_runs: None, series: Vec::new() };
    if let Some(n) = validate_runs {
        let cfg = ScenarioConfig { beta_daily: beta, ..config.clone() };
        let set = run_replicates(&cfg, n, execution)?;
        cal.series = set.runs.iter().map(|r| effective_r_series(&r.records, tau_i)).collect();
        cal.early_window_r_t = pooled_early_window_mean(&cal.series);
        cal.validation_runs = Some(n);
    }
    Ok(cal)
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> Result<(), CliError> {
    let config = load_config(args.config.as_deref())?;
    let runs = args.validate.then_some(args.runs);
    if runs == Some(0) {
        return Err(CliError::Config("--runs must be at least 1".into()));
    }
    let cal = with_jobs(&args.jobs, |ex| calibrate(&config, args.target_r0, runs, ex))??;
    println!("tau_I = {}", cal.tau_i);
    println!("beta  = {}", cal.beta);
    if let Some(n) = cal.validation_runs {
        match cal.early_window_r_t {
            Some(r) => println!("early-window R_t over {n} run(s) = {r:.3}"),
            None => println!("no early-window days in {n} run(s)"),
        }
    }
    if let Some(dir) = &args.out {
        create_dir(dir)?;
        write_json(&dir.join("calibration.json"), &cal)?;
        let path = dir.join("calibration.csv");
        output::write_calibration_csv(create_file(&path)?, &cal).map_err(|e| output_err(&path, e))?;
        if !cal.series.is_empty() {
            let path = dir.join("r_t.csv");
            output::write_r_series_csv(create_file(&path)?, &cal.series).map_err(|e| output_err(&path, e))?;
        }
    }
    Ok(())
}

fn print_stats(stats: &[ScenarioStats]) {
    let width = stats.iter().map(|s| s.label.len()).max().unwrap_or(0).max(8);
    println!(
        "{:width$}  {:>5}  {:>18}  {:>16}  {:>14}  {:>10}",
        "scenario", "runs", "infections", "false isol.", "cost/pers/day", "tests"
    );
    for s in stats {
        println!(
            "{:width$}  {:>5}  {:>9.1} ± {:<6.1}  {:>7.1} ± {:<6.1}  {:>14.4}  {:>10.0}",
            s.label,
            s.replicates,
            s.total_infections_mean,
            s.total_infections_std,
            s.false_isolations_mean,
            s.false_isolations_std,
            s.cost_per_person_per_day_mean,
            s.total_tests_mean,
        );
    }
}
