//! Command-line front end: `simulate`, `analyze` and `fit`
//! subcommands, each emitting CSV and JSON reports to an output
//! directory.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::bootstrap::{pb_fit, PbSettings};
use crate::harness::{run_real_data, run_simulation};
use crate::io::{
    self, load_config, load_series, preset, ColumnSelector, OUT_DIR_ENV, PRESET_NAMES,
};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "extremefit",
    about = "GEV estimation via block maxima, r largest order statistics and permutation bootstrapping"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation study and emit a MAD report.
    Simulate(SimulateArgs),
    /// Grouped-permutation analysis of a real series; emits quartile summaries.
    Analyze(AnalyzeArgs),
    /// Single-series fit (plain or permutation-bootstrapped).
    Fit(FitArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Named preset (desk-* or paper-*).
    #[arg(long, conflicts_with = "config",
          value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    preset: Option<String>,
    /// Configuration file (flat key = value format).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input CSV file with the real series.
    #[arg(long)]
    input: PathBuf,
    /// Column name or zero-based index.
    #[arg(long, default_value = "0")]
    column: ColumnSelector,
    /// Input file has no header row.
    #[arg(long)]
    no_header: bool,
    #[arg(long, default_value_t = 365)]
    block: usize,
    /// Orders to estimate at, e.g. `1,3,5` or `1..10`.
    #[arg(long, default_value = "1..10", value_parser = parse_r_list)]
    r_values: std::vec::Vec<usize>,
    /// Permutations per group (B).
    #[arg(long, default_value_t = 50)]
    permutations: usize,
    /// Number of permutation groups (N').
    #[arg(long, default_value_t = 100)]
    groups: usize,
    /// Probabilities for extreme-quantile estimation; defaults to
    /// 1 - 1/(365*100).
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "0")]
    column: ColumnSelector,
    #[arg(long)]
    no_header: bool,
    #[arg(long, default_value_t = 365)]
    block: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Permutations; 0 runs a single plain fit.
    #[arg(long, default_value_t = 50)]
    permutations: usize,
    #[arg(long, default_value_t = 1.0 - 1.0 / 36_500.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_r_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    io::parse_r_values(s).ok_or_else(|| format!("bad r list `{s}`"))
}

/// Runs the CLI on explicit arguments and returns the process exit
/// status: 0 on success, 1 on runtime failure, 2 on usage errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Analyze(args) => analyze(args),
        Command::Fit(args) => fit(args),
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut config = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => load_config(path)?,
        _ => {
            return Err(Error::Config(
                "exactly one of --preset or --config is required".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let report = run_simulation(&config)?;
    let dir = out_dir(args.out);
    let csv_path = io::write_output(&dir, "mad_report.csv", &io::mad_report_csv(&report))?;
    let json_path = io::write_output(&dir, "mad_report.json", &io::to_json(&report)?)?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let series = load_series(&args.input, &args.column, !args.no_header)?;
    let p_values = if args.p.is_empty() {
        vec![1.0 - 1.0 / 36_500.0]
    } else {
        args.p.clone()
    };
    let config = crate::harness::ExperimentConfig {
        dist: None,
        n: series.values.len(),
        block_size: args.block,
        r_values: args.r_values.clone(),
        permutations: args.permutations,
        repetitions: args.groups,
        p_values,
        use_permutations: true,
        aggregate: crate::bootstrap::Aggregate::Median,
        master_seed: args.seed,
        optimizer: Default::default(),
        identity_permutation: false,
    };
    let summary = run_real_data(&config, &series.values)?;
    let dir = out_dir(args.out);
    let csv_path = io::write_output(
        &dir,
        "quartile_summary.csv",
        &io::quartile_summary_csv(&summary),
    )?;
    let json_path = io::write_output(&dir, "quartile_summary.json", &io::to_json(&summary)?)?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

#[derive(serde::Serialize)]
struct FitReport<'a> {
    input: &'a str,
    column: String,
    block_size: usize,
    r: usize,
    permutations: usize,
    p: f64,
    seed: u64,
    estimate: crate::bootstrap::PbEstimate,
}

fn fit(args: FitArgs) -> Result<()> {
    let series = load_series(&args.input, &args.column, !args.no_header)?;
    let settings = PbSettings {
        permutations: args.permutations.max(1),
        identity_permutation: args.permutations == 0,
        ..Default::default()
    };
    let estimate = pb_fit(
        &series.values,
        args.block,
        args.r,
        args.p,
        args.seed,
        &settings,
        &Default::default(),
    )?;
    let report = FitReport {
        input: &series.source_path,
        column: series.label.clone(),
        block_size: args.block,
        r: args.r,
        permutations: settings.permutations,
        p: args.p,
        seed: args.seed,
        estimate,
    };
    let dir = out_dir(args.out);
    let json_path = io::write_output(&dir, "fit.json", &io::to_json(&report)?)?;
    println!("wrote {}", json_path.display());
    Ok(())
}
