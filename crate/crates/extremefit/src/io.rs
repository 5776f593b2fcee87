//! CSV ingestion of real series, experiment configuration (flat
//! key-value files plus named presets), and machine-readable report
//! emission. CSV values are written with 9 significant digits, which
//! exceeds every tolerance used elsewhere while keeping files
//! diffable.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bootstrap::Aggregate;
use crate::harness::{ExperimentConfig, MadReport, QuartileSummary};
use crate::optim::OptimizerSettings;
use crate::samplers::SourceDistribution;
use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "EXTREMEFIT_OUT";

/// A real observation series loaded from CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSeries {
    pub values: Vec<f64>,
    pub label: String,
    pub source_path: String,
}

/// CSV column addressed by header name or zero-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

/// Loads one numeric column of a CSV file as a series, in file order.
pub fn load_series(path: &Path, column: &ColumnSelector, header: bool) -> Result<RealSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::FileRead {
                path: path.to_path_buf(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => Error::Csv(e),
        })?;

    let (index, label) = match column {
        ColumnSelector::Index(i) => (*i, format!("column {i}")),
        ColumnSelector::Name(name) => {
            if !header {
                return Err(Error::Config(
                    "column names require a header row; use a numeric index instead".into(),
                ));
            }
            let headers = reader.headers()?.clone();
            let idx = headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.clone()))?;
            (idx, name.clone())
        }
    };

    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let row_number = row + 1 + usize::from(header);
        let cell = record
            .get(index)
            .ok_or(Error::ColumnOutOfRange {
                index,
                row: row_number,
            })?
            .trim();
        let value: f64 = cell.parse().map_err(|_| Error::BadCell {
            row: row_number,
            value: cell.to_string(),
        })?;
        if !value.is_finite() {
            return Err(Error::NonFiniteObservation { index: row });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }

    Ok(RealSeries {
        values,
        label,
        source_path: path.display().to_string(),
    })
}

// ---------------------------------------------------------------------------
// Configuration files and presets
// ---------------------------------------------------------------------------

/// Parses a flat `key = value` configuration file. `#` starts a
/// comment; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut family: Option<String> = None;
    let mut kappa = None;
    let mut degrees_of_freedom = None;
    let mut shape = None;
    let mut scale = None;

    let mut config = ExperimentConfig {
        dist: None,
        n: 365 * 20,
        block_size: 365,
        r_values: vec![1],
        permutations: 50,
        repetitions: 1,
        p_values: vec![],
        use_permutations: true,
        aggregate: Aggregate::Median,
        master_seed: 0,
        optimizer: OptimizerSettings::default(),
        identity_permutation: false,
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("line {}: bad {what}: `{value}`", lineno + 1));
        match key {
            "dist" => family = Some(value.to_string()),
            "kappa" => kappa = Some(value.parse::<f64>().map_err(|_| bad("kappa"))?),
            "degrees_of_freedom" => {
                degrees_of_freedom =
                    Some(value.parse::<f64>().map_err(|_| bad("degrees_of_freedom"))?)
            }
            "shape" => shape = Some(value.parse::<f64>().map_err(|_| bad("shape"))?),
            "scale" => scale = Some(value.parse::<f64>().map_err(|_| bad("scale"))?),
            "n" => config.n = value.parse().map_err(|_| bad("n"))?,
            "block_size" => config.block_size = value.parse().map_err(|_| bad("block_size"))?,
            "r_values" => config.r_values = parse_r_values(value).ok_or_else(|| bad("r_values"))?,
            "permutations" => {
                config.permutations = value.parse().map_err(|_| bad("permutations"))?
            }
            "repetitions" => config.repetitions = value.parse().map_err(|_| bad("repetitions"))?,
            "p_values" => {
                config.p_values = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("p_values"))?
            }
            "use_permutations" => {
                config.use_permutations = value.parse().map_err(|_| bad("use_permutations"))?
            }
            "aggregate" => {
                config.aggregate = match value {
                    "median" => Aggregate::Median,
                    "mean" => Aggregate::Mean,
                    _ => return Err(bad("aggregate")),
                }
            }
            "master_seed" => config.master_seed = value.parse().map_err(|_| bad("master_seed"))?,
            "param_tol" => config.optimizer.param_tol = value.parse().map_err(|_| bad("param_tol"))?,
            "loglik_tol" => {
                config.optimizer.loglik_tol = value.parse().map_err(|_| bad("loglik_tol"))?
            }
            "max_iters" => config.optimizer.max_iters = value.parse().map_err(|_| bad("max_iters"))?,
            _ => return Err(Error::Config(format!("line {}: unknown key `{key}`", lineno + 1))),
        }
    }

    config.dist = match family.as_deref() {
        None | Some("real") => None,
        Some("pareto") => Some(SourceDistribution::pareto(
            kappa.ok_or_else(|| Error::Config("pareto requires kappa".into()))?,
        )?),
        Some("student_t") => Some(SourceDistribution::student_t(degrees_of_freedom.ok_or_else(
            || Error::Config("student_t requires degrees_of_freedom".into()),
        )?)?),
        Some("inverse_gamma") => Some(SourceDistribution::inverse_gamma(
            shape.ok_or_else(|| Error::Config("inverse_gamma requires shape".into()))?,
            scale.ok_or_else(|| Error::Config("inverse_gamma requires scale".into()))?,
        )?),
        Some(other) => {
            return Err(Error::Config(format!("unknown distribution `{other}`")))
        }
    };
    if config.p_values.is_empty() {
        config.p_values = vec![1.0 - 1.0 / config.n as f64];
    }
    config.validate()?;
    Ok(config)
}

/// `1,2,3` or `1..10` (inclusive).
pub fn parse_r_values(value: &str) -> Option<Vec<usize>> {
    if let Some((lo, hi)) = value.split_once("..") {
        let lo: usize = lo.trim().parse().ok()?;
        let hi: usize = hi.trim().parse().ok()?;
        if lo == 0 || hi < lo {
            return None;
        }
        return Some((lo..=hi).collect());
    }
    let parsed: Option<Vec<usize>> = value.split(',').map(|v| v.trim().parse().ok()).collect();
    parsed.filter(|v: &Vec<usize>| !v.is_empty() && v.iter().all(|&r| r > 0))
}

/// Loads a config file from disk.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::FileRead {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Named experiment presets. Desk-scale presets (n = 365·20, N' = 50,
/// B = 10) finish in minutes; `paper-*` presets use the full study
/// scale (n = 365·100, N' = 1000, B = 50) and run for a long time.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let (dist, desk) = match name {
        "desk-pareto-02" => (SourceDistribution::pareto(0.2)?, true),
        "desk-pareto-05" => (SourceDistribution::pareto(0.5)?, true),
        "desk-pareto-08" => (SourceDistribution::pareto(0.8)?, true),
        "desk-student-t" => (SourceDistribution::student_t(5.0)?, true),
        "desk-inverse-gamma" => (SourceDistribution::inverse_gamma(5.0, 1.0)?, true),
        "paper-pareto-02" => (SourceDistribution::pareto(0.2)?, false),
        "paper-pareto-05" => (SourceDistribution::pareto(0.5)?, false),
        "paper-pareto-08" => (SourceDistribution::pareto(0.8)?, false),
        "paper-student-t" => (SourceDistribution::student_t(5.0)?, false),
        "paper-inverse-gamma" => (SourceDistribution::inverse_gamma(5.0, 1.0)?, false),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    let (n, repetitions, permutations) = if desk {
        (365 * 20, 50, 10)
    } else {
        (365 * 100, 1000, 50)
    };
    let n_f = n as f64;
    // the second probability mirrors the study's extra quantile run
    let p_values = if matches!(dist, SourceDistribution::Pareto { kappa } if kappa == 0.2) {
        vec![1.0 - 1.0 / n_f, 1.0 - 1.0 / (3.0 * n_f)]
    } else {
        vec![1.0 - 1.0 / n_f]
    };
    Ok(ExperimentConfig {
        dist: Some(dist),
        n,
        block_size: 365,
        r_values: (1..=10).collect(),
        permutations,
        repetitions,
        p_values,
        use_permutations: true,
        aggregate: Aggregate::Median,
        master_seed: 0,
        optimizer: OptimizerSettings::default(),
        identity_permutation: false,
    })
}

/// All preset names, for `--help` and error messages.
pub const PRESET_NAMES: &[&str] = &[
    "desk-pareto-02",
    "desk-pareto-05",
    "desk-pareto-08",
    "desk-student-t",
    "desk-inverse-gamma",
    "paper-pareto-02",
    "paper-pareto-05",
    "paper-pareto-08",
    "paper-student-t",
    "paper-inverse-gamma",
];

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

/// Fixed header of all result CSVs. MAD rows leave the quartile
/// columns empty and vice versa; xi rows leave `p` empty.
pub const CSV_HEADER: &str =
    "experiment_id,r,p,metric,mad,q1,median,q3,effective_count,total,flagged,seed";

/// 9 significant digits, locale-independent.
pub fn format_sig(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt_sig(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

/// Renders a [`MadReport`] using the fixed CSV schema.
pub fn mad_report_csv(report: &MadReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for cell in &report.cells {
        writeln!(
            out,
            "{},{},{},{},{},,,,{},{},{},{}",
            report.experiment_id,
            cell.r,
            opt_sig(cell.p),
            cell.metric.as_str(),
            format_sig(cell.mad),
            cell.effective,
            cell.total,
            cell.flagged,
            report.master_seed,
        )
        .unwrap();
    }
    out
}

/// Renders a [`QuartileSummary`] using the fixed CSV schema.
pub fn quartile_summary_csv(summary: &QuartileSummary) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for cell in &summary.cells {
        writeln!(
            out,
            "{},{},{},{},,{},{},{},{},{},,{}",
            summary.experiment_id,
            cell.r,
            opt_sig(cell.p),
            cell.metric.as_str(),
            format_sig(cell.q1),
            format_sig(cell.median),
            format_sig(cell.q3),
            cell.effective,
            cell.total,
            summary.master_seed,
        )
        .unwrap();
    }
    out
}

/// Writes `contents` under `dir`, creating the directory as needed,
/// and returns the full path.
pub fn write_output(dir: &Path, file_name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(file_name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// Serializes any report to pretty JSON.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}
