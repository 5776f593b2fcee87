use std::path::PathBuf;

/// Errors produced by the estimation pipeline and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("scale parameter must be positive and finite, got {0}")]
    NonPositiveScale(f64),

    #[error("parameter `{name}` is not finite: {value}")]
    NonFiniteParam { name: &'static str, value: f64 },

    #[error("probability must lie in the open interval (0,1), got {0}")]
    ProbabilityOutOfRange(f64),

    #[error("block count multiplier must be at least 1, got {0}")]
    InvalidBlockMultiplier(usize),

    #[error("empty series")]
    EmptySeries,

    #[error("order r={r} exceeds block size s={s}")]
    OrderExceedsBlockSize { r: usize, s: usize },

    #[error("series of length {n} is shorter than one block of size {s}")]
    SeriesShorterThanBlock { n: usize, s: usize },

    #[error("block vector is not sorted in descending order at position {index}")]
    NotDescending { index: usize },

    #[error("non-finite observation at position {index}")]
    NonFiniteObservation { index: usize },

    #[error("initialization requires at least 2 blocks, got {0}")]
    TooFewBlocks(usize),

    #[error("initial parameters are infeasible for the data")]
    InfeasibleInit,

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),

    #[error("column index {index} out of range for row {row}")]
    ColumnOutOfRange { index: usize, row: usize },

    #[error("unparseable numeric cell `{value}` at row {row}")]
    BadCell { row: usize, value: String },

    #[error("cannot read `{path}`: {source}")]
    FileRead {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
