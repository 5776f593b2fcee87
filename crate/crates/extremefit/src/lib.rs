//! Extreme value estimation from time series.
//!
//! The pipeline: split a series into fixed-size blocks, keep the `r`
//! largest observations per block ([`rlos`]), maximize the joint
//! likelihood of those order statistics under the generalized extreme
//! value (GEV) distribution ([`gev`], [`optim`]), and optionally wrap
//! the whole estimator in a permutation bootstrap that re-estimates on
//! shuffled copies of the series and aggregates by the median
//! ([`bootstrap`]). The [`harness`] module runs simulation studies
//! against distributions with known extreme value index ([`samplers`])
//! and grouped-permutation analyses of real series, reporting median
//! absolute deviations and quartile summaries. [`io`] handles CSV
//! ingestion, experiment configuration, and report emission for the
//! `extremefit` CLI.

pub mod bootstrap;
pub mod cli;
pub mod error;
pub mod gev;
pub mod harness;
pub mod io;
pub mod optim;
pub mod rlos;
pub mod samplers;
pub mod seed;
pub mod stats;

pub use error::Error;
pub use gev::GevParams;
pub use optim::{FitResult, OptimizerSettings};
pub use rlos::BlockTopR;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
