//! Experiment orchestration: the simulation study (repeated sampling
//! from a known distribution, MAD of the estimates against the true
//! extreme value index and extreme quantile) and the grouped-
//! permutation analysis of a single real series (quartile summaries
//! across groups of permutations).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, InverseGamma, StudentsT};

use crate::bootstrap::{pb_fit, Aggregate, PbSettings};
use crate::gev::extreme_quantile;
use crate::optim::{fit_gev, OptimizerSettings};
use crate::rlos::extract_top_r;
use crate::samplers::{sample, SourceDistribution};
use crate::seed::{derive, rng_for};
use crate::stats::{median, quartiles};
use crate::{Error, Result};

/// A cell with fewer than this fraction of effective replicates is
/// flagged in the output.
const EFFECTIVE_FRACTION_FLOOR: f64 = 0.8;

/// What a report cell measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Xi,
    Quantile,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Xi => "xi",
            Metric::Quantile => "quantile",
        }
    }
}

/// Full description of one simulation or real-data experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Source distribution for simulations; `None` marks a real-series
    /// experiment.
    pub dist: Option<SourceDistribution>,
    /// Series length n (per repetition, for simulations).
    pub n: usize,
    /// Block size s.
    pub block_size: usize,
    /// Orders r to estimate at.
    pub r_values: Vec<usize>,
    /// Permutations per bootstrap, B.
    pub permutations: usize,
    /// Repetitions N' (simulation) or permutation groups (real data).
    pub repetitions: usize,
    /// Probabilities for extreme-quantile estimation.
    pub p_values: Vec<f64>,
    /// When false, a single plain fit replaces the bootstrap.
    pub use_permutations: bool,
    pub aggregate: Aggregate,
    pub master_seed: u64,
    pub optimizer: OptimizerSettings,
    /// Test hook forwarded to the bootstrap; see
    /// [`PbSettings::identity_permutation`].
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub identity_permutation: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.r_values.is_empty() {
            return Err(Error::Config("r_values must be nonempty".into()));
        }
        let max_r = *self.r_values.iter().max().unwrap();
        if max_r == 0 || max_r > self.block_size {
            return Err(Error::Config(format!(
                "max r ({max_r}) must lie in 1..=block_size ({})",
                self.block_size
            )));
        }
        if self.block_size > self.n {
            return Err(Error::Config(format!(
                "block_size ({}) exceeds series length n ({})",
                self.block_size, self.n
            )));
        }
        for &p in &self.p_values {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::ProbabilityOutOfRange(p));
            }
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.use_permutations && self.permutations == 0 {
            return Err(Error::Config("permutations must be at least 1".into()));
        }
        Ok(())
    }

    fn pb_settings(&self) -> PbSettings {
        PbSettings {
            permutations: self.permutations,
            aggregate: self.aggregate,
            identity_permutation: self.identity_permutation,
        }
    }
}

/// One MAD value, with bookkeeping for dropped repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadCell {
    pub r: usize,
    /// Probability for quantile cells; absent for xi cells.
    pub p: Option<f64>,
    pub metric: Metric,
    pub mad: f64,
    pub effective: usize,
    pub total: usize,
    /// True when fewer than 80% of the repetitions produced an
    /// estimate.
    pub flagged: bool,
}

/// MAD of every configured (r, p, metric) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadReport {
    pub experiment_id: String,
    pub master_seed: u64,
    pub cells: Vec<MadCell>,
}

impl MadReport {
    pub fn cell(&self, r: usize, metric: Metric, p: Option<f64>) -> Option<&MadCell> {
        self.cells
            .iter()
            .find(|c| c.r == r && c.metric == metric && c.p == p)
    }
}

/// Quartiles of the group estimates for one (r, metric[, p]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuartileCell {
    pub r: usize,
    pub p: Option<f64>,
    pub metric: Metric,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub effective: usize,
    pub total: usize,
}

/// Quartile summary of a grouped-permutation real-data run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuartileSummary {
    pub experiment_id: String,
    pub master_seed: u64,
    pub cells: Vec<QuartileCell>,
}

impl QuartileSummary {
    pub fn cell(&self, r: usize, metric: Metric, p: Option<f64>) -> Option<&QuartileCell> {
        self.cells
            .iter()
            .find(|c| c.r == r && c.metric == metric && c.p == p)
    }
}

/// Median absolute deviation of `estimates` from `truth`.
pub fn mad(estimates: &[f64], truth: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::EmptySeries);
    }
    let deviations: Vec<f64> = estimates.iter().map(|&e| (e - truth).abs()).collect();
    Ok(median(&deviations))
}

/// True `p`-quantile of a source distribution. Pareto has the closed
/// form (1−p)^(−κ); Student's t and the inverse gamma are inverted by
/// bisection on reference CDFs to 1e−12.
pub fn true_quantile(dist: &SourceDistribution, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    match *dist {
        SourceDistribution::Pareto { kappa } => Ok((1.0 - p).powf(-kappa)),
        SourceDistribution::StudentT { degrees_of_freedom } => {
            let t = StudentsT::new(0.0, 1.0, degrees_of_freedom)
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(bisect_cdf(|x| t.cdf(x), p, -1.0, 1.0))
        }
        SourceDistribution::InverseGamma { shape, scale } => {
            let ig =
                InverseGamma::new(shape, scale).map_err(|e| Error::Config(e.to_string()))?;
            Ok(bisect_cdf(|x| ig.cdf(x), p, f64::MIN_POSITIVE, 1.0))
        }
    }
}

/// Reference CDF of a source distribution, for goodness-of-fit checks
/// against the samplers.
pub fn reference_cdf(dist: &SourceDistribution, x: f64) -> f64 {
    match *dist {
        SourceDistribution::Pareto { kappa } => {
            if x <= 1.0 {
                0.0
            } else {
                1.0 - x.powf(-1.0 / kappa)
            }
        }
        SourceDistribution::StudentT { degrees_of_freedom } => {
            StudentsT::new(0.0, 1.0, degrees_of_freedom).unwrap().cdf(x)
        }
        SourceDistribution::InverseGamma { shape, scale } => {
            InverseGamma::new(shape, scale).unwrap().cdf(x)
        }
    }
}

fn bisect_cdf<F: Fn(f64) -> f64>(cdf: F, p: f64, lo0: f64, hi0: f64) -> f64 {
    let mut lo = lo0;
    let mut hi = hi0;
    while cdf(hi) < p {
        hi *= 2.0;
    }
    while cdf(lo) > p {
        lo = if lo > 0.0 { lo / 2.0 } else { lo * 2.0 };
    }
    while hi - lo > 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Estimates produced by one repetition: ξ̂ and one q̂ per configured
/// probability, per order r. `None` marks a failed repetition.
type RepOutcome = Vec<Option<(f64, Vec<f64>)>>;

fn estimate_once(
    config: &ExperimentConfig,
    data: &[f64],
    pb_seed: u64,
) -> Result<RepOutcome> {
    let mut per_r = Vec::with_capacity(config.r_values.len());
    for &r in &config.r_values {
        let outcome = if config.use_permutations {
            match pb_fit(
                data,
                config.block_size,
                r,
                config.p_values.first().copied().unwrap_or(0.5),
                pb_seed,
                &config.pb_settings(),
                &config.optimizer,
            ) {
                Ok(est) => {
                    let mut qs = Vec::with_capacity(config.p_values.len());
                    for &p in &config.p_values {
                        qs.push(est.quantile_at(p, config.aggregate)?);
                    }
                    Some((est.params_median.xi(), qs))
                }
                Err(Error::EstimationFailed(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            let top = extract_top_r(data, config.block_size, r)?;
            let fit = fit_gev(&top, None, &config.optimizer)?;
            if fit.converged {
                let mut qs = Vec::with_capacity(config.p_values.len());
                for &p in &config.p_values {
                    qs.push(extreme_quantile(&fit.params, p, config.block_size)?);
                }
                Some((fit.params.xi(), qs))
            } else {
                None
            }
        };
        per_r.push(outcome);
    }
    Ok(per_r)
}

/// Runs the simulation study: `repetitions` fresh series from the
/// configured distribution, estimates at every configured r, MAD
/// against the true extreme value index and true extreme quantiles.
/// Fully determined by `master_seed`; repetitions run in parallel.
pub fn run_simulation(config: &ExperimentConfig) -> Result<MadReport> {
    config.validate()?;
    let dist = config
        .dist
        .as_ref()
        .ok_or_else(|| Error::Config("simulation requires a source distribution".into()))?;

    let truth_xi = dist.true_xi();
    let truth_q: Vec<f64> = config
        .p_values
        .iter()
        .map(|&p| true_quantile(dist, p))
        .collect::<Result<_>>()?;

    let outcomes: Vec<RepOutcome> = (0..config.repetitions as u64)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = derive(config.master_seed, rep);
            let data = sample(dist, config.n, &mut rng_for(rep_seed, 0));
            estimate_once(config, &data, derive(rep_seed, u64::MAX))
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (ri, &r) in config.r_values.iter().enumerate() {
        let xi_estimates: Vec<f64> = outcomes
            .iter()
            .filter_map(|rep| rep[ri].as_ref().map(|(xi, _)| *xi))
            .collect();
        cells.push(make_mad_cell(
            r,
            None,
            Metric::Xi,
            &xi_estimates,
            truth_xi,
            config.repetitions,
        )?);
        for (pi, &p) in config.p_values.iter().enumerate() {
            let q_estimates: Vec<f64> = outcomes
                .iter()
                .filter_map(|rep| rep[ri].as_ref().map(|(_, qs)| qs[pi]))
                .collect();
            cells.push(make_mad_cell(
                r,
                Some(p),
                Metric::Quantile,
                &q_estimates,
                truth_q[pi],
                config.repetitions,
            )?);
        }
    }

    Ok(MadReport {
        experiment_id: format!(
            "sim-{}-n{}-s{}-B{}-N{}",
            dist.label(),
            config.n,
            config.block_size,
            if config.use_permutations {
                config.permutations
            } else {
                0
            },
            config.repetitions
        ),
        master_seed: config.master_seed,
        cells,
    })
}

fn make_mad_cell(
    r: usize,
    p: Option<f64>,
    metric: Metric,
    estimates: &[f64],
    truth: f64,
    total: usize,
) -> Result<MadCell> {
    if estimates.is_empty() {
        return Err(Error::EstimationFailed(format!(
            "every repetition failed for r={r}, metric={}",
            metric.as_str()
        )));
    }
    let effective = estimates.len();
    Ok(MadCell {
        r,
        p,
        metric,
        mad: mad(estimates, truth)?,
        effective,
        total,
        flagged: (effective as f64) < EFFECTIVE_FRACTION_FLOOR * total as f64,
    })
}

/// Grouped-permutation analysis of a single real series: B·N'
/// permutations of the series, partitioned by seed into N' groups of
/// B, one bootstrap estimate per group, quartiles across groups.
pub fn run_real_data(config: &ExperimentConfig, series: &[f64]) -> Result<QuartileSummary> {
    config.validate()?;
    if series.len() < config.block_size {
        return Err(Error::SeriesShorterThanBlock {
            n: series.len(),
            s: config.block_size,
        });
    }

    // group g owns permutation indices gB..(g+1)B through its seed
    // substream; every r within a group sees the same shuffles
    let outcomes: Vec<RepOutcome> = (0..config.repetitions as u64)
        .into_par_iter()
        .map(|group| {
            let group_seed = derive(config.master_seed, group);
            let mut per_r = Vec::with_capacity(config.r_values.len());
            for &r in &config.r_values {
                match pb_fit(
                    series,
                    config.block_size,
                    r,
                    config.p_values.first().copied().unwrap_or(0.5),
                    group_seed,
                    &config.pb_settings(),
                    &config.optimizer,
                ) {
                    Ok(est) => {
                        let mut qs = Vec::with_capacity(config.p_values.len());
                        for &p in &config.p_values {
                            qs.push(est.quantile_at(p, config.aggregate)?);
                        }
                        per_r.push(Some((est.params_median.xi(), qs)));
                    }
                    Err(Error::EstimationFailed(_)) => per_r.push(None),
                    Err(e) => return Err(e),
                }
            }
            Ok(per_r)
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (ri, &r) in config.r_values.iter().enumerate() {
        let xi_estimates: Vec<f64> = outcomes
            .iter()
            .filter_map(|g| g[ri].as_ref().map(|(xi, _)| *xi))
            .collect();
        cells.push(make_quartile_cell(
            r,
            None,
            Metric::Xi,
            &xi_estimates,
            config.repetitions,
        )?);
        for (pi, &p) in config.p_values.iter().enumerate() {
            let q_estimates: Vec<f64> = outcomes
                .iter()
                .filter_map(|g| g[ri].as_ref().map(|(_, qs)| qs[pi]))
                .collect();
            cells.push(make_quartile_cell(
                r,
                Some(p),
                Metric::Quantile,
                &q_estimates,
                config.repetitions,
            )?);
        }
    }

    Ok(QuartileSummary {
        experiment_id: format!(
            "real-s{}-B{}-N{}",
            config.block_size, config.permutations, config.repetitions
        ),
        master_seed: config.master_seed,
        cells,
    })
}

fn make_quartile_cell(
    r: usize,
    p: Option<f64>,
    metric: Metric,
    estimates: &[f64],
    total: usize,
) -> Result<QuartileCell> {
    if estimates.is_empty() {
        return Err(Error::EstimationFailed(format!(
            "every permutation group failed for r={r}, metric={}",
            metric.as_str()
        )));
    }
    let (q1, med, q3) = quartiles(estimates);
    Ok(QuartileCell {
        r,
        p,
        metric,
        q1,
        median: med,
        q3,
        effective: estimates.len(),
        total,
    })
}
