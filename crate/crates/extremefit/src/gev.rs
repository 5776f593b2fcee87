//! Generalized extreme value distribution: CDF, density, quantiles and
//! the block-maxima log-likelihood.
//!
//! All functions switch to the Gumbel (ξ = 0) branch whenever
//! |ξ| < [`GUMBEL_SWITCH`]; raising (·) to the power −1/ξ is
//! numerically hopeless below that threshold and no statistically
//! meaningful shape value lives there.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shape values with |ξ| below this are treated as exactly zero.
pub const GUMBEL_SWITCH: f64 = 1e-9;

/// Sentinel returned by likelihood functions when the support
/// condition 1 + ξ(y−μ)/σ > 0 fails for some observation. Optimizers
/// treat it as a rejected step.
pub const INFEASIBLE: f64 = f64::NEG_INFINITY;

/// GEV parameter triple (location μ, scale σ, shape ξ).
///
/// Construction validates σ > 0 and finiteness, so a `GevParams` value
/// is always in the parameter domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevParams {
    mu: f64,
    sigma: f64,
    xi: f64,
}

impl GevParams {
    pub fn new(mu: f64, sigma: f64, xi: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::NonFiniteParam {
                name: "mu",
                value: mu,
            });
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::NonPositiveScale(sigma));
        }
        if !xi.is_finite() {
            return Err(Error::NonFiniteParam {
                name: "xi",
                value: xi,
            });
        }
        Ok(Self { mu, sigma, xi })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// True when the shape falls in the Gumbel branch.
    pub fn is_gumbel(&self) -> bool {
        self.xi.abs() < GUMBEL_SWITCH
    }

    /// 1 + ξ(y−μ)/σ, the quantity that must stay positive for `y` to
    /// lie in the support. Always 1 on the Gumbel branch.
    pub(crate) fn support_term(&self, y: f64) -> f64 {
        if self.is_gumbel() {
            1.0
        } else {
            1.0 + self.xi * (y - self.mu) / self.sigma
        }
    }

    /// Standardized residual (y−μ)/σ.
    pub(crate) fn z(&self, y: f64) -> f64 {
        (y - self.mu) / self.sigma
    }
}

/// Outcome of checking the support condition over a set of
/// observations. `violating_index` points at the first offender.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportCheck {
    pub satisfied: bool,
    pub violating_index: Option<usize>,
}

/// Checks 1 + ξ(y_i−μ)/σ > 0 for every observation.
pub fn check_support(params: &GevParams, ys: &[f64]) -> SupportCheck {
    for (i, &y) in ys.iter().enumerate() {
        if params.support_term(y) <= 0.0 {
            return SupportCheck {
                satisfied: false,
                violating_index: Some(i),
            };
        }
    }
    SupportCheck {
        satisfied: true,
        violating_index: None,
    }
}

/// GEV cumulative distribution function.
///
/// Outside the support the CDF is clamped to exact 0 (below the lower
/// endpoint, ξ > 0) or 1 (above the upper endpoint, ξ < 0).
pub fn gev_cdf(params: &GevParams, y: f64) -> f64 {
    if params.is_gumbel() {
        return (-(-params.z(y)).exp()).exp();
    }
    let t = params.support_term(y);
    if t <= 0.0 {
        if params.xi > 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        (-t.powf(-1.0 / params.xi)).exp()
    }
}

/// Log-density of the GEV distribution at `y`, or [`INFEASIBLE`] when
/// `y` is outside the support.
pub fn gev_log_density(params: &GevParams, y: f64) -> f64 {
    if params.is_gumbel() {
        let z = params.z(y);
        return -params.sigma.ln() - z - (-z).exp();
    }
    let t = params.support_term(y);
    if t <= 0.0 {
        return INFEASIBLE;
    }
    -params.sigma.ln() - (1.0 / params.xi + 1.0) * t.ln() - t.powf(-1.0 / params.xi)
}

/// Quantile function (inverse of [`gev_cdf`]) for `p` in (0,1).
pub fn gev_quantile(params: &GevParams, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let w = -p.ln(); // -log p > 0
    if params.is_gumbel() {
        Ok(params.mu - params.sigma * w.ln())
    } else {
        Ok(params.mu + params.sigma / params.xi * (w.powf(-params.xi) - 1.0))
    }
}

/// Extreme quantile of the underlying per-observation distribution,
/// recovered from the fitted block-level parameters through the
/// relation G = F^m: equals `gev_quantile(params, p^m)` analytically
/// but avoids forming `p^m` directly.
pub fn extreme_quantile(params: &GevParams, p: f64, m: usize) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if m < 1 {
        return Err(Error::InvalidBlockMultiplier(m));
    }
    let w = -(m as f64) * p.ln(); // -m log p > 0
    if params.is_gumbel() {
        Ok(params.mu - params.sigma * w.ln())
    } else {
        Ok(params.mu + params.sigma / params.xi * (w.powf(-params.xi) - 1.0))
    }
}

/// Block-maxima log-likelihood of the GEV parameters given one maximum
/// per block. Returns [`INFEASIBLE`] when any observation violates the
/// support condition.
pub fn bm_log_likelihood(params: &GevParams, maxima: &[f64]) -> Result<f64> {
    if maxima.is_empty() {
        return Err(Error::EmptySeries);
    }
    let m = maxima.len() as f64;
    if params.is_gumbel() {
        let mut sum_z = 0.0;
        let mut sum_exp = 0.0;
        for &y in maxima {
            let z = params.z(y);
            sum_z += z;
            sum_exp += (-z).exp();
        }
        return Ok(-m * params.sigma.ln() - sum_z - sum_exp);
    }
    let inv_xi = 1.0 / params.xi;
    let mut sum_log_t = 0.0;
    let mut sum_pow = 0.0;
    for &y in maxima {
        let t = params.support_term(y);
        if t <= 0.0 {
            return Ok(INFEASIBLE);
        }
        sum_log_t += t.ln();
        sum_pow += t.powf(-inv_xi);
    }
    Ok(-m * params.sigma.ln() - (1.0 + inv_xi) * sum_log_t - sum_pow)
}
