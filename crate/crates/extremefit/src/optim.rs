//! Maximum likelihood fitting of the GEV parameters to the r largest
//! order statistics, via a derivative-free simplex search over
//! (μ, log σ, ξ). The log-σ parameterization keeps σ > 0
//! unconditionally, and infeasible points score as −∞ so the search
//! simply rejects them.

use serde::{Deserialize, Serialize};

use crate::gev::{GevParams, INFEASIBLE};
use crate::rlos::{rlos_log_likelihood, BlockTopR};
use crate::{Error, Result};

/// Euler–Mascheroni constant, for the Gumbel moment start.
const EULER_GAMMA: f64 = 0.577_215_664_9;

/// Floor on the initial scale when the block maxima have zero
/// variance; keeps the start point inside the open parameter domain.
const SIGMA_FLOOR: f64 = 1e-8;

/// Convergence tolerances and iteration budget of the simplex search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Simplex diameter threshold in (μ, log σ, ξ) space.
    pub param_tol: f64,
    /// Spread of log-likelihood values across the simplex.
    pub loglik_tol: f64,
    pub max_iters: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            param_tol: 1e-8,
            loglik_tol: 1e-10,
            max_iters: 5000,
        }
    }
}

/// Outcome of one likelihood maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: GevParams,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    pub function_evals: usize,
}

/// Gumbel moment-matching start from the block maxima: σ₀ = √6·sd/π,
/// μ₀ = mean − γ·σ₀, ξ₀ = 0.1. σ₀ is doubled until every retained
/// order statistic is feasible under (μ₀, σ₀, ξ₀).
pub fn initial_params(top_r: &BlockTopR) -> Result<GevParams> {
    let maxima = top_r.block_maxima();
    if maxima.len() < 2 {
        return Err(Error::TooFewBlocks(maxima.len()));
    }
    let n = maxima.len() as f64;
    let mean = maxima.iter().sum::<f64>() / n;
    let var = maxima.iter().map(|&y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let mut sigma = (6.0 * var).sqrt() / std::f64::consts::PI;
    if sigma < SIGMA_FLOOR {
        sigma = SIGMA_FLOOR;
    }
    let xi = 0.1;
    loop {
        let mu = mean - EULER_GAMMA * sigma;
        let candidate = GevParams::new(mu, sigma, xi)?;
        if top_r
            .all_values()
            .all(|y| candidate.support_term(y) > 0.0)
        {
            return Ok(candidate);
        }
        sigma *= 2.0;
    }
}

/// Maximizes the r-LOS log-likelihood over (μ, σ, ξ).
///
/// `init` defaults to [`initial_params`]; when provided it must be
/// feasible for the data. Exhausting the iteration budget is not an
/// error: the best point found is returned with `converged = false`.
pub fn fit_gev(
    top_r: &BlockTopR,
    init: Option<GevParams>,
    settings: &OptimizerSettings,
) -> Result<FitResult> {
    let start = match init {
        Some(p) => {
            if rlos_log_likelihood(&p, top_r) == INFEASIBLE {
                return Err(Error::InfeasibleInit);
            }
            p
        }
        None => initial_params(top_r)?,
    };

    // all retained order statistics equal: the likelihood is unbounded
    // as sigma -> 0 and no maximizer exists
    let mut values = top_r.all_values();
    let first = values.next().expect("BlockTopR is nonempty");
    if values.all(|v| v == first) {
        return Ok(FitResult {
            params: start,
            log_likelihood: rlos_log_likelihood(&start, top_r),
            converged: false,
            iterations: 0,
            function_evals: 0,
        });
    }

    let x0 = [start.mu(), start.sigma().ln(), start.xi()];
    let mut evals = 0usize;
    let mut objective = |x: &[f64; 3]| {
        evals += 1;
        match GevParams::new(x[0], x[1].exp(), x[2]) {
            Ok(p) => rlos_log_likelihood(&p, top_r),
            Err(_) => INFEASIBLE,
        }
    };

    let outcome = nelder_mead_max(&mut objective, &x0, settings);
    let best = outcome.x;
    let params = GevParams::new(best[0], best[1].exp(), best[2])?;
    let log_likelihood = rlos_log_likelihood(&params, top_r);
    Ok(FitResult {
        params,
        log_likelihood,
        converged: outcome.converged && log_likelihood.is_finite(),
        iterations: outcome.iterations,
        function_evals: evals,
    })
}

struct SearchOutcome {
    x: [f64; 3],
    converged: bool,
    iterations: usize,
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5) maximizing `f`. Fully deterministic.
fn nelder_mead_max<F: FnMut(&[f64; 3]) -> f64>(
    f: &mut F,
    x0: &[f64; 3],
    settings: &OptimizerSettings,
) -> SearchOutcome {
    const DIM: usize = 3;
    // fminsearch-style initial simplex: 5% perturbation per coordinate
    let mut simplex: Vec<[f64; 3]> = Vec::with_capacity(DIM + 1);
    simplex.push(*x0);
    for i in 0..DIM {
        let mut v = *x0;
        v[i] = if v[i] != 0.0 { v[i] * 1.05 } else { 0.00025 };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(&mut *f).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < settings.max_iters {
        // sort descending by value (best first; maximizing)
        let mut order: Vec<usize> = (0..=DIM).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let sorted: Vec<[f64; 3]> = order.iter().map(|&i| simplex[i]).collect();
        let sorted_vals: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = sorted;
        values = sorted_vals;

        let diameter = (1..=DIM)
            .map(|i| {
                (0..DIM)
                    .map(|d| (simplex[i][d] - simplex[0][d]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let spread = if values[DIM].is_finite() {
            values[0] - values[DIM]
        } else {
            f64::INFINITY
        };
        if diameter < settings.param_tol && spread < settings.loglik_tol {
            converged = true;
            break;
        }

        iterations += 1;

        // centroid of all but the worst vertex
        let mut centroid = [0.0; 3];
        for v in simplex.iter().take(DIM) {
            for d in 0..DIM {
                centroid[d] += v[d] / DIM as f64;
            }
        }
        let worst = simplex[DIM];
        let f_worst = values[DIM];
        let f_best = values[0];
        let f_second_worst = values[DIM - 1];

        let blend = |alpha: f64| {
            let mut v = [0.0; 3];
            for d in 0..DIM {
                v[d] = centroid[d] + alpha * (centroid[d] - worst[d]);
            }
            v
        };

        let reflected = blend(1.0);
        let f_reflected = f(&reflected);

        if f_reflected > f_best {
            let expanded = blend(2.0);
            let f_expanded = f(&expanded);
            if f_expanded > f_reflected {
                simplex[DIM] = expanded;
                values[DIM] = f_expanded;
            } else {
                simplex[DIM] = reflected;
                values[DIM] = f_reflected;
            }
        } else if f_reflected > f_second_worst {
            simplex[DIM] = reflected;
            values[DIM] = f_reflected;
        } else {
            let (contracted, f_contracted) = if f_reflected > f_worst {
                let c = blend(0.5);
                let fc = f(&c);
                (c, fc)
            } else {
                let c = blend(-0.5);
                let fc = f(&c);
                (c, fc)
            };
            if f_contracted > f_worst.max(f_reflected) {
                simplex[DIM] = contracted;
                values[DIM] = f_contracted;
            } else {
                // shrink toward the best vertex
                let anchor = simplex[0];
                for i in 1..=DIM {
                    for (d, &a) in anchor.iter().enumerate() {
                        simplex[i][d] = a + 0.5 * (simplex[i][d] - a);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=DIM {
        if values[i] > values[best] {
            best = i;
        }
    }
    SearchOutcome {
        x: simplex[best],
        converged,
        iterations,
    }
}
