//! Block decomposition into the r largest order statistics and the
//! joint log-likelihood of those order statistics under the GEV
//! distribution. With r = 1 everything here reduces exactly to the
//! block-maxima likelihood in [`crate::gev`].

use serde::{Deserialize, Serialize};

use crate::gev::{GevParams, INFEASIBLE};
use crate::{Error, Result};

/// The r largest observations of each complete block, each block
/// vector stored in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockTopR {
    r: usize,
    block_size: usize,
    blocks: Vec<Vec<f64>>,
}

impl BlockTopR {
    /// Builds from pre-extracted block vectors, validating shape,
    /// descending order and finiteness.
    pub fn from_blocks(blocks: Vec<Vec<f64>>, block_size: usize, r: usize) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptySeries);
        }
        if r == 0 || r > block_size {
            return Err(Error::OrderExceedsBlockSize { r, s: block_size });
        }
        for block in &blocks {
            if block.len() != r {
                return Err(Error::OrderExceedsBlockSize {
                    r: block.len(),
                    s: block_size,
                });
            }
            validate_descending(block)?;
        }
        Ok(Self {
            r,
            block_size,
            blocks,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Number of complete blocks m.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    /// The per-block maxima (the k = 1 column).
    pub fn block_maxima(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b[0]).collect()
    }

    /// All retained order statistics, flattened.
    pub fn all_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.blocks.iter().flatten().copied()
    }
}

fn validate_descending(block: &[f64]) -> Result<()> {
    for (i, &v) in block.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteObservation { index: i });
        }
        if i > 0 && v > block[i - 1] {
            return Err(Error::NotDescending { index: i });
        }
    }
    Ok(())
}

/// Splits `data` into m = floor(n/s) complete blocks of size `s` in
/// input order and keeps the `r` largest values of each, ties with
/// multiplicity. A trailing partial block is discarded.
pub fn extract_top_r(data: &[f64], block_size: usize, r: usize) -> Result<BlockTopR> {
    if r == 0 || r > block_size {
        return Err(Error::OrderExceedsBlockSize { r, s: block_size });
    }
    if data.len() < block_size {
        return Err(Error::SeriesShorterThanBlock {
            n: data.len(),
            s: block_size,
        });
    }
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteObservation { index: i });
    }
    let m = data.len() / block_size;
    let mut blocks = Vec::with_capacity(m);
    for chunk in data.chunks_exact(block_size) {
        let mut sorted = chunk.to_vec();
        sorted.sort_unstable_by(|a, b| b.total_cmp(a));
        sorted.truncate(r);
        blocks.push(sorted);
    }
    Ok(BlockTopR {
        r,
        block_size,
        blocks,
    })
}

/// Log joint density of the r largest order statistics of one block.
///
/// Returns [`INFEASIBLE`] when any entry violates the support
/// condition. Summing this over all blocks gives
/// [`rlos_log_likelihood`].
pub fn rlos_block_log_density(params: &GevParams, block: &[f64]) -> Result<f64> {
    if block.is_empty() {
        return Err(Error::EmptySeries);
    }
    validate_descending(block)?;
    Ok(block_log_density_unchecked(params, block))
}

fn block_log_density_unchecked(params: &GevParams, block: &[f64]) -> f64 {
    let r = block.len();
    let smallest = block[r - 1];
    if params.is_gumbel() {
        let mut sum_z = 0.0;
        for &y in block {
            sum_z += params.z(y);
        }
        return -(r as f64) * params.sigma().ln() - (-params.z(smallest)).exp() - sum_z;
    }
    let inv_xi = 1.0 / params.xi();
    let mut sum_log_t = 0.0;
    for &y in block {
        let t = params.support_term(y);
        if t <= 0.0 {
            return INFEASIBLE;
        }
        sum_log_t += t.ln();
    }
    let t_r = params.support_term(smallest);
    -(r as f64) * params.sigma().ln() - t_r.powf(-inv_xi) - (inv_xi + 1.0) * sum_log_t
}

/// Joint log-likelihood of the GEV parameters over all blocks' r
/// largest order statistics. Returns [`INFEASIBLE`] when the support
/// condition fails anywhere.
pub fn rlos_log_likelihood(params: &GevParams, top_r: &BlockTopR) -> f64 {
    let mut total = 0.0;
    for block in &top_r.blocks {
        let term = block_log_density_unchecked(params, block);
        if term == INFEASIBLE {
            return INFEASIBLE;
        }
        total += term;
    }
    total
}
