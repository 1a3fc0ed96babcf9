//! Per-layer richness measures computed from a collected state matrix:
//!
//! * average state entropy (ASE): time average of a kernel estimator of the
//!   quadratic entropy of the instantaneous unit activations;
//! * uncoupled dynamics (UD): the number of leading principal directions
//!   whose normalized singular-value relevances reach a target explained
//!   variability;
//! * condition number (kappa): ratio of the largest to smallest singular
//!   value of the state matrix.
//!
//! The entropy kernel is a normalized univariate Gaussian density whose
//! standard deviation is the population spread of the activations shrunk by a
//! fixed factor (default 0.3), floored at `min_kernel_sigma` so degenerate
//! all-equal activations stay well defined. UD works on the raw, uncentered
//! state matrix; a centered variant exists behind
//! [`uncoupled_dynamics_centered`] but is not the default.

use crate::error::{Error, Result};
use crate::numerics::{singular_values, DenseMatrix, DenseVector};
use crate::reservoir::LayerStates;

/// Parameters of the kernel entropy estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyParams {
    /// Factor shrinking the population standard deviation of the activations
    /// to the kernel standard deviation.
    pub shrink_factor: f64,
    /// Lower bound on the kernel standard deviation.
    pub min_kernel_sigma: f64,
}

impl Default for EntropyParams {
    fn default() -> Self {
        Self {
            shrink_factor: 0.3,
            min_kernel_sigma: 1e-8,
        }
    }
}

impl EntropyParams {
    fn validate(&self) -> Result<()> {
        let ok = self.shrink_factor > 0.0 && self.min_kernel_sigma > 0.0;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "entropy params must be positive (shrink {}, min sigma {})",
                self.shrink_factor, self.min_kernel_sigma
            )));
        }
        Ok(())
    }
}

/// Relative slack when comparing cumulative relevance against the explained
/// threshold; absorbs rounding in sums of near-equal singular values.
const EXPLAINED_SLACK: f64 = 1e-12;

/// Singular values below `NUMERICAL_RANK_CUTOFF * sigma_1` are treated as
/// zero in the relevance normalization: the Gram route resolves eigenvalues
/// to about 1e-12 of the largest, so their square roots carry no information
/// below 1e-6 of sigma_1. Without this, exact zeros (rank-deficient states)
/// would surface as noise directions and inflate the count at thresholds
/// near 1.
const NUMERICAL_RANK_CUTOFF: f64 = 1e-6;

/// Below `sigma_min < KAPPA_FLOOR * sigma_max` the state matrix is reported
/// rank deficient instead of producing a meaningless condition number.
pub const KAPPA_FLOOR: f64 = 1e-14;

/// Richness summary of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct RichnessReport {
    pub layer_index: usize,
    /// Average state entropy, in nats.
    pub ase: f64,
    /// Uncoupled dynamics count, `1 ..= units`.
    pub ud: usize,
    pub kappa: f64,
    pub log10_kappa: f64,
}

/// Kernel entropy of one instantaneous activation vector:
/// `H = -log( (1/N^2) sum_j sum_i K(x_j - x_i) )`, including the `i = j`
/// terms, with `K` a Gaussian density of standard deviation
/// `max(shrink * population_std(x), min_kernel_sigma)`.
pub fn instantaneous_entropy(x: &DenseVector, params: &EntropyParams) -> Result<f64> {
    entropy_of_slice(x.as_slice(), params)
}

pub(crate) fn entropy_of_slice(x: &[f64], params: &EntropyParams) -> Result<f64> {
    params.validate()?;
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewUnits(n));
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
    let sigma = (params.shrink_factor * var.sqrt()).max(params.min_kernel_sigma);

    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let denom = 2.0 * sigma * sigma;
    let mut total = 0.0;
    for j in 0..n {
        let mut inner = 0.0;
        for i in 0..n {
            let d = x[j] - x[i];
            inner += norm * (-(d * d) / denom).exp();
        }
        total += inner;
    }
    Ok(-((total / (nf * nf)).ln()))
}

/// Arithmetic mean of the instantaneous entropy over the kept columns.
pub fn average_state_entropy(s: &LayerStates, params: &EntropyParams) -> Result<f64> {
    let states = s.states();
    let mut col = vec![0.0; states.rows()];
    let mut sum = 0.0;
    for t in 0..states.cols() {
        states.copy_col_into(t, &mut col);
        sum += entropy_of_slice(&col, params)?;
    }
    Ok(sum / states.cols() as f64)
}

/// Smallest number of principal directions whose normalized singular-value
/// relevances `R_i = sigma_i / sum_j sigma_j` accumulate to at least
/// `explained` (in `(0, 1]`).
pub fn uncoupled_dynamics(s: &LayerStates, explained: f64) -> Result<usize> {
    uncoupled_count(s.states(), explained)
}

/// Like [`uncoupled_dynamics`] but on the column-mean-centered state matrix.
pub fn uncoupled_dynamics_centered(s: &LayerStates, explained: f64) -> Result<usize> {
    let states = s.states();
    let cols = states.cols() as f64;
    let means: Vec<f64> = (0..states.rows())
        .map(|r| states.row(r).iter().sum::<f64>() / cols)
        .collect();
    let centered = DenseMatrix::from_fn(states.rows(), states.cols(), |r, c| {
        states.get(r, c) - means[r]
    });
    uncoupled_count(&centered, explained)
}

fn uncoupled_count(states: &DenseMatrix, explained: f64) -> Result<usize> {
    if !(explained > 0.0 && explained <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "explained variability must lie in (0, 1], got {explained}"
        )));
    }
    let spectrum = singular_values(states)?;
    if spectrum.largest() <= 0.0 {
        return Err(Error::ZeroStates);
    }
    let cutoff = NUMERICAL_RANK_CUTOFF * spectrum.largest();
    let resolved: &[f64] = {
        let values = spectrum.values();
        let kept = values.iter().take_while(|&&s| s >= cutoff).count();
        &values[..kept]
    };
    let total: f64 = resolved.iter().sum();
    let threshold = explained * total - EXPLAINED_SLACK * total;
    let mut cum = 0.0;
    for (d, &sigma) in resolved.iter().enumerate() {
        cum += sigma;
        if cum >= threshold {
            return Ok(d + 1);
        }
    }
    Ok(resolved.len())
}

/// Condition number of the state matrix and its base-10 logarithm.
pub fn condition_number(s: &LayerStates) -> Result<(f64, f64)> {
    let spectrum = singular_values(s.states())?;
    let sigma_max = spectrum.largest();
    let sigma_min = spectrum.smallest();
    if sigma_max <= 0.0 {
        return Err(Error::ZeroStates);
    }
    if sigma_min < KAPPA_FLOOR * sigma_max {
        return Err(Error::RankDeficient {
            sigma_max,
            sigma_min,
        });
    }
    let kappa = sigma_max / sigma_min;
    Ok((kappa, kappa.log10()))
}

/// Computes all three measures of one layer.
pub fn richness_report(
    s: &LayerStates,
    params: &EntropyParams,
    explained: f64,
) -> Result<RichnessReport> {
    let ase = average_state_entropy(s, params)?;
    let ud = uncoupled_dynamics(s, explained)?;
    let (kappa, log10_kappa) = condition_number(s)?;
    Ok(RichnessReport {
        layer_index: s.layer_index(),
        ase,
        ud,
        kappa,
        log10_kappa,
    })
}
