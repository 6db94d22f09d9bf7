//! Impulsiveness index estimation for symmetric α-stable data.
//!
//! The characteristic exponent is recovered from McCulloch's quantile ratio
//! `ν_α = (x_0.95 - x_0.05) / (x_0.75 - x_0.25)`, inverted through a tabulated
//! `α ↦ ν_α` curve for the symmetric (β = 0) case. The shipped table was
//! generated by Monte Carlo with the Chambers–Mallows–Stuck sampler in this
//! module; see `examples/build_lookup.rs`.

mod lookup;
mod sampler;

pub use lookup::{build_lookup, AlphaLookup, Provenance};
pub use sampler::sample_sas;

use crate::error::{Error, Result};

/// Smallest and largest exponent the estimator reports.
pub const ALPHA_MIN: f64 = 0.5;
pub const ALPHA_MAX: f64 = 2.0;

/// Quantile ratio of the normal law (α = 2), rounded as in McCulloch's table.
/// Any smaller ratio is reported as α = 2.
pub const GAUSSIAN_NU: f64 = 2.439;

/// Fewer samples than this are rejected by the estimator.
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaEstimate {
    pub alpha: f64,
    pub nu_alpha: f64,
    pub sample_count: usize,
}

fn sorted_copy(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Quantile of already sorted data. Order statistic `i` (1-based) sits at
/// probability `(i - 0.5) / n`; values in between are interpolated linearly
/// and probabilities outside `[0.5/n, 1 - 0.5/n]` clamp to the extremes.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = p * n as f64 + 0.5;
    if pos <= 1.0 {
        return sorted[0];
    }
    if pos >= n as f64 {
        return sorted[n - 1];
    }
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    sorted[i - 1] + frac * (sorted[i] - sorted[i - 1])
}

pub fn quantile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("quantile of an empty sample".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside (0, 1)"
        )));
    }
    Ok(quantile_sorted(&sorted_copy(samples), p))
}

fn nu_alpha_sorted(sorted: &[f64]) -> Result<f64> {
    if sorted.len() < MIN_SAMPLES {
        return Err(Error::Degenerate(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            sorted.len()
        )));
    }
    let q = |p| quantile_sorted(sorted, p);
    let iqr = q(0.75) - q(0.25);
    if iqr.is_nan() || iqr <= 0.0 {
        return Err(Error::Degenerate("zero interquartile range".into()));
    }
    Ok((q(0.95) - q(0.05)) / iqr)
}

/// McCulloch's tail-spread ratio `(x_0.95 - x_0.05) / (x_0.75 - x_0.25)`.
pub fn nu_alpha(samples: &[f64]) -> Result<f64> {
    nu_alpha_sorted(&sorted_copy(samples))
}

pub fn estimate_alpha(samples: &[f64], lookup: &AlphaLookup) -> Result<AlphaEstimate> {
    let nu = nu_alpha(samples)?;
    Ok(AlphaEstimate {
        alpha: lookup.alpha_for_nu(nu),
        nu_alpha: nu,
        sample_count: samples.len(),
    })
}
