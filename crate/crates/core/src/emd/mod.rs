//! Empirical mode decomposition by sifting, and its noise-assisted ensemble
//! variant.
//!
//! Envelopes are natural cubic splines through the local extrema, with a few
//! extrema mirrored past each end. Sifting stops on the classic SD criterion.
//! The ensemble average of N noisy decompositions is taken mode by mode and
//! the residual is defined as whatever the averaged modes leave behind, so
//! `Σ modes + residual` reproduces the input exactly.

mod extrema;
mod spline;

pub use extrema::{find_extrema, zero_crossings, Extrema, Extremum};
pub use spline::envelope;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::signal::Signal;

/// Shortest signal `emd` accepts.
pub const MIN_EMD_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmdConfig {
    /// Maximum number of IMFs to extract (M).
    pub max_modes: usize,
    /// Sifting stops once `Σ(h_prev - h)² / Σ h_prev²` falls below this.
    pub sift_sd_threshold: f64,
    pub max_sift_iters: usize,
    /// Extrema mirrored beyond each end before fitting envelopes.
    pub boundary_pad_extrema: usize,
}

impl Default for EmdConfig {
    fn default() -> Self {
        Self {
            max_modes: 10,
            sift_sd_threshold: 0.2,
            max_sift_iters: 100,
            boundary_pad_extrema: 2,
        }
    }
}

impl EmdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_modes == 0 {
            return Err(Error::InvalidArgument(
                "max_modes must be at least 1".into(),
            ));
        }
        if self.sift_sd_threshold.is_nan() || self.sift_sd_threshold <= 0.0 {
            return Err(Error::InvalidArgument(
                "sift_sd_threshold must be positive".into(),
            ));
        }
        if self.max_sift_iters == 0 {
            return Err(Error::InvalidArgument(
                "max_sift_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EemdConfig {
    pub emd: EmdConfig,
    /// Number of noisy realizations averaged (N).
    pub ensemble_size: usize,
    /// Ratio of signal variance to added-noise variance, in dB. `+inf` adds
    /// no noise.
    pub ensemble_snr_db: f64,
    pub master_seed: u64,
}

impl Default for EemdConfig {
    fn default() -> Self {
        Self {
            emd: EmdConfig::default(),
            ensemble_size: 50,
            ensemble_snr_db: 30.0,
            master_seed: 0,
        }
    }
}

impl EemdConfig {
    pub fn validate(&self) -> Result<()> {
        self.emd.validate()?;
        if self.ensemble_size == 0 {
            return Err(Error::InvalidArgument(
                "ensemble_size must be at least 1".into(),
            ));
        }
        if self.ensemble_snr_db.is_nan() {
            return Err(Error::InvalidArgument("ensemble_snr_db is NaN".into()));
        }
        Ok(())
    }
}

/// Intrinsic mode functions `IMF_1..IMF_M` and the residual of one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfSet {
    modes: Vec<Signal>,
    residual: Signal,
}

impl ImfSet {
    pub fn new(modes: Vec<Signal>, residual: Signal) -> Result<Self> {
        for m in &modes {
            residual.check_compatible(m)?;
        }
        Ok(Self { modes, residual })
    }

    pub fn modes(&self) -> &[Signal] {
        &self.modes
    }

    pub fn residual(&self) -> &Signal {
        &self.residual
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn source_len(&self) -> usize {
        self.residual.len()
    }

    pub fn sample_rate(&self) -> u32 {
        self.residual.sample_rate()
    }

    /// `Σ_m IMF_m(t)`, without the residual.
    pub fn sum_modes(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.source_len()];
        for m in &self.modes {
            for (a, v) in acc.iter_mut().zip(m.samples()) {
                *a += v;
            }
        }
        acc
    }

    /// `Σ_m IMF_m(t) + r(t)`, which reproduces the decomposed signal.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut acc = self.sum_modes();
        for (a, v) in acc.iter_mut().zip(self.residual.samples()) {
            *a += v;
        }
        acc
    }
}

fn mean_envelope(h: &[f64], ext: &Extrema, pad: usize) -> Result<Vec<f64>> {
    let upper = envelope(&ext.maxima, h.len(), pad)?;
    let lower = envelope(&ext.minima, h.len(), pad)?;
    Ok(upper
        .iter()
        .zip(&lower)
        .map(|(u, l)| 0.5 * (u + l))
        .collect())
}

/// Extracts one IMF from `x` by repeatedly subtracting the mean envelope.
///
/// Stops when the SD criterion drops below `cfg.sift_sd_threshold`, after
/// `cfg.max_sift_iters` passes, or when the candidate runs out of extrema.
pub fn sift(x: &[f64], cfg: &EmdConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let mut h = x.to_vec();
    let mut ext = find_extrema(&h);
    if !ext.can_sift() {
        return Err(Error::Degenerate(format!(
            "sifting needs at least 2 maxima and 2 minima, found {} and {}",
            ext.maxima.len(),
            ext.minima.len()
        )));
    }
    for _ in 0..cfg.max_sift_iters {
        let mean = mean_envelope(&h, &ext, cfg.boundary_pad_extrema)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for (v, m) in h.iter_mut().zip(&mean) {
            den += *v * *v;
            num += m * m;
            *v -= m;
        }
        let sd = if den > 0.0 { num / den } else { 0.0 };
        if sd < cfg.sift_sd_threshold {
            break;
        }
        ext = find_extrema(&h);
        if !ext.can_sift() {
            break;
        }
    }
    Ok(h)
}

fn emd_samples(x: &[f64], cfg: &EmdConfig) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut residual = x.to_vec();
    let mut modes = Vec::new();
    while modes.len() < cfg.max_modes && find_extrema(&residual).can_sift() {
        let imf = sift(&residual, cfg)?;
        for (r, v) in residual.iter_mut().zip(&imf) {
            *r -= v;
        }
        modes.push(imf);
    }
    Ok((modes, residual))
}

/// Plain EMD of `signal` into at most `cfg.max_modes` IMFs plus residual.
pub fn emd(signal: &Signal, cfg: &EmdConfig) -> Result<ImfSet> {
    cfg.validate()?;
    if signal.len() < MIN_EMD_LEN {
        return Err(Error::Degenerate(format!(
            "emd needs at least {MIN_EMD_LEN} samples, got {}",
            signal.len()
        )));
    }
    let rate = signal.sample_rate();
    let (modes, residual) = emd_samples(signal.samples(), cfg)?;
    let modes = modes
        .into_iter()
        .map(|m| Signal::new(m, rate))
        .collect::<Result<Vec<_>>>()?;
    ImfSet::new(modes, Signal::new(residual, rate)?)
}

/// Standard deviation of the white noise added in each ensemble trial.
pub fn ensemble_noise_std(signal: &Signal, snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    (signal.variance() / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// Ensemble EMD: the m-th mode is the average of the m-th modes of
/// `x + w_n` over `n = 1..N` independent white Gaussian noise realizations.
///
/// Trial `n` draws its noise from a generator seeded by
/// `(cfg.master_seed, n)`, and trial results are accumulated in trial order,
/// so the output is independent of the rayon thread count. A trial that
/// yields fewer modes contributes zeros to the missing ones.
pub fn eemd(signal: &Signal, cfg: &EemdConfig) -> Result<ImfSet> {
    cfg.validate()?;
    if signal.len() < MIN_EMD_LEN {
        return Err(Error::Degenerate(format!(
            "emd needs at least {MIN_EMD_LEN} samples, got {}",
            signal.len()
        )));
    }
    let x = signal.samples();
    let len = x.len();
    let sigma = ensemble_noise_std(signal, cfg.ensemble_snr_db);

    let trial = |n: usize| -> Result<Vec<Vec<f64>>> {
        let noisy: Vec<f64> = if sigma > 0.0 {
            let mut gen = rng::stream(cfg.master_seed, n as u64);
            x.iter()
                .map(|v| {
                    let w: f64 = StandardNormal.sample(&mut gen);
                    v + sigma * w
                })
                .collect()
        } else {
            x.to_vec()
        };
        Ok(emd_samples(&noisy, &cfg.emd)?.0)
    };

    let mut sums: Vec<Vec<f64>> = Vec::new();
    let batch = rayon::current_num_threads().max(1);
    let mut start = 0;
    while start < cfg.ensemble_size {
        let end = (start + batch).min(cfg.ensemble_size);
        let results: Vec<Vec<Vec<f64>>> = (start..end)
            .into_par_iter()
            .map(trial)
            .collect::<Result<_>>()?;
        for modes in results {
            for (m, imf) in modes.into_iter().enumerate() {
                if m == sums.len() {
                    sums.push(vec![0.0; len]);
                }
                for (acc, v) in sums[m].iter_mut().zip(&imf) {
                    *acc += v;
                }
            }
        }
        start = end;
    }

    let scale = 1.0 / cfg.ensemble_size as f64;
    let rate = signal.sample_rate();
    let mut residual = x.to_vec();
    let mut modes = Vec::with_capacity(sums.len());
    for mut mode in sums {
        for (v, r) in mode.iter_mut().zip(residual.iter_mut()) {
            *v *= scale;
            *r -= *v;
        }
        modes.push(Signal::new(mode, rate)?);
    }
    ImfSet::new(modes, Signal::new(residual, rate)?)
}
