//! The enhancement pipeline: ensemble EMD, per-frame α profiling of every
//! mode, adaptive-threshold mode selection and windowed overlap-add
//! reconstruction.

mod profile;

pub use profile::AlphaProfile;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emd::{eemd, EemdConfig, ImfSet};
use crate::error::{Error, Result};
use crate::signal::{frame_grid, overlap_add, FrameGrid, Signal, Window, WindowKind};
use crate::stable::{estimate_alpha, AlphaLookup, ALPHA_MAX, ALPHA_MIN};

/// How `μ·α_u` and `α_min` combine into the per-frame threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdCombine {
    /// `max(μ·α_u, α_min)`: α_min is a floor on the threshold.
    #[default]
    Floor,
    /// `min(μ·α_u, α_min)`.
    LiteralMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhanceConfig {
    pub eemd: EemdConfig,
    /// Frame length in samples.
    pub frame_len: usize,
    /// Hop between frames in samples.
    pub step: usize,
    pub mu: f64,
    pub alpha_min: f64,
    pub threshold_combine: ThresholdCombine,
    pub window: WindowKind,
}

impl Default for EnhanceConfig {
    fn default() -> Self {
        Self {
            eemd: EemdConfig::default(),
            frame_len: 10240,
            step: 128,
            mu: 0.8,
            alpha_min: 1.1,
            threshold_combine: ThresholdCombine::Floor,
            window: WindowKind::Hann,
        }
    }
}

impl EnhanceConfig {
    pub fn validate(&self) -> Result<()> {
        self.eemd.validate()?;
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "mu must be in (0, 1], got {}",
                self.mu
            )));
        }
        if !(ALPHA_MIN..=ALPHA_MAX).contains(&self.alpha_min) {
            return Err(Error::InvalidArgument(format!(
                "alpha_min must be in [{ALPHA_MIN}, {ALPHA_MAX}], got {}",
                self.alpha_min
            )));
        }
        // same checks as the grid itself
        frame_grid(0, self.frame_len, self.step)?;
        Ok(())
    }
}

/// α of one frame's samples, or 2 when the estimator cannot produce one
/// (too few samples, zero interquartile range).
fn frame_alpha(samples: &[f64], lookup: &AlphaLookup) -> f64 {
    estimate_alpha(samples, lookup).map_or(ALPHA_MAX, |e| e.alpha)
}

/// Per-frame α of every mode and of the noisy signal itself.
///
/// Only the part of a frame that lies inside the signal is used; the zero
/// padding past the end is not data.
pub fn profile_alpha(
    imfs: &ImfSet,
    noisy: &Signal,
    grid: &FrameGrid,
    lookup: &AlphaLookup,
) -> Result<AlphaProfile> {
    if imfs.source_len() != noisy.len() {
        return Err(Error::LengthMismatch {
            expected: noisy.len(),
            actual: imfs.source_len(),
        });
    }
    if grid.total_len() != noisy.len() {
        return Err(Error::LengthMismatch {
            expected: noisy.len(),
            actual: grid.total_len(),
        });
    }
    let rows: Vec<(Vec<f64>, f64)> = (0..grid.count())
        .into_par_iter()
        .map(|q| {
            let per_mode = imfs
                .modes()
                .iter()
                .map(|m| frame_alpha(grid.valid_slice(m.samples(), q), lookup))
                .collect();
            (
                per_mode,
                frame_alpha(grid.valid_slice(noisy.samples(), q), lookup),
            )
        })
        .collect();
    let (per_mode, noisy_alpha) = rows.into_iter().unzip();
    Ok(AlphaProfile::new(imfs.num_modes(), per_mode, noisy_alpha))
}

/// Adaptive per-frame threshold from the noisy frame's α.
pub fn threshold(alpha_u: f64, cfg: &EnhanceConfig) -> f64 {
    let scaled = cfg.mu * alpha_u;
    match cfg.threshold_combine {
        ThresholdCombine::Floor => scaled.max(cfg.alpha_min),
        ThresholdCombine::LiteralMin => scaled.min(cfg.alpha_min),
    }
}

/// Number of leading modes to keep: the largest 1-based `m` with
/// `alphas[m - 1] <= rho`, or 0 if none qualifies. Modes before the cut are
/// kept even if their own α exceeds `rho`.
pub fn select_cut(alphas: &[f64], rho: f64) -> usize {
    alphas.iter().rposition(|&a| a <= rho).map_or(0, |i| i + 1)
}

/// Windowed sum of the first `Z^q` modes in every frame, overlap-added and
/// normalized by the window overlap. The residual is never included.
pub fn reconstruct(
    imfs: &ImfSet,
    profile: &AlphaProfile,
    grid: &FrameGrid,
    window: &Window,
) -> Result<Signal> {
    if grid.total_len() != imfs.source_len() {
        return Err(Error::LengthMismatch {
            expected: imfs.source_len(),
            actual: grid.total_len(),
        });
    }
    let cuts = profile.cut_index();
    if cuts.len() != grid.count() {
        return Err(Error::InvalidArgument(format!(
            "profile has {} frame cuts, grid has {} frames",
            cuts.len(),
            grid.count()
        )));
    }
    if let Some(&z) = cuts.iter().find(|&&z| z > imfs.num_modes()) {
        return Err(Error::InvalidArgument(format!(
            "cut index {z} exceeds the {} available modes",
            imfs.num_modes()
        )));
    }
    let frames: Vec<Vec<f64>> = (0..grid.count())
        .into_par_iter()
        .map(|q| {
            let mut frame = vec![0.0; grid.frame_len()];
            for mode in &imfs.modes()[..cuts[q]] {
                let part = grid.valid_slice(mode.samples(), q);
                for (acc, v) in frame.iter_mut().zip(part) {
                    *acc += v;
                }
            }
            window.apply(&mut frame);
            frame
        })
        .collect();
    Signal::new(overlap_add(&frames, grid, window)?, imfs.sample_rate())
}

/// Runs the whole pipeline on `noisy` and returns the enhanced signal with
/// the per-frame diagnostics.
pub fn enhance(
    noisy: &Signal,
    cfg: &EnhanceConfig,
    lookup: &AlphaLookup,
) -> Result<(Signal, AlphaProfile)> {
    cfg.validate()?;
    if noisy.len() < cfg.frame_len / 4 {
        return Err(Error::InvalidArgument(format!(
            "input has {} samples, need at least a quarter frame ({})",
            noisy.len(),
            cfg.frame_len / 4
        )));
    }
    let grid = frame_grid(noisy.len(), cfg.frame_len, cfg.step)?;
    let imfs = eemd(noisy, &cfg.eemd)?;
    let mut profile = profile_alpha(&imfs, noisy, &grid, lookup)?;
    profile.select(cfg);
    let window = Window::new(cfg.window, cfg.frame_len);
    let enhanced = reconstruct(&imfs, &profile, &grid, &window)?;
    Ok((enhanced, profile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emd::EmdConfig;
    use crate::stable::sample_sas;

    fn floor_cfg() -> EnhanceConfig {
        EnhanceConfig::default()
    }

    #[test]
    fn threshold_rules() {
        let cfg = floor_cfg();
        assert!((threshold(1.6, &cfg) - 1.28).abs() < 1e-12);
        assert_eq!(threshold(1.0, &cfg), 1.1);
        let lit = EnhanceConfig {
            threshold_combine: ThresholdCombine::LiteralMin,
            ..floor_cfg()
        };
        assert!((threshold(1.0, &lit) - 0.8).abs() < 1e-12);
        assert_eq!(threshold(1.6, &lit), 1.1);
    }

    #[test]
    fn cut_rules() {
        assert_eq!(select_cut(&[1.0, 1.05, 1.2, 1.9, 2.0], 1.25), 3);
        assert_eq!(select_cut(&[1.9, 2.0], 1.1), 0);
        assert_eq!(select_cut(&[1.0, 1.3, 1.05, 2.0], 1.1), 3);
        assert_eq!(select_cut(&[], 1.1), 0);
        assert_eq!(select_cut(&[1.1], 1.1), 1);
    }

    #[test]
    fn config_validation() {
        assert!(floor_cfg().validate().is_ok());
        assert!(EnhanceConfig {
            mu: 0.0,
            ..floor_cfg()
        }
        .validate()
        .is_err());
        assert!(EnhanceConfig {
            mu: 1.2,
            ..floor_cfg()
        }
        .validate()
        .is_err());
        assert!(EnhanceConfig {
            alpha_min: 2.5,
            ..floor_cfg()
        }
        .validate()
        .is_err());
        assert!(EnhanceConfig {
            step: 20000,
            ..floor_cfg()
        }
        .validate()
        .is_err());
    }

    fn small_set(len: usize) -> (ImfSet, Signal) {
        let x: Vec<f64> = (0..len)
            .map(|i| (i as f64 * 0.3).sin() + 0.5 * (i as f64 * 0.031).sin())
            .collect();
        let s = Signal::new(x, 8000).unwrap();
        (crate::emd::emd(&s, &EmdConfig::default()).unwrap(), s)
    }

    #[test]
    fn keep_all_reproduces_mode_sum() {
        let (imfs, s) = small_set(3000);
        let grid = frame_grid(s.len(), 512, 64).unwrap();
        let mut profile = profile_alpha(&imfs, &s, &grid, AlphaLookup::embedded()).unwrap();
        profile.keep_all();
        let out = reconstruct(&imfs, &profile, &grid, &Window::new(WindowKind::Hann, 512)).unwrap();
        let target = imfs.sum_modes();
        let err = out
            .samples()
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6 * s.peak(), "{err}");
        assert_eq!(out.len(), s.len());
    }

    #[test]
    fn dropping_everything_is_silence() {
        let (imfs, s) = small_set(2000);
        let grid = frame_grid(s.len(), 256, 128).unwrap();
        let mut profile = profile_alpha(&imfs, &s, &grid, AlphaLookup::embedded()).unwrap();
        profile.set_cuts(vec![0; grid.count()]).unwrap();
        let out = reconstruct(&imfs, &profile, &grid, &Window::new(WindowKind::Hann, 256)).unwrap();
        assert!(out.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn profile_recovers_stable_index_and_sentinel() {
        let len = 4096;
        let noise = Signal::new(sample_sas(1.2, len, 21).unwrap(), 16000).unwrap();
        let silent = Signal::zeros(len, 16000).unwrap();
        let imfs = ImfSet::new(
            vec![noise.clone(), silent],
            Signal::zeros(len, 16000).unwrap(),
        )
        .unwrap();
        let grid = frame_grid(len, 2048, 1024).unwrap();
        let p = profile_alpha(&imfs, &noise, &grid, AlphaLookup::embedded()).unwrap();
        assert_eq!(p.num_frames(), 4);
        for q in 0..2 {
            let a = p.per_mode()[q][0];
            assert!((a - 1.2).abs() <= 0.1, "frame {q}: {a}");
            assert_eq!(p.per_mode()[q][1], 2.0);
        }
        assert_eq!(p.noisy()[0], p.per_mode()[0][0]);
    }

    #[test]
    fn profile_length_mismatch() {
        let (imfs, s) = small_set(1000);
        let other = Signal::zeros(999, 8000).unwrap();
        let grid = frame_grid(1000, 256, 128).unwrap();
        assert!(profile_alpha(&imfs, &other, &grid, AlphaLookup::embedded()).is_err());
        let bad_grid = frame_grid(999, 256, 128).unwrap();
        assert!(profile_alpha(&imfs, &s, &bad_grid, AlphaLookup::embedded()).is_err());
    }

    #[test]
    fn reconstruct_rejects_bad_cuts() {
        let (imfs, s) = small_set(1000);
        let grid = frame_grid(s.len(), 256, 128).unwrap();
        let mut profile = profile_alpha(&imfs, &s, &grid, AlphaLookup::embedded()).unwrap();
        let w = Window::new(WindowKind::Hann, 256);
        // cuts not set yet
        assert!(reconstruct(&imfs, &profile, &grid, &w).is_err());
        assert!(profile
            .set_cuts(vec![imfs.num_modes() + 1; grid.count()])
            .is_err());
        assert!(profile.set_cuts(vec![0; 3]).is_err());
    }

    #[test]
    fn short_input_rejected() {
        let s = Signal::zeros(2000, 16000).unwrap();
        assert!(enhance(&s, &floor_cfg(), AlphaLookup::embedded()).is_err());
    }
}
