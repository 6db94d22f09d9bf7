use super::lpc::{autocorrelation, levinson, toeplitz_quadratic};
use super::{active_frames, hann, MetricConfig};
use crate::error::{Error, Result};
use crate::signal::Signal;

/// Per-frame values are clamped to `[0, LLR_MAX]`.
pub const LLR_MAX: f64 = 2.0;

/// Log-likelihood ratio between the LPC models of clean and processed speech,
/// averaged over active frames. Each frame contributes
/// `ln(a_p R_c a_pᵀ / a_c R_c a_cᵀ)` clamped to `[0, 2]`, where `R_c` is the
/// clean frame's autocorrelation matrix. Lower is closer to the clean signal.
pub fn llr(clean: &Signal, processed: &Signal, cfg: &MetricConfig) -> Result<f64> {
    clean.check_compatible(processed)?;
    let (frame_len, hop) = cfg.frame_samples(clean.sample_rate());
    if frame_len <= cfg.lpc_order {
        return Err(Error::InvalidArgument(format!(
            "frame of {frame_len} samples is too short for LPC order {}",
            cfg.lpc_order
        )));
    }
    let starts = active_frames(clean.samples(), frame_len, hop, cfg.active_range_db);
    if starts.is_empty() {
        return Err(Error::Degenerate(
            "no active frames in the clean signal".into(),
        ));
    }
    let window = hann(frame_len);
    let windowed = |x: &[f64], s: usize| -> Vec<f64> {
        x[s..s + frame_len]
            .iter()
            .zip(&window)
            .map(|(v, w)| v * w)
            .collect()
    };
    let total: f64 = starts
        .iter()
        .map(|&s| {
            let rc = autocorrelation(&windowed(clean.samples(), s), cfg.lpc_order);
            let rp = autocorrelation(&windowed(processed.samples(), s), cfg.lpc_order);
            let ac = levinson(&rc);
            let ap = levinson(&rp);
            let num = toeplitz_quadratic(&ap, &rc);
            let den = toeplitz_quadratic(&ac, &rc);
            let value = (num / den).ln();
            if value.is_nan() {
                LLR_MAX
            } else {
                value.clamp(0.0, LLR_MAX)
            }
        })
        .sum();
    Ok(total / starts.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tests_support::{add_noise, speech_like};

    #[test]
    fn identical_signals_score_zero() {
        let x = speech_like(16000, 1);
        assert_eq!(llr(&x, &x, &MetricConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn strong_noise_raises_llr() {
        let x = speech_like(16000, 2);
        let y = add_noise(&x, -5.0, 3);
        let v = llr(&x, &y, &MetricConfig::default()).unwrap();
        assert!(v > 0.5, "{v}");
        assert!(v <= LLR_MAX);
    }

    #[test]
    fn clamped_at_two() {
        // a pure high tone against a pure low tone is far beyond the clamp
        let n = 8000;
        let lo: Vec<f64> = (0..n).map(|i| (i as f64 * 0.05).sin()).collect();
        let hi: Vec<f64> = (0..n).map(|i| (i as f64 * 2.9).sin()).collect();
        let a = Signal::new(lo, 16000).unwrap();
        let b = Signal::new(hi, 16000).unwrap();
        assert_eq!(llr(&a, &b, &MetricConfig::default()).unwrap(), LLR_MAX);
    }

    #[test]
    fn mismatches_rejected() {
        let a = Signal::zeros(1000, 16000).unwrap();
        let b = Signal::zeros(999, 16000).unwrap();
        assert!(llr(&a, &b, &MetricConfig::default()).is_err());
        let c = Signal::new(vec![0.1; 1000], 16000).unwrap();
        let cfg = MetricConfig {
            lpc_order: 600,
            ..Default::default()
        };
        assert!(llr(&c, &c, &cfg).is_err());
    }
}
