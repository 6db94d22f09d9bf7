use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::MetricConfig;
use crate::error::{Error, Result};
use crate::signal::{resample, Signal};

const EPS: f64 = f64::EPSILON;
const MIN_DURATION_S: f64 = 0.5;

/// Hann of length `n + 2` with both zero endpoints removed.
fn inner_hann(n: usize) -> Vec<f64> {
    let m = (n + 1) as f64;
    (1..=n)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / m).cos()))
        .collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Drops frames of `x` more than `range_db` below its loudest frame, and the
/// same frames of `y`, then overlap-adds what is left.
fn remove_silent_frames(
    x: &[f64],
    y: &[f64],
    range_db: f64,
    frame: usize,
    hop: usize,
) -> (Vec<f64>, Vec<f64>) {
    if x.len() < frame {
        return (Vec::new(), Vec::new());
    }
    let w = inner_hann(frame);
    let starts: Vec<usize> = (0..=x.len() - frame).step_by(hop).collect();
    let windowed = |s: &[f64], st: usize| -> Vec<f64> {
        s[st..st + frame]
            .iter()
            .zip(&w)
            .map(|(a, b)| a * b)
            .collect()
    };
    let energies: Vec<f64> = starts
        .iter()
        .map(|&st| 20.0 * (norm(&windowed(x, st)) + EPS).log10())
        .collect();
    let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let kept: Vec<usize> = starts
        .iter()
        .zip(&energies)
        .filter(|&(_, &e)| max - range_db - e < 0.0)
        .map(|(&st, _)| st)
        .collect();
    if kept.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let out_len = (kept.len() - 1) * hop + frame;
    let mut xs = vec![0.0; out_len];
    let mut ys = vec![0.0; out_len];
    for (i, &st) in kept.iter().enumerate() {
        let off = i * hop;
        for (k, (a, b)) in windowed(x, st).into_iter().zip(windowed(y, st)).enumerate() {
            xs[off + k] += a;
            ys[off + k] += b;
        }
    }
    (xs, ys)
}

/// One-third octave band matrix: band `i` sums FFT bins `[lo_i, hi_i)`, with
/// edges snapped to the nearest bin.
fn third_octave_bands(
    rate: u32,
    fft_len: usize,
    bands: usize,
    min_freq: f64,
) -> Vec<(usize, usize)> {
    let bins = fft_len / 2 + 1;
    let freqs: Vec<f64> = (0..bins)
        .map(|k| k as f64 * rate as f64 / fft_len as f64)
        .collect();
    let nearest = |target: f64| -> usize {
        (0..bins)
            .min_by(|&a, &b| {
                (freqs[a] - target)
                    .abs()
                    .total_cmp(&(freqs[b] - target).abs())
            })
            .unwrap_or(0)
    };
    (0..bands)
        .map(|k| {
            let k = k as f64;
            let lo = min_freq * 2f64.powf((2.0 * k - 1.0) / 6.0);
            let hi = min_freq * 2f64.powf((2.0 * k + 1.0) / 6.0);
            (nearest(lo), nearest(hi))
        })
        .collect()
}

/// Band envelopes `[band][frame]` of a short-time spectrum.
fn band_envelopes(x: &[f64], cfg: &MetricConfig, bands: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let frame = cfg.stoi_frame;
    let hop = frame / 2;
    let w = inner_hann(frame);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(cfg.stoi_fft);
    let starts: Vec<usize> = if x.len() > frame {
        (0..x.len() - frame).step_by(hop).collect()
    } else {
        Vec::new()
    };
    let mut env = vec![Vec::with_capacity(starts.len()); bands.len()];
    let mut buf = vec![Complex::new(0.0, 0.0); cfg.stoi_fft];
    for &st in &starts {
        buf.fill(Complex::new(0.0, 0.0));
        for (b, (v, wv)) in buf.iter_mut().zip(x[st..st + frame].iter().zip(&w)) {
            b.re = v * wv;
        }
        fft.process(&mut buf);
        for (band, &(lo, hi)) in env.iter_mut().zip(bands) {
            band.push(buf[lo..hi].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
        }
    }
    env
}

/// Short-time objective intelligibility of `processed` against `clean`,
/// clamped to `[0, 1]`.
///
/// Both signals are resampled to 10 kHz, silent frames (40 dB below the
/// loudest clean frame) are removed, and one-third octave band envelopes
/// over 384 ms segments are compared by correlation after normalizing and
/// clipping the processed envelope at -15 dB signal-to-distortion.
pub fn stoi(clean: &Signal, processed: &Signal, cfg: &MetricConfig) -> Result<f64> {
    clean.check_compatible(processed)?;
    if clean.duration_secs() < MIN_DURATION_S {
        return Err(Error::InvalidArgument(format!(
            "stoi needs at least {MIN_DURATION_S} s of audio, got {:.3} s",
            clean.duration_secs()
        )));
    }
    let x = resample(clean, cfg.stoi_rate)?;
    let y = resample(processed, cfg.stoi_rate)?;
    let (x, y) = remove_silent_frames(
        x.samples(),
        y.samples(),
        cfg.stoi_dyn_range_db,
        cfg.stoi_frame,
        cfg.stoi_frame / 2,
    );
    let bands = third_octave_bands(
        cfg.stoi_rate,
        cfg.stoi_fft,
        cfg.stoi_bands,
        cfg.stoi_min_freq,
    );
    let xe = band_envelopes(&x, cfg, &bands);
    let ye = band_envelopes(&y, cfg, &bands);
    let frames = xe.first().map_or(0, Vec::len);
    let seg = cfg.stoi_segment;
    if frames < seg {
        return Err(Error::Degenerate(format!(
            "only {frames} non-silent frames, stoi needs at least {seg}"
        )));
    }
    let clip = 1.0 + 10f64.powf(-cfg.stoi_beta_db / 20.0);

    let mut total = 0.0;
    let mut count = 0usize;
    for end in seg..=frames {
        for (xb, yb) in xe.iter().zip(&ye) {
            let xs = &xb[end - seg..end];
            let ys = &yb[end - seg..end];
            let scale = norm(xs) / (norm(ys) + EPS);
            let mut yp: Vec<f64> = xs
                .iter()
                .zip(ys)
                .map(|(a, b)| (b * scale).min(a * clip))
                .collect();
            let mut xc = xs.to_vec();
            for v in [&mut yp, &mut xc] {
                let mean = v.iter().sum::<f64>() / seg as f64;
                v.iter_mut().for_each(|e| *e -= mean);
                let n = norm(v) + EPS;
                v.iter_mut().for_each(|e| *e /= n);
            }
            total += yp.iter().zip(&xc).map(|(a, b)| a * b).sum::<f64>();
            count += 1;
        }
    }
    Ok((total / count as f64).clamp(0.0, 1.0))
}
