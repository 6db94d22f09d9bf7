use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{active_frames, hann, MetricConfig};
use crate::error::{Error, Result};
use crate::signal::Signal;

pub const FWSNR_FLOOR_DB: f64 = -10.0;
pub const FWSNR_CEIL_DB: f64 = 35.0;
const NUM_BANDS: usize = 25;
const LOW_EDGE_HZ: f64 = 50.0;
const WEIGHT_EXPONENT: f64 = 0.2;

fn hz_to_bark(f: f64) -> f64 {
    26.81 * f / (1960.0 + f) - 0.53
}

fn bark_to_hz(z: f64) -> f64 {
    1960.0 * (z + 0.53) / (26.28 - z)
}

/// `NUM_BANDS` triangular filters over FFT bins `0..=fft_len/2`, equally
/// spaced on the Bark scale between 50 Hz and Nyquist.
fn band_filters(rate: u32, fft_len: usize) -> Vec<Vec<f64>> {
    let nyquist = rate as f64 / 2.0;
    let lo = hz_to_bark(LOW_EDGE_HZ);
    let hi = hz_to_bark(nyquist);
    let edges: Vec<f64> = (0..NUM_BANDS + 2)
        .map(|i| bark_to_hz(lo + (hi - lo) * i as f64 / (NUM_BANDS + 1) as f64))
        .collect();
    let bins = fft_len / 2 + 1;
    let bin_hz = rate as f64 / fft_len as f64;
    (0..NUM_BANDS)
        .map(|j| {
            let (l, c, r) = (edges[j], edges[j + 1], edges[j + 2]);
            (0..bins)
                .map(|k| {
                    let f = k as f64 * bin_hz;
                    if f <= l || f >= r {
                        0.0
                    } else if f <= c {
                        (f - l) / (c - l)
                    } else {
                        (r - f) / (r - c)
                    }
                })
                .collect()
        })
        .collect()
}

fn band_snr_db(clean: f64, processed: f64) -> f64 {
    let diff = clean - processed;
    if diff == 0.0 {
        return FWSNR_CEIL_DB;
    }
    (10.0 * (clean * clean / (diff * diff)).log10()).clamp(FWSNR_FLOOR_DB, FWSNR_CEIL_DB)
}

/// Frequency-weighted segmental SNR in dB.
///
/// Each active frame's magnitude spectrum is pooled into 25 triangular
/// critical bands; band `j` scores `10·log10(X_j² / (X_j - X̂_j)²)` clamped to
/// `[-10, 35]` and is weighted by `X_j^0.2`. Frame scores are averaged.
pub fn fwsnrseg(clean: &Signal, processed: &Signal, cfg: &MetricConfig) -> Result<f64> {
    clean.check_compatible(processed)?;
    let rate = clean.sample_rate();
    let (frame_len, hop) = cfg.frame_samples(rate);
    let starts = active_frames(clean.samples(), frame_len, hop, cfg.active_range_db);
    if starts.is_empty() {
        return Err(Error::Degenerate(
            "no active frames in the clean signal".into(),
        ));
    }
    let fft_len = frame_len.next_power_of_two();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(fft_len);
    let filters = band_filters(rate, fft_len);
    let window = hann(frame_len);

    let band_energies = |x: &[f64], s: usize| -> Vec<f64> {
        let mut buf = vec![Complex::new(0.0, 0.0); fft_len];
        for (b, (v, w)) in buf.iter_mut().zip(x[s..s + frame_len].iter().zip(&window)) {
            b.re = v * w;
        }
        fft.process(&mut buf);
        let mag: Vec<f64> = buf[..fft_len / 2 + 1].iter().map(|c| c.norm()).collect();
        filters
            .iter()
            .map(|f| f.iter().zip(&mag).map(|(w, m)| w * m).sum())
            .collect()
    };

    let mut total = 0.0;
    for &s in &starts {
        let xc = band_energies(clean.samples(), s);
        let xp = band_energies(processed.samples(), s);
        let (mut num, mut den) = (0.0, 0.0);
        for (c, p) in xc.iter().zip(&xp) {
            if *c <= 0.0 {
                continue;
            }
            let w = c.powf(WEIGHT_EXPONENT);
            num += w * band_snr_db(*c, *p);
            den += w;
        }
        total += if den > 0.0 { num / den } else { FWSNR_FLOOR_DB };
    }
    Ok(total / starts.len() as f64)
}
