use std::f64::consts::PI;

use super::Signal;
use crate::error::{Error, Result};

/// Kaiser-windowed sinc kernel parameters. The cutoff sits at 0.45 of the
/// lower rate, leaving 0.4..0.5 as the transition band.
const CUTOFF: f64 = 0.45;
const ZERO_CROSSINGS: f64 = 32.0;
const KAISER_BETA: f64 = 9.0;
const MAX_CACHED_PHASES: u64 = 4096;

/// Band-limited rate conversion by windowed-sinc interpolation.
///
/// The output has `round(len * target / source)` samples. For rational ratios
/// with a small numerator the per-phase kernels are computed once and reused.
pub fn resample(signal: &Signal, target_rate: u32) -> Result<Signal> {
    if target_rate == 0 {
        return Err(Error::InvalidArgument(
            "target rate must be positive".into(),
        ));
    }
    let source_rate = signal.sample_rate();
    if target_rate == source_rate {
        return Ok(signal.clone());
    }
    let x = signal.samples();
    let out_len = (x.len() as f64 * target_rate as f64 / source_rate as f64).round() as usize;

    let g = gcd(source_rate as u64, target_rate as u64);
    let up = target_rate as u64 / g;
    let down = source_rate as u64 / g;

    // cutoff in cycles per input sample
    let fc = CUTOFF * (target_rate.min(source_rate) as f64) / source_rate as f64;
    let half_width = ZERO_CROSSINGS / (2.0 * fc);
    let kernel = Kernel { fc, half_width };

    let mut cache: Vec<Option<(isize, Vec<f64>)>> = if up <= MAX_CACHED_PHASES {
        vec![None; up as usize]
    } else {
        Vec::new()
    };

    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len as u64 {
        // output instant n lands at input position (n * down) / up
        let whole = (n * down / up) as isize;
        let phase = n * down % up;
        let frac = phase as f64 / up as f64;
        let value = if cache.is_empty() {
            let (first, taps) = kernel.taps(frac);
            dot(x, whole + first, &taps)
        } else {
            let slot = &mut cache[phase as usize];
            let (first, taps) = slot.get_or_insert_with(|| kernel.taps(frac));
            dot(x, whole + *first, taps)
        };
        out.push(value);
    }
    Signal::new(out, target_rate)
}

struct Kernel {
    fc: f64,
    half_width: f64,
}

impl Kernel {
    /// Taps for an output instant `frac` input samples past an integer index,
    /// returned with the offset of the first tap. Normalized to unit DC gain.
    fn taps(&self, frac: f64) -> (isize, Vec<f64>) {
        let first = (frac - self.half_width).ceil() as isize;
        let last = (frac + self.half_width).floor() as isize;
        let i0 = bessel_i0(KAISER_BETA);
        let mut taps: Vec<f64> = (first..=last)
            .map(|k| {
                let tau = frac - k as f64;
                let r = tau / self.half_width;
                let win = if r.abs() >= 1.0 {
                    0.0
                } else {
                    bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / i0
                };
                2.0 * self.fc * sinc(2.0 * self.fc * tau) * win
            })
            .collect();
        let sum: f64 = taps.iter().sum();
        for t in &mut taps {
            *t /= sum;
        }
        (first, taps)
    }
}

fn dot(x: &[f64], start: isize, taps: &[f64]) -> f64 {
    taps.iter()
        .enumerate()
        .filter_map(|(j, t)| {
            let idx = start + j as isize;
            (idx >= 0 && (idx as usize) < x.len()).then(|| t * x[idx as usize])
        })
        .sum()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
