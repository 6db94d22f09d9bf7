//! Synthetic test material and corpus preparation: a harmonic speech proxy,
//! α-stable and white noise, and mixing at a target SNR.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::stable::sample_sas;

/// Frame and range used to find the active region of a clean signal when
/// mixing: 32 ms frames, 16 ms hop, within 40 dB of the loudest frame.
const MIX_FRAME_MS: f64 = 32.0;
const MIX_HOP_MS: f64 = 16.0;
pub const MIX_ACTIVE_RANGE_DB: f64 = 40.0;
/// Aspiration noise level relative to a unit-amplitude harmonic.
const ASPIRATION: f64 = 0.01;

/// Voiced "syllables" separated by short pauses. Each syllable is a
/// harmonic series on a gliding fundamental (100–220 Hz) with a -6 dB/octave
/// source tilt, shaped by three formant resonances of falling gain, plus weak
/// aspiration noise, all under a raised-cosine envelope. Peak-normalized to 0.5.
pub fn speech_proxy(sample_rate: u32, duration_s: f64, seed: u64) -> Result<Signal> {
    if duration_s.is_nan() || duration_s <= 0.0 {
        return Err(Error::InvalidArgument("duration must be positive".into()));
    }
    let fs = sample_rate as f64;
    let len = (duration_s * fs).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; len];
    let harmonic_cap = 0.45 * fs;

    let mut t0 = (rng.random_range(0.02..0.08) * fs) as usize;
    while t0 < len {
        let syl = (rng.random_range(0.12..0.26) * fs) as usize;
        let gap = (rng.random_range(0.05..0.16) * fs) as usize;
        let f_start = rng.random_range(100.0..220.0);
        let f_end = (f_start * rng.random_range(0.8..1.25_f64)).clamp(90.0, 240.0);
        let formants = [
            (rng.random_range(300.0..800.0), 80.0, 1.0),
            (rng.random_range(900.0..2200.0), 120.0, 0.5),
            (rng.random_range(2300.0..3200.0), 180.0, 0.25),
        ];
        let gain = rng.random_range(0.4..1.0);
        let mut phase = 0.0_f64;
        for i in 0..syl.min(len - t0) {
            let u = i as f64 / syl as f64;
            let f0 = f_start + (f_end - f_start) * u;
            phase += 2.0 * PI * f0 / fs;
            let env = (PI * u).sin().powi(2);
            let mut v = 0.0;
            let mut k = 1;
            while k as f64 * f0 < harmonic_cap {
                let fk = k as f64 * f0;
                let shape: f64 = formants
                    .iter()
                    .map(|&(fc, bw, g)| g / (1.0 + ((fk - fc) / bw).powi(2)))
                    .sum::<f64>()
                    + 0.05;
                v += shape / k as f64 * (k as f64 * phase).sin();
                k += 1;
            }
            let breath: f64 = StandardNormal.sample(&mut rng);
            x[t0 + i] = gain * env * (v + ASPIRATION * breath);
        }
        t0 += syl + gap;
    }
    let peak = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        for v in &mut x {
            *v *= 0.5 / peak;
        }
    }
    Signal::new(x, sample_rate)
}

/// Standard-normal white noise.
pub fn white_noise(len: usize, sample_rate: u32, seed: u64) -> Result<Signal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Signal::new(
        (0..len).map(|_| StandardNormal.sample(&mut rng)).collect(),
        sample_rate,
    )
}

/// Symmetric α-stable noise peak-normalized to 0.5.
pub fn stable_noise(alpha: f64, len: usize, sample_rate: u32, seed: u64) -> Result<Signal> {
    let mut x = sample_sas(alpha, len, seed)?;
    let peak = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        for v in &mut x {
            *v *= 0.5 / peak;
        }
    }
    Signal::new(x, sample_rate)
}

/// Sample mask of frames whose energy lies within `range_db` of the loudest
/// frame. Signals shorter than one frame are treated as a single frame.
pub fn active_mask(x: &Signal, range_db: f64) -> Vec<bool> {
    let fs = x.sample_rate() as f64;
    let frame = ((MIX_FRAME_MS * fs / 1000.0).round() as usize).clamp(1, x.len().max(1));
    let hop = ((MIX_HOP_MS * fs / 1000.0).round() as usize).max(1);
    let s = x.samples();
    let mut starts: Vec<usize> = (0..=s.len().saturating_sub(frame)).step_by(hop).collect();
    if let Some(&last) = starts.last() {
        if last + frame < s.len() {
            starts.push(s.len() - frame);
        }
    }
    let energies: Vec<f64> = starts
        .iter()
        .map(|&st| s[st..(st + frame).min(s.len())].iter().map(|v| v * v).sum())
        .collect();
    let peak = energies.iter().copied().fold(0.0, f64::max);
    let mut mask = vec![false; s.len()];
    if peak <= 0.0 {
        return mask;
    }
    let floor = peak * 10f64.powf(-range_db / 10.0);
    for (&st, &e) in starts.iter().zip(&energies) {
        if e >= floor {
            for m in &mut mask[st..(st + frame).min(s.len())] {
                *m = true;
            }
        }
    }
    mask
}

/// Mean power of `x` over the positions where `mask` is set.
pub fn masked_power(x: &[f64], mask: &[bool]) -> f64 {
    let (sum, count) = x
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .fold((0.0, 0usize), |(s, c), (v, _)| (s + v * v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// SNR of `clean` against `noise` measured over the active region of `clean`.
pub fn active_snr_db(clean: &Signal, noise: &Signal) -> Result<f64> {
    clean.check_compatible(noise)?;
    let mask = active_mask(clean, MIX_ACTIVE_RANGE_DB);
    Ok(
        10.0 * (masked_power(clean.samples(), &mask) / masked_power(noise.samples(), &mask))
            .log10(),
    )
}

/// Cuts `noise` to `len` samples: a seeded random-offset crop if it is
/// longer, otherwise repeated from the start.
pub fn fit_noise(noise: &Signal, len: usize, seed: u64) -> Result<Signal> {
    if noise.is_empty() && len > 0 {
        return Err(Error::Degenerate("noise signal is empty".into()));
    }
    let s = noise.samples();
    let out = if s.len() >= len {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offset = rng.random_range(0..=s.len() - len);
        s[offset..offset + len].to_vec()
    } else {
        s.iter().cycle().take(len).copied().collect()
    };
    Signal::new(out, noise.sample_rate())
}

/// Adds `noise` to `clean`, scaled so the SNR over the clean signal's active
/// region equals `snr_db`. Returns the mixture and the scaled noise. The
/// mixture is not clipped.
pub fn mix_at_snr(
    clean: &Signal,
    noise: &Signal,
    snr_db: f64,
    seed: u64,
) -> Result<(Signal, Signal)> {
    if clean.sample_rate() != noise.sample_rate() {
        return Err(Error::RateMismatch(
            clean.sample_rate(),
            noise.sample_rate(),
        ));
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidArgument("snr must be finite".into()));
    }
    let noise = fit_noise(noise, clean.len(), seed)?;
    let mask = active_mask(clean, MIX_ACTIVE_RANGE_DB);
    let p_clean = masked_power(clean.samples(), &mask);
    let p_noise = masked_power(noise.samples(), &mask);
    if p_clean <= 0.0 {
        return Err(Error::Degenerate("clean signal is silent".into()));
    }
    if p_noise <= 0.0 {
        return Err(Error::Degenerate(
            "noise is silent over the clean active region".into(),
        ));
    }
    let gain = (p_clean / (p_noise * 10f64.powf(snr_db / 10.0))).sqrt();
    let scaled = noise.scaled(gain)?;
    let mix = clean
        .samples()
        .iter()
        .zip(scaled.samples())
        .map(|(c, n)| c + n)
        .collect();
    Ok((Signal::new(mix, clean.sample_rate())?, scaled))
}
