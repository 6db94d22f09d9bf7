//! Objective quality and intelligibility measures: log-likelihood ratio,
//! frequency-weighted segmental SNR and STOI, plus the logistic mapping from
//! an objective score to a predicted intelligibility percentage.

mod fwsnrseg;
mod llr;
pub mod lpc;
mod stoi;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use fwsnrseg::{fwsnrseg, FWSNR_CEIL_DB, FWSNR_FLOOR_DB};
pub use llr::{llr, LLR_MAX};
pub use stoi::stoi;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Logistic coefficients mapping STOI to intelligibility.
pub const STOI_MAP: (f64, f64) = (-13.45, 9.36);
/// Logistic coefficients mapping CSII to intelligibility.
pub const CSII_MAP: (f64, f64) = (-10.09, 4.65);

/// `100 / (1 + exp(a·d + b))`.
pub fn map_intelligibility(d: f64, a: f64, b: f64) -> f64 {
    100.0 / (1.0 + (a * d + b).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Frame length for LLR and fwSNRseg, in milliseconds.
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub lpc_order: usize,
    /// Frames whose clean energy is more than this many dB below the loudest
    /// frame are ignored by LLR and fwSNRseg.
    pub active_range_db: f64,
    pub stoi_rate: u32,
    pub stoi_frame: usize,
    pub stoi_fft: usize,
    pub stoi_bands: usize,
    pub stoi_min_freq: f64,
    pub stoi_segment: usize,
    /// Lower signal-to-distortion bound used for clipping, in dB.
    pub stoi_beta_db: f64,
    pub stoi_dyn_range_db: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            frame_ms: 32.0,
            hop_ms: 16.0,
            lpc_order: 16,
            active_range_db: 40.0,
            stoi_rate: 10_000,
            stoi_frame: 256,
            stoi_fft: 512,
            stoi_bands: 15,
            stoi_min_freq: 150.0,
            stoi_segment: 30,
            stoi_beta_db: -15.0,
            stoi_dyn_range_db: 40.0,
        }
    }
}

impl MetricConfig {
    pub(crate) fn frame_samples(&self, rate: u32) -> (usize, usize) {
        let len = (self.frame_ms * rate as f64 / 1000.0).round() as usize;
        let hop = (self.hop_ms * rate as f64 / 1000.0).round() as usize;
        (len, hop.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Llr,
    FwSnrSeg,
    Stoi,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Llr, Metric::FwSnrSeg, Metric::Stoi];
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Llr => "llr",
            Metric::FwSnrSeg => "fwsnrseg",
            Metric::Stoi => "stoi",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "llr" => Ok(Metric::Llr),
            "fwsnrseg" => Ok(Metric::FwSnrSeg),
            "stoi" => Ok(Metric::Stoi),
            other => Err(Error::InvalidArgument(format!(
                "unknown metric '{other}' (expected llr, fwsnrseg or stoi)"
            ))),
        }
    }
}

/// Metric values for one clean/processed pair. Unselected metrics are absent
/// from the serialized object.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub llr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwsnrseg_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stoi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stoi_pct: Option<f64>,
    /// Filled only when an externally computed CSII value is mapped in.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csii_pct: Option<f64>,
}

impl MetricReport {
    pub fn with_csii(mut self, csii: f64) -> Self {
        self.csii_pct = Some(map_intelligibility(csii, CSII_MAP.0, CSII_MAP.1));
        self
    }
}

pub fn evaluate(
    clean: &Signal,
    processed: &Signal,
    metrics: &[Metric],
    cfg: &MetricConfig,
) -> Result<MetricReport> {
    clean.check_compatible(processed)?;
    let mut report = MetricReport::default();
    for metric in metrics {
        match metric {
            Metric::Llr => report.llr = Some(llr(clean, processed, cfg)?),
            Metric::FwSnrSeg => report.fwsnrseg_db = Some(fwsnrseg(clean, processed, cfg)?),
            Metric::Stoi => {
                let d = stoi(clean, processed, cfg)?;
                report.stoi = Some(d);
                report.stoi_pct = Some(map_intelligibility(d, STOI_MAP.0, STOI_MAP.1));
            }
        }
    }
    Ok(report)
}

/// Start offsets of full frames and the frames that count as active, i.e.
/// whose clean energy is within `range_db` of the loudest frame.
pub(crate) fn active_frames(
    clean: &[f64],
    frame_len: usize,
    hop: usize,
    range_db: f64,
) -> Vec<usize> {
    if frame_len == 0 || clean.len() < frame_len {
        return Vec::new();
    }
    let starts: Vec<usize> = (0..=clean.len() - frame_len).step_by(hop).collect();
    let energies: Vec<f64> = starts
        .iter()
        .map(|&s| clean[s..s + frame_len].iter().map(|v| v * v).sum())
        .collect();
    let peak = energies.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Vec::new();
    }
    let floor = peak * 10f64.powf(-range_db / 10.0);
    starts
        .into_iter()
        .zip(energies)
        .filter(|&(_, e)| e >= floor)
        .map(|(s, _)| s)
        .collect()
}

/// Symmetric Hann used for analysis frames.
pub(crate) fn hann(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (len - 1) as f64).cos()))
        .collect()
}
