use std::io::{self, Write};

use super::{select_cut, threshold, EnhanceConfig};
use crate::error::{Error, Result};

/// Per-frame α of every mode, α of the noisy frame, and the resulting
/// thresholds and cut indices once [`AlphaProfile::select`] has run.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaProfile {
    num_modes: usize,
    /// `per_mode[q][m]`: α of mode `m + 1` in frame `q`.
    per_mode: Vec<Vec<f64>>,
    noisy: Vec<f64>,
    thresholds: Vec<f64>,
    cut_index: Vec<usize>,
}

impl AlphaProfile {
    pub fn new(num_modes: usize, per_mode: Vec<Vec<f64>>, noisy: Vec<f64>) -> Self {
        debug_assert_eq!(per_mode.len(), noisy.len());
        debug_assert!(per_mode.iter().all(|r| r.len() == num_modes));
        Self {
            num_modes,
            per_mode,
            noisy,
            thresholds: Vec::new(),
            cut_index: Vec::new(),
        }
    }

    pub fn num_frames(&self) -> usize {
        self.noisy.len()
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn per_mode(&self) -> &[Vec<f64>] {
        &self.per_mode
    }

    pub fn noisy(&self) -> &[f64] {
        &self.noisy
    }

    /// Empty until thresholds are computed by [`AlphaProfile::select`].
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Empty until cuts are set.
    pub fn cut_index(&self) -> &[usize] {
        &self.cut_index
    }

    /// Computes every frame's threshold from its noisy α and the resulting cut.
    pub fn select(&mut self, cfg: &EnhanceConfig) {
        self.thresholds = self.noisy.iter().map(|&a| threshold(a, cfg)).collect();
        self.cut_index = self
            .per_mode
            .iter()
            .zip(&self.thresholds)
            .map(|(alphas, &rho)| select_cut(alphas, rho))
            .collect();
    }

    /// Keeps every mode in every frame.
    pub fn keep_all(&mut self) {
        self.cut_index = vec![self.num_modes; self.num_frames()];
    }

    pub fn set_cuts(&mut self, cuts: Vec<usize>) -> Result<()> {
        if cuts.len() != self.num_frames() {
            return Err(Error::LengthMismatch {
                expected: self.num_frames(),
                actual: cuts.len(),
            });
        }
        if cuts.iter().any(|&z| z > self.num_modes) {
            return Err(Error::InvalidArgument(format!(
                "cut index above mode count {}",
                self.num_modes
            )));
        }
        self.cut_index = cuts;
        Ok(())
    }

    /// Mean α of each mode over all frames.
    pub fn mean_per_mode(&self) -> Vec<f64> {
        let q = self.num_frames().max(1) as f64;
        (0..self.num_modes)
            .map(|m| self.per_mode.iter().map(|r| r[m]).sum::<f64>() / q)
            .collect()
    }

    /// CSV with one row per frame:
    /// `frame,alpha_1,..,alpha_M,alpha_u,rho,z`. The last two columns are
    /// empty if selection has not run.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "frame")?;
        for m in 1..=self.num_modes {
            write!(out, ",alpha_{m}")?;
        }
        writeln!(out, ",alpha_u,rho,z")?;
        for (q, row) in self.per_mode.iter().enumerate() {
            write!(out, "{q}")?;
            for a in row {
                write!(out, ",{a:.6}")?;
            }
            write!(out, ",{:.6}", self.noisy[q])?;
            match self.thresholds.get(q) {
                Some(rho) => write!(out, ",{rho:.6}")?,
                None => write!(out, ",")?,
            }
            match self.cut_index.get(q) {
                Some(z) => writeln!(out, ",{z}")?,
                None => writeln!(out, ",")?,
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }
}
