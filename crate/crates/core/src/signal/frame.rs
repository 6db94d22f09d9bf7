use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Overlap sums below this value are treated as uncovered and emitted as 0.
pub const OLA_FLOOR: f64 = 1e-8;

/// Regular grid of overlapping frames laid over a signal of `total_len`
/// samples. Frame `q` covers `[q * step, q * step + frame_len)`; anything past
/// `total_len` is zero padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameGrid {
    frame_len: usize,
    step: usize,
    count: usize,
    total_len: usize,
}

pub fn frame_grid(total_len: usize, frame_len: usize, step: usize) -> Result<FrameGrid> {
    if frame_len == 0 {
        return Err(Error::InvalidArgument(
            "frame length must be positive".into(),
        ));
    }
    if step == 0 || step > frame_len {
        return Err(Error::InvalidArgument(format!(
            "frame step must be in 1..={frame_len}, got {step}"
        )));
    }
    Ok(FrameGrid {
        frame_len,
        step,
        count: total_len.div_ceil(step),
        total_len,
    })
}

impl FrameGrid {
    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn total_len(&self) -> usize {
        self.total_len
    }

    pub fn start(&self, q: usize) -> usize {
        q * self.step
    }

    /// Number of frame samples that fall inside the signal (the rest is padding).
    pub fn valid_len(&self, q: usize) -> usize {
        self.total_len
            .saturating_sub(self.start(q))
            .min(self.frame_len)
    }

    /// Signal samples covered by frame `q`, without padding.
    pub fn valid_slice<'a>(&self, samples: &'a [f64], q: usize) -> &'a [f64] {
        let start = self.start(q).min(samples.len());
        &samples[start..start + self.valid_len(q).min(samples.len() - start)]
    }

    /// Frame `q` of `samples`, zero-padded to `frame_len`.
    pub fn extract(&self, samples: &[f64], q: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.frame_len];
        let valid = self.valid_slice(samples, q);
        out[..valid.len()].copy_from_slice(valid);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    #[default]
    Hann,
    Rectangular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    kind: WindowKind,
    values: Vec<f64>,
}

impl Window {
    /// Hann is sampled at half-integer positions,
    /// `w(n) = 0.5 * (1 - cos(2π (n + 0.5) / N))`. The window stays symmetric,
    /// its endpoints are strictly positive, and shifts by any hop dividing
    /// `N / 2` sum to exactly `N / (2 * hop)`.
    pub fn new(kind: WindowKind, len: usize) -> Self {
        let values = match kind {
            WindowKind::Rectangular => vec![1.0; len],
            WindowKind::Hann => {
                let n = len as f64;
                (0..len)
                    .map(|i| 0.5 * (1.0 - (2.0 * PI * (i as f64 + 0.5) / n).cos()))
                    .collect()
            }
        };
        Self { kind, values }
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Multiplies `frame` by the window in place.
    pub fn apply(&self, frame: &mut [f64]) {
        for (x, w) in frame.iter_mut().zip(&self.values) {
            *x *= w;
        }
    }
}

fn check_window(grid: &FrameGrid, window: &Window) -> Result<()> {
    if window.len() != grid.frame_len() {
        return Err(Error::InvalidArgument(format!(
            "window length {} does not match frame length {}",
            window.len(),
            grid.frame_len()
        )));
    }
    Ok(())
}

/// Pointwise window-overlap sum `P(t) = Σ_q w(t - q·step)` over the grid.
pub fn overlap_sum(grid: &FrameGrid, window: &Window) -> Result<Vec<f64>> {
    check_window(grid, window)?;
    let mut sum = vec![0.0; grid.total_len()];
    for q in 0..grid.count() {
        let start = grid.start(q);
        let valid = grid.valid_len(q);
        for (acc, w) in sum[start..start + valid].iter_mut().zip(window.values()) {
            *acc += w;
        }
    }
    Ok(sum)
}

/// Reassembles windowed frames into a signal of `grid.total_len()` samples,
/// dividing each output sample by the overlap sum at that position.
///
/// Frames are accumulated in ascending order so the result does not depend
/// on how the frames were produced.
pub fn overlap_add(frames: &[Vec<f64>], grid: &FrameGrid, window: &Window) -> Result<Vec<f64>> {
    if frames.len() != grid.count() {
        return Err(Error::InvalidArgument(format!(
            "expected {} frames, got {}",
            grid.count(),
            frames.len()
        )));
    }
    if let Some(bad) = frames.iter().find(|f| f.len() != grid.frame_len()) {
        return Err(Error::LengthMismatch {
            expected: grid.frame_len(),
            actual: bad.len(),
        });
    }
    let norm = overlap_sum(grid, window)?;
    let mut out = vec![0.0; grid.total_len()];
    for (q, frame) in frames.iter().enumerate() {
        let start = grid.start(q);
        let valid = grid.valid_len(q);
        for (acc, x) in out[start..start + valid].iter_mut().zip(frame) {
            *acc += x;
        }
    }
    for (y, p) in out.iter_mut().zip(&norm) {
        *y = if *p < OLA_FLOOR { 0.0 } else { *y / p };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        assert_eq!(frame_grid(38400, 10240, 128).unwrap().count(), 300);
        assert_eq!(frame_grid(10240, 10240, 10240).unwrap().count(), 1);
        assert_eq!(frame_grid(10, 4, 3).unwrap().count(), 4);
        assert!(frame_grid(100, 10, 11).is_err());
        assert!(frame_grid(100, 0, 1).is_err());
        assert!(frame_grid(100, 10, 0).is_err());
    }

    #[test]
    fn grid_covers_every_sample() {
        for &(total, frame, step) in &[
            (1000, 64, 16),
            (1001, 64, 64),
            (5, 8, 3),
            (38400, 10240, 128),
        ] {
            let grid = frame_grid(total, frame, step).unwrap();
            let mut covered = vec![false; total];
            for q in 0..grid.count() {
                let s = grid.start(q);
                for c in &mut covered[s..s + grid.valid_len(q)] {
                    *c = true;
                }
            }
            assert!(covered.iter().all(|&c| c), "{total}/{frame}/{step}");
            // minimality
            assert!((grid.count() - 1) * step < total);
        }
    }

    #[test]
    fn extract_pads_tail() {
        let grid = frame_grid(5, 4, 2).unwrap();
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(grid.extract(&x, 0), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(grid.extract(&x, 2), vec![5.0, 0.0, 0.0, 0.0]);
        assert_eq!(grid.valid_slice(&x, 1), &[3.0, 4.0, 5.0]);
    }

    #[test]
    fn hann_shape() {
        let w = Window::new(WindowKind::Hann, 256);
        let v = w.values();
        for i in 0..128 {
            assert!((v[i] - v[255 - i]).abs() < 1e-15);
        }
        assert!(v[0] > 0.0);
        let argmax = (0..256).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        assert!(argmax == 127 || argmax == 128);
    }

    #[test]
    fn hann_interior_overlap_sum_is_forty() {
        let grid = frame_grid(38400, 10240, 128).unwrap();
        let p = overlap_sum(&grid, &Window::new(WindowKind::Hann, 10240)).unwrap();
        // interior: every position covered by all 80 frames
        for &t in &[10240, 12345, 20000, 38399] {
            assert!((p[t] - 40.0).abs() < 1e-9, "P({t}) = {}", p[t]);
        }
        assert!(p[0] >= OLA_FLOOR);
    }

    #[test]
    fn rectangular_partition_is_identity() {
        let x: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let grid = frame_grid(12, 4, 4).unwrap();
        let w = Window::new(WindowKind::Rectangular, 4);
        let frames: Vec<_> = (0..grid.count()).map(|q| grid.extract(&x, q)).collect();
        assert_eq!(overlap_add(&frames, &grid, &w).unwrap(), x);
    }

    #[test]
    fn constant_signal_reassembles() {
        let grid = frame_grid(4096, 512, 64).unwrap();
        let w = Window::new(WindowKind::Hann, 512);
        let ones = vec![1.0; 4096];
        let frames: Vec<_> = (0..grid.count())
            .map(|q| {
                let mut f = grid.extract(&ones, q);
                w.apply(&mut f);
                f
            })
            .collect();
        let y = overlap_add(&frames, &grid, &w).unwrap();
        let err = y.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "max err {err}");
    }

    #[test]
    fn frame_count_mismatch() {
        let grid = frame_grid(100, 10, 5).unwrap();
        let w = Window::new(WindowKind::Hann, 10);
        assert!(overlap_add(&[vec![0.0; 10]], &grid, &w).is_err());
        assert!(overlap_sum(&grid, &Window::new(WindowKind::Hann, 9)).is_err());
    }
}
