use super::extrema::Extremum;
use crate::error::{Error, Result};

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone)]
pub(crate) struct NaturalSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl NaturalSpline {
    pub(crate) fn fit(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let k = xs.len();
        if k < 2 || ys.len() != k {
            return Err(Error::Degenerate(format!(
                "spline needs at least 2 knots, got {k}"
            )));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "spline knots must be strictly increasing".into(),
            ));
        }
        let mut m = vec![0.0; k];
        if k > 2 {
            // Thomas algorithm on the interior equations
            //   h[i-1] m[i-1] + 2 (h[i-1] + h[i]) m[i] + h[i] m[i+1] = 6 (d[i] - d[i-1])
            let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
            let d: Vec<f64> = (0..k - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
            let n = k - 2;
            let mut c_prime = vec![0.0; n];
            let mut r_prime = vec![0.0; n];
            for row in 0..n {
                let i = row + 1;
                let diag = 2.0 * (h[i - 1] + h[i]);
                let sub = h[i - 1];
                let sup = h[i];
                let rhs = 6.0 * (d[i] - d[i - 1]);
                if row == 0 {
                    c_prime[row] = sup / diag;
                    r_prime[row] = rhs / diag;
                } else {
                    let denom = diag - sub * c_prime[row - 1];
                    c_prime[row] = sup / denom;
                    r_prime[row] = (rhs - sub * r_prime[row - 1]) / denom;
                }
            }
            for row in (0..n).rev() {
                let next = if row + 1 < n { m[row + 2] } else { 0.0 };
                m[row + 1] = r_prime[row] - c_prime[row] * next;
            }
        }
        Ok(Self { xs, ys, m })
    }

    /// Evaluates at `0, 1, .., len - 1`, extrapolating the end cubics if the
    /// knots do not cover that range.
    pub(crate) fn sample(&self, len: usize) -> Vec<f64> {
        let last_seg = self.xs.len() - 2;
        let mut seg = 0;
        (0..len)
            .map(|t| {
                let t = t as f64;
                while seg < last_seg && t > self.xs[seg + 1] {
                    seg += 1;
                }
                self.eval_segment(seg, t)
            })
            .collect()
    }

    fn eval_segment(&self, i: usize, t: f64) -> f64 {
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }
}

/// Cubic-spline envelope through `points` sampled on `[0, length)`.
///
/// Before fitting, up to `pad` points nearest each end are reflected about
/// the first (index 0) and last (index `length - 1`) sample to tame the
/// spline's end swing.
pub fn envelope(points: &[Extremum], length: usize, pad: usize) -> Result<Vec<f64>> {
    if length == 0 {
        return Ok(Vec::new());
    }
    let last = (length - 1) as f64;
    let left = points
        .iter()
        .take(pad)
        .rev()
        .map(|p| (-(p.index as f64), p.value));
    let right = points
        .iter()
        .rev()
        .take(pad)
        .map(|p| (2.0 * last - p.index as f64, p.value));
    let (xs, ys): (Vec<f64>, Vec<f64>) = left
        .chain(points.iter().map(|p| (p.index as f64, p.value)))
        .chain(right)
        .unzip();
    if xs.len() < 2 {
        return Err(Error::Degenerate(format!(
            "envelope needs at least 2 points after mirroring, got {}",
            xs.len()
        )));
    }
    Ok(NaturalSpline::fit(xs, ys)?.sample(length))
}
