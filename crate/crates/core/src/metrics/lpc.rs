/// Autocorrelation lags `0..=order` of `x`.
pub fn autocorrelation(x: &[f64], order: usize) -> Vec<f64> {
    (0..=order)
        .map(|lag| {
            if lag >= x.len() {
                0.0
            } else {
                x[..x.len() - lag]
                    .iter()
                    .zip(&x[lag..])
                    .map(|(a, b)| a * b)
                    .sum()
            }
        })
        .collect()
}

/// Levinson–Durbin recursion. Returns the prediction-error filter
/// `[1, a_1, .., a_p]` such that `Σ_k a_k x[n-k]` is the prediction residual.
/// A zero-energy input, or a recursion that loses positive error, leaves the
/// remaining coefficients at zero.
pub fn levinson(r: &[f64]) -> Vec<f64> {
    let order = r.len().saturating_sub(1);
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut err = r.first().copied().unwrap_or(0.0);
    if err <= 0.0 {
        return a;
    }
    let mut prev = a.clone();
    for i in 1..=order {
        let acc: f64 = (0..i).map(|j| a[j] * r[i - j]).sum();
        let k = -acc / err;
        prev.copy_from_slice(&a);
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
        if err <= 0.0 {
            break;
        }
    }
    a
}

/// `a R aᵀ` for the symmetric Toeplitz matrix built from lags `r`.
pub(crate) fn toeplitz_quadratic(a: &[f64], r: &[f64]) -> f64 {
    let p = a.len();
    let mut total = 0.0;
    for i in 0..p {
        for j in 0..p {
            total += a[i] * a[j] * r[i.abs_diff(j)];
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Solves the normal equations directly with Gaussian elimination.
    fn normal_equations(r: &[f64]) -> Vec<f64> {
        let p = r.len() - 1;
        let mut m: Vec<Vec<f64>> = (0..p)
            .map(|i| {
                let mut row: Vec<f64> = (0..p).map(|j| r[i.abs_diff(j)]).collect();
                row.push(-r[i + 1]);
                row
            })
            .collect();
        for c in 0..p {
            let piv = (c..p)
                .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
                .unwrap();
            m.swap(c, piv);
            let pivot_row = m[c].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i != c {
                    let f = row[c] / pivot_row[c];
                    for (v, pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let mut out = vec![1.0];
        out.extend((0..p).map(|i| m[i][p] / m[i][i]));
        out
    }

    #[test]
    fn matches_direct_solution() {
        let x: Vec<f64> = (0..400)
            .map(|i| {
                (i as f64 * 0.21).sin()
                    + 0.4 * (i as f64 * 1.3).cos()
                    + 0.05 * ((i * 7919) % 13) as f64
            })
            .collect();
        let r = autocorrelation(&x, 8);
        let a = levinson(&r);
        let b = normal_equations(&r);
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-8, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn ar1_process() {
        // x[n] = 0.9 x[n-1] has r[k] ∝ 0.9^k
        let r: Vec<f64> = (0..4).map(|k| 0.9f64.powi(k)).collect();
        let a = levinson(&r);
        assert!((a[1] + 0.9).abs() < 1e-12);
        assert!(a[2].abs() < 1e-12 && a[3].abs() < 1e-12);
    }

    #[test]
    fn zero_input() {
        assert_eq!(levinson(&[0.0, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        assert_eq!(autocorrelation(&[1.0, 2.0], 3), vec![5.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn optimal_filter_minimizes_quadratic_form() {
        let x: Vec<f64> = (0..256)
            .map(|i| (i as f64 * 0.37).sin() * (1.0 + 0.01 * i as f64))
            .collect();
        let r = autocorrelation(&x, 6);
        let a = levinson(&r);
        let best = toeplitz_quadratic(&a, &r);
        let mut perturbed = a.clone();
        perturbed[3] += 0.01;
        assert!(toeplitz_quadratic(&perturbed, &r) > best);
    }
}
