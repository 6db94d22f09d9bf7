use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `n` i.i.d. standard symmetric α-stable draws (Chambers–Mallows–Stuck):
///
/// `X = sin(αU) / cos(U)^(1/α) · (cos(U - αU) / W)^((1 - α)/α)`
///
/// with `U ~ Uniform(-π/2, π/2)` and `W ~ Exp(1)`. At α = 2 this is a normal
/// law with variance 2, at α = 1 a standard Cauchy.
pub fn sample_sas(alpha: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha {alpha} outside (0, 2]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inv_alpha = 1.0 / alpha;
    let tail_exp = (1.0 - alpha) / alpha;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u = (rng.random::<f64>() - 0.5) * 2.0 * FRAC_PI_2;
        let w = -(1.0 - rng.random::<f64>()).ln();
        let x = (alpha * u).sin() / u.cos().powf(inv_alpha)
            * ((u - alpha * u).cos() / w).powf(tail_exp);
        // U = -π/2 or W = 0 have probability ~2^-53; redraw
        if x.is_finite() {
            out.push(x);
        }
    }
    Ok(out)
}
