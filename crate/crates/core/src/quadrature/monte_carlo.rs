//! Seeded stratified Monte Carlo, used to cross-validate the deterministic
//! cubature on integrands where its error estimate deserves suspicion.

use super::IntegralResult;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stratified Monte Carlo estimate of the integral of `f` over a finite box.
///
/// The box is cut into equal sub-boxes (as many per axis as the sample budget
/// supports at roughly 16 samples each) and every sub-box is sampled with its
/// own generator seeded from `(seed, stratum index)`, so the estimate is
/// reproducible sample-for-sample. `error_estimate` is the one-sigma
/// statistical error combined over strata; `converged` only reports that the
/// estimate is finite, since a sampling method meets no tolerance contract.
pub fn integrate_monte_carlo(
    f: impl Fn(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    n_samples: u64,
    seed: u64,
) -> Result<IntegralResult> {
    if bounds.is_empty() || bounds.len() > 4 {
        return Err(Error::InvalidInput(format!(
            "monte carlo supports 1 to 4 dimensions, got {}",
            bounds.len()
        )));
    }
    for &(lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!(
                "box axis must be finite and increasing, got ({lo}, {hi})"
            )));
        }
    }
    if n_samples < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }

    let dim = bounds.len();
    let per_axis = ((n_samples / 16) as f64).powf(1.0 / dim as f64).floor() as u64;
    let per_axis = per_axis.clamp(1, 64) as usize;
    let strata = per_axis.pow(dim as u32) as u64;
    let per_stratum = (n_samples / strata).max(2);

    let widths: Vec<f64> = bounds.iter().map(|&(lo, hi)| (hi - lo) / per_axis as f64).collect();
    let sub_volume: f64 = widths.iter().product();

    let mut value = 0.0;
    let mut variance = 0.0;
    let mut x = [0.0f64; 4];
    let mut index = [0usize; 4];
    for stratum in 0..strata {
        let mut rem = stratum as usize;
        for i in 0..dim {
            index[i] = rem % per_axis;
            rem /= per_axis;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(stratum.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..per_stratum {
            for i in 0..dim {
                let lo = bounds[i].0 + index[i] as f64 * widths[i];
                x[i] = lo + rng.gen::<f64>() * widths[i];
            }
            let v = f(&x[..dim]);
            sum += v;
            sum_sq += v * v;
        }
        let n = per_stratum as f64;
        let mean = sum / n;
        let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
        value += sub_volume * mean;
        variance += sub_volume * sub_volume * var / n;
    }

    let error_estimate = variance.sqrt();
    Ok(IntegralResult {
        value,
        error_estimate,
        evaluations: strata * per_stratum,
        converged: value.is_finite() && error_estimate.is_finite(),
    })
}
