use super::{DiscreteDistribution, SampleBatch};
use crate::error::{Error, Result};

/// Slack on cumulative-probability comparisons so that e.g. `0.5 + 0.3`
/// counts as reaching `0.8`.
pub const CDF_TOLERANCE: f64 = 1e-12;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// `inf { y : P(Y <= y) >= alpha }`
pub fn var(dist: &DiscreteDistribution, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let mut cdf = 0.0;
    for (y, p) in dist.iter() {
        cdf += p;
        if cdf >= alpha - CDF_TOLERANCE {
            return Ok(y);
        }
    }
    Ok(*dist.outcomes().last().expect("distribution is non-empty"))
}

/// Rockafellar-Uryasev form `min_s [ s + E[(Y - s)+] / (1 - alpha) ]`.
///
/// The objective is piecewise linear and convex in `s` with kinks at the
/// atoms, so the minimum over atoms is the global minimum. Upper partial
/// expectations are accumulated right to left in one pass.
pub fn cvar(dist: &DiscreteDistribution, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let y = dist.outcomes();
    let p = dist.probs();
    let scale = 1.0 / (1.0 - alpha);

    // For s = y_j: E[(Y - s)+] = sum_{i > j} p_i y_i - s * sum_{i > j} p_i
    let mut upper_mass = 0.0;
    let mut upper_moment = 0.0;
    let mut best = f64::INFINITY;
    for j in (0..y.len()).rev() {
        let s = y[j];
        let excess = (upper_moment - s * upper_mass).max(0.0);
        best = best.min(s + scale * excess);
        upper_mass += p[j];
        upper_moment += p[j] * y[j];
    }
    Ok(best)
}

pub fn expectation(batch: &SampleBatch) -> f64 {
    let xs = batch.samples();
    xs.iter().sum::<f64>() / xs.len() as f64
}
