//! CPT-value of exact discrete distributions and of empirical samples.
//!
//! Gains flow through `(u+, w+)` with decumulative probabilities, losses
//! through `(u-, w-)` with cumulative probabilities. An outcome of exactly
//! zero contributes to neither side.

use super::{CptSpec, DiscreteDistribution, SampleBatch, WeightingFunction};
use crate::error::{Error, Result};

/// Exact CPT-value `rho+ - rho-` of a finite random variable.
pub fn cpt_value_discrete(dist: &DiscreteDistribution, spec: &CptSpec) -> f64 {
    let y = dist.outcomes();
    let p = dist.probs();
    let k = y.len();
    let l = dist.split_index();

    // Gains: F_i = P(Y >= y_i) for i > l, F_{K+1} = 0.
    let mut gain = 0.0;
    let mut tail = 0.0;
    let mut w_next = 0.0;
    for i in (l..k).rev() {
        tail += p[i];
        let w_here = spec.w_plus.eval(tail);
        gain += spec.u_plus.eval(y[i]) * (w_here - w_next);
        w_next = w_here;
    }

    // Losses: F_i = P(Y <= y_i) for i <= l, F_0 = 0.
    let mut loss = 0.0;
    let mut head = 0.0;
    let mut w_prev = 0.0;
    for i in 0..l {
        head += p[i];
        let w_here = spec.w_minus.eval(head);
        loss += spec.u_minus.eval(y[i]) * (w_here - w_prev);
        w_prev = w_here;
    }

    gain - loss
}

/// Quantile estimator of the CPT-value for a fixed sample count.
///
/// The weight increments only depend on the sample count and the weighting
/// functions, so they are computed once and reused for every batch.
#[derive(Debug, Clone)]
pub struct CptEstimator {
    spec: CptSpec,
    /// `w+((N-i+1)/N) - w+((N-i)/N)` for i = 1..=N
    gain_weights: Vec<f64>,
    /// `w-(i/N) - w-((i-1)/N)` for i = 1..=N
    loss_weights: Vec<f64>,
}

impl CptEstimator {
    pub fn new(spec: CptSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyBatch);
        }
        Ok(Self {
            spec,
            gain_weights: increments(&spec.w_plus, n, |i| n - i + 1, |i| n - i),
            loss_weights: increments(&spec.w_minus, n, |i| i, |i| i - 1),
        })
    }

    pub fn spec(&self) -> &CptSpec {
        &self.spec
    }

    pub fn sample_count(&self) -> usize {
        self.gain_weights.len()
    }

    pub fn gain_weights(&self) -> &[f64] {
        &self.gain_weights
    }

    pub fn loss_weights(&self) -> &[f64] {
        &self.loss_weights
    }

    /// Sorts `samples` in place and returns the estimate.
    ///
    /// # Panics
    /// If `samples.len()` differs from the configured sample count.
    pub fn estimate_in_place(&self, samples: &mut [f64]) -> f64 {
        assert_eq!(
            samples.len(),
            self.sample_count(),
            "estimator configured for a different sample count"
        );
        samples.sort_by(f64::total_cmp);
        let mut gain = 0.0;
        let mut loss = 0.0;
        for ((&x, &wg), &wl) in samples.iter().zip(&self.gain_weights).zip(&self.loss_weights) {
            if x > 0.0 {
                gain += self.spec.u_plus.eval(x) * wg;
            } else if x < 0.0 {
                loss += self.spec.u_minus.eval(x) * wl;
            }
        }
        gain - loss
    }
}

fn increments(
    w: &WeightingFunction,
    n: usize,
    upper: impl Fn(usize) -> usize,
    lower: impl Fn(usize) -> usize,
) -> Vec<f64> {
    let nf = n as f64;
    (1..=n)
        .map(|i| w.eval(upper(i) as f64 / nf) - w.eval(lower(i) as f64 / nf))
        .collect()
}

/// CPT-value estimated from i.i.d. draws via sorted-sample quantiles.
pub fn cpt_value_from_samples(batch: &SampleBatch, spec: &CptSpec) -> f64 {
    let estimator = CptEstimator::new(*spec, batch.count()).expect("batch is non-empty");
    let mut sorted = batch.samples().to_vec();
    estimator.estimate_in_place(&mut sorted)
}
