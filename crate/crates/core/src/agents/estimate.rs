use rand::Rng;

use crate::dp::{PolicyTable, QTable};
use crate::env::GenerativeModel;
use crate::error::Result;
use crate::risk::{CptEstimator, CptSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// Sampled CPT-value of `c + gamma V(s')`.
    pub rho: f64,
    /// Successor that produced the smallest sample; first one on ties.
    pub s_star: usize,
}

/// Reusable CPT-estimation step: draws `n_max` transitions from a
/// state-action pair and applies the quantile estimator to the bootstrapped
/// targets.
#[derive(Debug, Clone)]
pub struct CptSampler {
    estimator: CptEstimator,
    gamma: f64,
    buffer: Vec<f64>,
}

impl CptSampler {
    pub fn new(spec: CptSpec, n_max: usize, gamma: f64) -> Result<Self> {
        crate::dp::check_gamma(gamma)?;
        Ok(Self {
            estimator: CptEstimator::new(spec, n_max)?,
            gamma,
            buffer: Vec::with_capacity(n_max),
        })
    }

    pub fn n_max(&self) -> usize {
        self.estimator.sample_count()
    }

    /// `bootstrap(s')` supplies `sum_b pi(b | s') Q(s', b)`; it is not called
    /// for terminal successors, whose bootstrap is zero.
    pub fn estimate<E, R>(
        &mut self,
        env: &E,
        s: usize,
        a: usize,
        bootstrap: impl Fn(usize) -> f64,
        rng: &mut R,
    ) -> Estimate
    where
        E: GenerativeModel + ?Sized,
        R: Rng + ?Sized,
    {
        self.buffer.clear();
        let mut best = f64::INFINITY;
        let mut s_star = s;
        for _ in 0..self.n_max() {
            let (cost, next) = env.sample_step(s, a, rng);
            let tail = if env.is_terminal(next) { 0.0 } else { bootstrap(next) };
            let x = cost + self.gamma * tail;
            if x < best {
                best = x;
                s_star = next;
            }
            self.buffer.push(x);
        }
        Estimate {
            rho: self.estimator.estimate_in_place(&mut self.buffer),
            s_star,
        }
    }
}

/// One-shot CPT estimate for `(s, a)` with bootstrap values from `pi` and `q`.
#[allow(clippy::too_many_arguments)]
pub fn cpt_estimate<E, R>(
    env: &E,
    s: usize,
    a: usize,
    pi: &PolicyTable,
    q: &QTable,
    spec: &CptSpec,
    n_max: usize,
    gamma: f64,
    rng: &mut R,
) -> Result<Estimate>
where
    E: GenerativeModel + ?Sized,
    R: Rng + ?Sized,
{
    let mut sampler = CptSampler::new(*spec, n_max, gamma)?;
    Ok(sampler.estimate(env, s, a, |next| pi.expected(q, next), rng))
}
