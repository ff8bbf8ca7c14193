use serde::{Deserialize, Serialize};

use super::{greedy_policy_from_q, PolicyTable, QTable};
use crate::env::{GenerativeModel, TransitionModel};
use crate::error::{Error, Result};
use crate::risk::{cpt_value_discrete, CptSpec, DiscreteDistribution};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

/// How the successor average enters the CPT-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    /// `rho` of the random variable `c(s,a,s') + gamma V(s')` with `s' ~ P(.|s,a)`.
    /// This is what the sampling agents estimate.
    #[default]
    Distributional,
    /// `rho` of the single number `sum_s' P(s'|s,a) (c(s,a,s') + gamma V(s'))`.
    Scalar,
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLearningConfig(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )))
    }
}

/// One application of the CPT-Q evaluation operator `T_pi`.
pub fn cpt_q_operator(
    q: &QTable,
    pi: &PolicyTable,
    model: &TransitionModel,
    spec: &CptSpec,
    gamma: f64,
) -> Result<QTable> {
    cpt_q_operator_with(q, pi, model, spec, gamma, Semantics::Distributional)
}

pub fn cpt_q_operator_with(
    q: &QTable,
    pi: &PolicyTable,
    model: &TransitionModel,
    spec: &CptSpec,
    gamma: f64,
    semantics: Semantics,
) -> Result<QTable> {
    check_gamma(gamma)?;
    let (n_states, n_actions) = (model.n_states(), model.n_actions());
    q.check_shape(n_states, n_actions, "Q table")?;
    pi.check_shape(n_states, n_actions)?;
    Ok(apply(q, pi, model, spec, gamma, semantics))
}

fn apply(
    q: &QTable,
    pi: &PolicyTable,
    model: &TransitionModel,
    spec: &CptSpec,
    gamma: f64,
    semantics: Semantics,
) -> QTable {
    let (n_states, n_actions) = (model.n_states(), model.n_actions());
    let v: Vec<f64> = (0..n_states)
        .map(|s| if model.is_terminal(s) { 0.0 } else { pi.expected(q, s) })
        .collect();

    let mut out = QTable::zeros(n_states, n_actions);
    for s in (0..n_states).filter(|&s| !model.is_terminal(s)) {
        for a in 0..n_actions {
            let target = |t: &crate::env::Transition| t.cost + gamma * v[t.next];
            let value = match semantics {
                Semantics::Distributional => cpt_value_discrete(&model.successor_distribution(s, a, target), spec),
                Semantics::Scalar => {
                    let mean: f64 = model.row(s, a).iter().map(|t| t.prob * target(t)).sum();
                    let point = DiscreteDistribution::point_mass(mean).expect("finite mean");
                    cpt_value_discrete(&point, spec)
                }
            };
            out.set(s, a, value);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub q: QTable,
    /// Number of operator applications performed.
    pub iterations: usize,
    /// Sup-norm change produced by each application.
    pub residuals: Vec<f64>,
}

/// Fixed-point iteration of `T_pi` until the sup-norm change drops below a
/// tolerance.
#[derive(Debug, Clone)]
pub struct CptQIteration {
    spec: CptSpec,
    gamma: f64,
    tol: f64,
    max_iterations: usize,
    semantics: Semantics,
}

impl CptQIteration {
    pub fn new(spec: CptSpec, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            spec,
            gamma,
            tol: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            semantics: Semantics::Distributional,
        })
    }

    pub fn tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidLearningConfig(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn max_iterations(mut self, cap: usize) -> Self {
        self.max_iterations = cap;
        self
    }

    pub fn semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn solve(&self, pi: &PolicyTable, model: &TransitionModel) -> Result<FixedPoint> {
        let init = QTable::zeros(model.n_states(), model.n_actions());
        self.solve_from(pi, model, init)
    }

    pub fn solve_from(&self, pi: &PolicyTable, model: &TransitionModel, init: QTable) -> Result<FixedPoint> {
        init.check_shape(model.n_states(), model.n_actions(), "initial Q table")?;
        pi.check_shape(model.n_states(), model.n_actions())?;
        self.iterate(model, init, |_| pi.clone())
    }

    /// Control variant: before every application the policy is replaced by
    /// the greedy (lowest-index argmin) policy of the current table, so the
    /// limit satisfies `Q = T_greedy(Q) Q`.
    pub fn solve_greedy(&self, model: &TransitionModel) -> Result<FixedPoint> {
        let init = QTable::zeros(model.n_states(), model.n_actions());
        self.iterate(model, init, greedy_policy_from_q)
    }

    fn iterate(
        &self,
        model: &TransitionModel,
        init: QTable,
        policy: impl Fn(&QTable) -> PolicyTable,
    ) -> Result<FixedPoint> {
        let mut q = init;
        let mut residuals = Vec::new();
        for iteration in 1..=self.max_iterations {
            let pi = policy(&q);
            let next = apply(&q, &pi, model, &self.spec, self.gamma, self.semantics);
            let residual = next.sup_distance(&q);
            residuals.push(residual);
            q = next;
            if residual < self.tol {
                return Ok(FixedPoint {
                    q,
                    iterations: iteration,
                    residuals,
                });
            }
        }
        Err(Error::ContractionViolation {
            iterations: self.max_iterations,
            residual: residuals.last().copied().unwrap_or(f64::NAN),
        })
    }
}

/// Iterates `T_pi` from zero with the default iteration cap.
pub fn cpt_q_fixed_point(
    pi: &PolicyTable,
    model: &TransitionModel,
    spec: &CptSpec,
    gamma: f64,
    tol: f64,
) -> Result<FixedPoint> {
    CptQIteration::new(*spec, gamma)?.tolerance(tol)?.solve(pi, model)
}
