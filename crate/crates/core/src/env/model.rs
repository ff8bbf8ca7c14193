use rand::Rng;

use crate::error::{Error, Result};
use crate::risk::DiscreteDistribution;

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// One outcome of a kernel row: successor state, its probability and the
/// cost charged when it is realized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next: usize,
    pub prob: f64,
    pub cost: f64,
}

/// Interface the learning agents use to interact with an environment: they
/// may draw transitions from any state-action pair but never read the kernel.
pub trait GenerativeModel {
    fn n_states(&self) -> usize;
    fn n_actions(&self) -> usize;
    fn start(&self) -> usize;
    fn is_terminal(&self, s: usize) -> bool;
    /// Draws `(cost, next_state)` for taking `a` in `s`.
    fn sample_step<R: Rng + ?Sized>(&self, s: usize, a: usize, rng: &mut R) -> (f64, usize);
}

/// Explicit finite MDP kernel with per-successor costs.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    n_states: usize,
    n_actions: usize,
    start: usize,
    terminal: Vec<bool>,
    /// Indexed by `s * n_actions + a`.
    rows: Vec<Vec<Transition>>,
}

impl TransitionModel {
    /// Builds a model from `rows[s][a]`. Duplicate successors within a row are
    /// merged (they must carry the same cost) and zero-probability entries
    /// dropped.
    pub fn new(rows: Vec<Vec<Vec<Transition>>>, terminal: Vec<bool>, start: usize) -> Result<Self> {
        let n_states = rows.len();
        if n_states == 0 {
            return Err(Error::InvalidModel("no states".into()));
        }
        let n_actions = rows[0].len();
        if n_actions == 0 {
            return Err(Error::InvalidModel("no actions".into()));
        }
        if terminal.len() != n_states {
            return Err(Error::InvalidModel(format!(
                "terminal flags for {} states, model has {n_states}",
                terminal.len()
            )));
        }
        if start >= n_states {
            return Err(Error::InvalidModel(format!("start state {start} out of range")));
        }

        let mut flat = Vec::with_capacity(n_states * n_actions);
        for (s, actions) in rows.into_iter().enumerate() {
            if actions.len() != n_actions {
                return Err(Error::InvalidModel(format!(
                    "state {s} has {} actions, expected {n_actions}",
                    actions.len()
                )));
            }
            for (a, row) in actions.into_iter().enumerate() {
                flat.push(normalize_row(s, a, n_states, row)?);
            }
        }
        Ok(Self {
            n_states,
            n_actions,
            start,
            terminal,
            rows: flat,
        })
    }

    pub fn row(&self, s: usize, a: usize) -> &[Transition] {
        &self.rows[s * self.n_actions + a]
    }

    pub fn terminal_flags(&self) -> &[bool] {
        &self.terminal
    }

    /// Distribution of `value(t)` over the successors of `(s, a)`.
    pub fn successor_distribution(
        &self,
        s: usize,
        a: usize,
        value: impl Fn(&Transition) -> f64,
    ) -> DiscreteDistribution {
        let row = self.row(s, a);
        DiscreteDistribution::new(row.iter().map(&value).collect(), row.iter().map(|t| t.prob).collect())
            .expect("kernel rows are validated on construction")
    }
}

fn normalize_row(s: usize, a: usize, n_states: usize, row: Vec<Transition>) -> Result<Vec<Transition>> {
    let mut merged: Vec<Transition> = Vec::with_capacity(row.len());
    for t in row {
        if t.next >= n_states {
            return Err(Error::InvalidModel(format!("({s}, {a}) -> {} is out of range", t.next)));
        }
        if !(t.prob.is_finite() && t.prob >= 0.0) {
            return Err(Error::InvalidModel(format!("({s}, {a}) has probability {}", t.prob)));
        }
        if !t.cost.is_finite() {
            return Err(Error::InvalidModel(format!("({s}, {a}) has cost {}", t.cost)));
        }
        if t.prob == 0.0 {
            continue;
        }
        match merged.iter_mut().find(|m| m.next == t.next) {
            Some(m) if m.cost == t.cost => m.prob += t.prob,
            Some(_) => {
                return Err(Error::InvalidModel(format!(
                    "({s}, {a}) -> {} listed with two different costs",
                    t.next
                )))
            }
            None => merged.push(t),
        }
    }
    let total: f64 = merged.iter().map(|t| t.prob).sum();
    if merged.is_empty() || (total - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(Error::InvalidModel(format!(
            "row ({s}, {a}) sums to {total}, expected 1"
        )));
    }
    Ok(merged)
}

impl GenerativeModel for TransitionModel {
    fn n_states(&self) -> usize {
        self.n_states
    }

    fn n_actions(&self) -> usize {
        self.n_actions
    }

    fn start(&self) -> usize {
        self.start
    }

    fn is_terminal(&self, s: usize) -> bool {
        self.terminal[s]
    }

    fn sample_step<R: Rng + ?Sized>(&self, s: usize, a: usize, rng: &mut R) -> (f64, usize) {
        let row = self.row(s, a);
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for t in row {
            acc += t.prob;
            if u < acc {
                return (t.cost, t.next);
            }
        }
        let last = row.last().expect("rows are non-empty");
        (last.cost, last.next)
    }
}
