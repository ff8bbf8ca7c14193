use rand::Rng;

use crate::dp::{PolicyTable, QTable};

/// With probability `epsilon` a uniformly random action, otherwise the
/// lowest-index minimizer of `Q(s, .)`.
pub fn epsilon_greedy<R: Rng + ?Sized>(q: &QTable, s: usize, epsilon: f64, rng: &mut R) -> usize {
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        rng.gen_range(0..q.n_actions())
    } else {
        q.argmin(s)
    }
}

/// `sum_b pi(b | s) Q(s, b)` for the epsilon-greedy policy over `q`.
pub fn epsilon_greedy_value(q: &QTable, s: usize, epsilon: f64) -> f64 {
    let row = q.row(s);
    let mean = row.iter().sum::<f64>() / row.len() as f64;
    (1.0 - epsilon) * q.min(s) + epsilon * mean
}

/// Actor parameters `p(s, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceTable {
    table: QTable,
}

impl PreferenceTable {
    pub fn zeros(n_states: usize, n_actions: usize) -> Self {
        Self {
            table: QTable::zeros(n_states, n_actions),
        }
    }

    pub fn from_values(n_states: usize, n_actions: usize, values: Vec<f64>) -> crate::Result<Self> {
        Ok(Self {
            table: QTable::from_values(n_states, n_actions, values)?,
        })
    }

    pub fn n_states(&self) -> usize {
        self.table.n_states()
    }

    pub fn n_actions(&self) -> usize {
        self.table.n_actions()
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.table.get(s, a)
    }

    pub fn add(&mut self, s: usize, a: usize, delta: f64) {
        *self.table.get_mut(s, a) += delta;
    }

    pub fn row(&self, s: usize) -> &[f64] {
        self.table.row(s)
    }

    pub fn as_table(&self) -> &QTable {
        &self.table
    }

    /// Gibbs policy at every state.
    pub fn to_policy(&self) -> PolicyTable {
        let probs = (0..self.n_states()).flat_map(|s| gibbs_policy(self, s)).collect();
        PolicyTable::from_probs(self.n_states(), self.n_actions(), probs).expect("softmax rows are distributions")
    }
}

/// `pi(a | s) = exp(-p(s, a)) / sum_b exp(-p(s, b))`.
///
/// Preferences are negated because the critic values are costs: the actor
/// raises `p` for actions that look worse than the reference action.
pub fn gibbs_policy(p: &PreferenceTable, s: usize) -> Vec<f64> {
    let row = p.row(s);
    let lowest = row.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = row.iter().map(|&x| (lowest - x).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Draws an action from `pi(. | s)`.
pub fn sample_action<R: Rng + ?Sized>(pi: &PolicyTable, s: usize, rng: &mut R) -> usize {
    sample_index(pi.row(s), rng)
}

/// Draws an index from a probability vector.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
