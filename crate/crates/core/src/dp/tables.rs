use crate::error::{Error, Result};

const POLICY_ROW_TOLERANCE: f64 = 1e-9;

/// Dense state-action table.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_states: usize,
    n_actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn zeros(n_states: usize, n_actions: usize) -> Self {
        Self::filled(n_states, n_actions, 0.0)
    }

    pub fn filled(n_states: usize, n_actions: usize, value: f64) -> Self {
        Self {
            n_states,
            n_actions,
            values: vec![value; n_states * n_actions],
        }
    }

    /// Row-major values, `values[s * n_actions + a]`.
    pub fn from_values(n_states: usize, n_actions: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_states * n_actions {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {n_states}x{n_actions} table",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch("table contains non-finite values".into()));
        }
        Ok(Self {
            n_states,
            n_actions,
            values,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    #[inline]
    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.n_actions + a]
    }

    #[inline]
    pub fn set(&mut self, s: usize, a: usize, v: f64) {
        self.values[s * self.n_actions + a] = v;
    }

    #[inline]
    pub fn get_mut(&mut self, s: usize, a: usize) -> &mut f64 {
        &mut self.values[s * self.n_actions + a]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Lowest-index action minimizing the row.
    pub fn argmin(&self, s: usize) -> usize {
        let row = self.row(s);
        let mut best = 0;
        for (a, &v) in row.iter().enumerate().skip(1) {
            if v < row[best] {
                best = a;
            }
        }
        best
    }

    pub fn min(&self, s: usize) -> f64 {
        self.row(s).iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_distance(&self, other: &QTable) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_shape(&self, n_states: usize, n_actions: usize, what: &str) -> Result<()> {
        if self.n_states != n_states || self.n_actions != n_actions {
            return Err(Error::DimensionMismatch(format!(
                "{what} is {}x{}, expected {n_states}x{n_actions}",
                self.n_states, self.n_actions
            )));
        }
        Ok(())
    }
}

/// Stochastic policy `pi(a | s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    n_states: usize,
    n_actions: usize,
    probs: Vec<f64>,
}

impl PolicyTable {
    pub fn uniform(n_states: usize, n_actions: usize) -> Self {
        Self {
            n_states,
            n_actions,
            probs: vec![1.0 / n_actions as f64; n_states * n_actions],
        }
    }

    pub fn deterministic(actions: &[usize], n_actions: usize) -> Result<Self> {
        let mut probs = vec![0.0; actions.len() * n_actions];
        for (s, &a) in actions.iter().enumerate() {
            if a >= n_actions {
                return Err(Error::DimensionMismatch(format!(
                    "action {a} at state {s} out of range for {n_actions} actions"
                )));
            }
            probs[s * n_actions + a] = 1.0;
        }
        Ok(Self {
            n_states: actions.len(),
            n_actions,
            probs,
        })
    }

    /// Row-major probabilities; every row must be a distribution.
    pub fn from_probs(n_states: usize, n_actions: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != n_states * n_actions {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for a {n_states}x{n_actions} policy",
                probs.len()
            )));
        }
        for (s, row) in probs.chunks(n_actions).enumerate() {
            let total: f64 = row.iter().sum();
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (total - 1.0).abs() > POLICY_ROW_TOLERANCE {
                return Err(Error::InvalidDistribution(format!(
                    "policy row {s} is not a distribution: {row:?}"
                )));
            }
        }
        Ok(Self {
            n_states,
            n_actions,
            probs,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    #[inline]
    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.probs[s * self.n_actions + a]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.probs[s * self.n_actions..(s + 1) * self.n_actions]
    }

    /// `sum_a pi(a | s) q(s, a)`
    #[inline]
    pub fn expected(&self, q: &QTable, s: usize) -> f64 {
        self.row(s).iter().zip(q.row(s)).map(|(p, v)| p * v).sum()
    }

    pub(crate) fn check_shape(&self, n_states: usize, n_actions: usize) -> Result<()> {
        if self.n_states != n_states || self.n_actions != n_actions {
            return Err(Error::DimensionMismatch(format!(
                "policy is {}x{}, expected {n_states}x{n_actions}",
                self.n_states, self.n_actions
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    values: Vec<f64>,
}

impl ValueTable {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn get(&self, s: usize) -> f64 {
        self.values[s]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_breaks_ties_low() {
        let q = QTable::from_values(2, 4, vec![1.0, 2.0, 3.0, 4.0, 1.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(q.argmin(0), 0);
        assert_eq!(q.argmin(1), 0);
        let q = QTable::from_values(1, 3, vec![5.0, 2.0, 2.0]).unwrap();
        assert_eq!(q.argmin(0), 1);
    }

    #[test]
    fn policy_validation() {
        assert!(PolicyTable::from_probs(1, 2, vec![0.5, 0.6]).is_err());
        assert!(PolicyTable::from_probs(1, 2, vec![1.5, -0.5]).is_err());
        assert!(PolicyTable::from_probs(2, 2, vec![0.5, 0.5]).is_err());
        assert!(PolicyTable::deterministic(&[0, 3], 2).is_err());
        let p = PolicyTable::deterministic(&[1, 0], 2).unwrap();
        assert_eq!(p.row(0), &[0.0, 1.0]);
    }

    #[test]
    fn table_shape_errors() {
        assert!(QTable::from_values(2, 2, vec![0.0; 3]).is_err());
        assert!(QTable::from_values(1, 1, vec![f64::NAN]).is_err());
    }
}
