use super::{PolicyTable, QTable, ValueTable};
use crate::error::{Error, Result};

/// `V(s) = sum_a pi(a | s) Q(s, a)`
pub fn cpt_v_from_q(q: &QTable, pi: &PolicyTable) -> Result<ValueTable> {
    pi.check_shape(q.n_states(), q.n_actions())?;
    Ok(ValueTable::new((0..q.n_states()).map(|s| pi.expected(q, s)).collect()))
}

/// Per state, whether `sum_a pi'(a | s) Q_pi(s, a) <= V_pi(s)`: the
/// sufficient condition for `pi'` to improve on `pi`.
pub fn policy_improvement_check(
    pi: &PolicyTable,
    pi_prime: &PolicyTable,
    q_pi: &QTable,
    v_pi: &ValueTable,
) -> Result<Vec<bool>> {
    let (n_states, n_actions) = (q_pi.n_states(), q_pi.n_actions());
    pi.check_shape(n_states, n_actions)?;
    pi_prime.check_shape(n_states, n_actions)?;
    if v_pi.len() != n_states {
        return Err(Error::DimensionMismatch(format!(
            "value table has {} states, Q table has {n_states}",
            v_pi.len()
        )));
    }
    // Rounding slack so that pi' = pi passes with equality.
    let slack = |v: f64| 1e-12 * v.abs().max(1.0);
    Ok((0..n_states)
        .map(|s| {
            let v = v_pi.get(s);
            pi_prime.expected(q_pi, s) <= v + slack(v)
        })
        .collect())
}

/// Deterministic policy choosing the lowest-index minimizing action.
pub fn greedy_policy_from_q(q: &QTable) -> PolicyTable {
    let actions: Vec<usize> = (0..q.n_states()).map(|s| q.argmin(s)).collect();
    PolicyTable::deterministic(&actions, q.n_actions()).expect("argmin is in range")
}
