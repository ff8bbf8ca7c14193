//! Exact CPT-Q policy evaluation on a known kernel.

mod operator;
mod policy;
mod tables;

pub(crate) use operator::check_gamma;
pub use operator::{
    cpt_q_fixed_point, cpt_q_operator, cpt_q_operator_with, CptQIteration, FixedPoint, Semantics,
    DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE,
};
pub use policy::{cpt_v_from_q, greedy_policy_from_q, policy_improvement_check};
pub use tables::{PolicyTable, QTable, ValueTable};
