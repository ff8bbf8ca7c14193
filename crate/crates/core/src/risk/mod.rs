//! Risk measures over discrete distributions and sample batches: mean,
//! value-at-risk, conditional value-at-risk and the CPT-value.

mod cpt;
mod distribution;
mod functions;
mod tail;

pub use cpt::{cpt_value_discrete, cpt_value_from_samples, CptEstimator};
pub use distribution::{DiscreteDistribution, SampleBatch};
pub use functions::{CptSpec, Side, UtilityFunction, UtilityKind, WeightingFunction};
pub use tail::{cvar, expectation, var, CDF_TOLERANCE};
