//! Cumulative-prospect-theory risk measures and tabular reinforcement
//! learning on stochastic gridworlds.
//!
//! - [`risk`]: exact and sampled CPT-values, VaR and CVaR.
//! - [`env`]: gridworld MDPs with an explicit kernel and a seeded sampler.
//! - [`dp`]: the CPT-Q evaluation operator and its fixed point.
//! - [`agents`]: CPT-SARSA, CPT-Actor-Critic and a Q-learning baseline.
//! - [`eval`]: seeded rollouts and obstacle-visit statistics.
//! - [`cli`]: configuration parsing and the experiment driver.

pub mod agents;
pub mod cli;
pub mod dp;
pub mod env;
pub mod error;
pub mod eval;
pub mod risk;
pub mod rng;

pub use error::{Error, Result};
