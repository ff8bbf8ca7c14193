//! Tabular learning agents that interact with the environment only through
//! [`GenerativeModel`](crate::env::GenerativeModel).

mod actor_critic;
mod config;
mod curve;
mod estimate;
mod explore;
mod q_learning;
mod sarsa;

pub use actor_critic::{actor_critic_train, ActorCriticRun};
pub use config::{ARefRule, AdvanceMode, AlphaMode, EpsilonSchedule, LearningConfig, VisitCounter};
pub use curve::{EpisodeRecord, LearningCurve};
pub use estimate::{cpt_estimate, CptSampler, Estimate};
pub use explore::{epsilon_greedy, epsilon_greedy_value, gibbs_policy, sample_action, PreferenceTable};
pub use q_learning::{q_learning_train, QLearningRun};
pub use sarsa::{sarsa_train, SarsaRun};
