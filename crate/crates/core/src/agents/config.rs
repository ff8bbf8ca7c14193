use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step size for tabular updates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    Fixed(f64),
    /// `1 / N(s, a)` after counting the current visit.
    InverseVisit,
}

/// Multiplicative per-episode decay of the exploration rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpsilonSchedule {
    pub initial: f64,
    pub decay: f64,
    pub floor: f64,
}

impl EpsilonSchedule {
    pub const fn constant(epsilon: f64) -> Self {
        Self {
            initial: epsilon,
            decay: 1.0,
            floor: epsilon,
        }
    }

    /// Exploration rate used during `episode` (zero-based).
    pub fn at(&self, episode: usize) -> f64 {
        let decayed = self.initial * self.decay.powi(episode.min(i32::MAX as usize) as i32);
        decayed.max(self.floor)
    }
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self {
            initial: 1.0,
            decay: 0.995,
            floor: 0.05,
        }
    }
}

/// Reference action for the actor update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ARefRule {
    /// `argmin_b Q(s, b)`, recomputed at every step.
    Greedy,
    Fixed(usize),
}

/// Where the trajectory moves after a CPT-estimation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AdvanceMode {
    /// The successor that produced the smallest sample.
    #[default]
    SStar,
    /// A fresh independent draw from the same state-action pair.
    IndependentSample,
}

fn default_gamma() -> f64 {
    0.9
}
fn default_alpha_mode() -> AlphaMode {
    AlphaMode::InverseVisit
}
fn default_alpha1() -> f64 {
    0.1
}
fn default_alpha2() -> f64 {
    0.01
}
fn default_n_max() -> usize {
    100
}
fn default_t_max() -> usize {
    1000
}
fn default_a_ref() -> ARefRule {
    ARefRule::Greedy
}
fn default_max_steps() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningConfig {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Step size of CPT-SARSA and Q-learning.
    #[serde(default = "default_alpha_mode")]
    pub alpha_mode: AlphaMode,
    /// Critic step size of the actor-critic.
    #[serde(default = "default_alpha1")]
    pub alpha1: f64,
    /// Actor step size of the actor-critic.
    #[serde(default = "default_alpha2")]
    pub alpha2: f64,
    #[serde(default, rename = "epsilon_schedule")]
    pub epsilon: EpsilonSchedule,
    /// Transitions drawn per CPT estimate.
    #[serde(default = "default_n_max", alias = "N_max")]
    pub n_max: usize,
    /// Training episodes.
    #[serde(default = "default_t_max", alias = "T_max")]
    pub t_max: usize,
    #[serde(default = "default_a_ref")]
    pub a_ref_rule: ARefRule,
    #[serde(default)]
    pub advance_mode: AdvanceMode,
    /// Step cap per training episode.
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            gamma: default_gamma(),
            alpha_mode: default_alpha_mode(),
            alpha1: default_alpha1(),
            alpha2: default_alpha2(),
            epsilon: EpsilonSchedule::default(),
            n_max: default_n_max(),
            t_max: default_t_max(),
            a_ref_rule: default_a_ref(),
            advance_mode: AdvanceMode::default(),
            max_steps: default_max_steps(),
        }
    }
}

impl LearningConfig {
    /// Checks every field; `n_actions` bounds a fixed reference action.
    pub fn validate(&self, n_actions: usize) -> Result<()> {
        let bad = |key: &str, reason: String| {
            Err(Error::InvalidConfig {
                key: key.to_string(),
                reason,
            })
        };
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma", format!("must lie in (0, 1), got {}", self.gamma));
        }
        if let AlphaMode::Fixed(a) = self.alpha_mode {
            if !(a > 0.0 && a <= 1.0) {
                return bad("alpha_mode", format!("fixed rate must lie in (0, 1], got {a}"));
            }
        }
        for (key, v) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(key, format!("must be positive, got {v}"));
            }
        }
        let eps = &self.epsilon;
        for (key, v) in [
            ("epsilon_schedule.initial", eps.initial),
            ("epsilon_schedule.decay", eps.decay),
            ("epsilon_schedule.floor", eps.floor),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(key, format!("must lie in [0, 1], got {v}"));
            }
        }
        if self.n_max == 0 {
            return bad("n_max", "must be at least 1".into());
        }
        if self.t_max == 0 {
            return bad("t_max", "must be at least 1".into());
        }
        if self.max_steps == 0 {
            return bad("max_steps", "must be at least 1".into());
        }
        if let ARefRule::Fixed(a) = self.a_ref_rule {
            if a >= n_actions {
                return bad("a_ref_rule", format!("action {a} out of range for {n_actions} actions"));
            }
        }
        Ok(())
    }
}

/// Number of times each state-action pair has been updated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitCounter {
    n_actions: usize,
    counts: Vec<u64>,
}

impl VisitCounter {
    pub fn new(n_states: usize, n_actions: usize) -> Self {
        Self {
            n_actions,
            counts: vec![0; n_states * n_actions],
        }
    }

    /// Records a visit and returns the updated count.
    pub fn visit(&mut self, s: usize, a: usize) -> u64 {
        let c = &mut self.counts[s * self.n_actions + a];
        *c += 1;
        *c
    }

    pub fn get(&self, s: usize, a: usize) -> u64 {
        self.counts[s * self.n_actions + a]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Step size for the next update of `(s, a)`; counts the visit.
pub(crate) fn step_size(mode: AlphaMode, visits: &mut VisitCounter, s: usize, a: usize) -> f64 {
    let n = visits.visit(s, a);
    match mode {
        AlphaMode::Fixed(alpha) => alpha,
        AlphaMode::InverseVisit => 1.0 / n as f64,
    }
}
