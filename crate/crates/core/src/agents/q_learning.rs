use rand::Rng;

use super::config::{step_size, LearningConfig, VisitCounter};
use super::curve::{EpisodeRecord, LearningCurve};
use super::explore::epsilon_greedy;
use crate::dp::QTable;
use crate::env::GenerativeModel;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct QLearningRun {
    pub q: QTable,
    pub visits: VisitCounter,
    pub curve: LearningCurve,
}

/// Risk-neutral tabular Q-learning on costs (min-over-actions bootstrap).
pub fn q_learning_train<E, R>(env: &E, config: &LearningConfig, rng: &mut R) -> Result<QLearningRun>
where
    E: GenerativeModel + ?Sized,
    R: Rng + ?Sized,
{
    config.validate(env.n_actions())?;
    let (n_states, n_actions) = (env.n_states(), env.n_actions());
    let mut q = QTable::zeros(n_states, n_actions);
    let mut visits = VisitCounter::new(n_states, n_actions);
    let mut curve = LearningCurve::with_capacity(config.t_max);

    for episode in 0..config.t_max {
        let epsilon = config.epsilon.at(episode);
        let mut s = env.start();
        let mut steps = 0;
        let mut td_error = 0.0;
        while !env.is_terminal(s) && steps < config.max_steps {
            let a = epsilon_greedy(&q, s, epsilon, rng);
            let (cost, next) = env.sample_step(s, a, rng);
            let tail = if env.is_terminal(next) { 0.0 } else { q.min(next) };
            let delta = cost + config.gamma * tail - q.get(s, a);
            let alpha = step_size(config.alpha_mode, &mut visits, s, a);
            *q.get_mut(s, a) += alpha * delta;
            td_error += delta.abs();
            s = next;
            steps += 1;
        }
        curve.push(EpisodeRecord {
            steps,
            td_error,
            reached_terminal: env.is_terminal(s),
        });
    }
    Ok(QLearningRun { q, visits, curve })
}
