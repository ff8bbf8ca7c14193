use rand::Rng;

use super::config::{step_size, AdvanceMode, LearningConfig, VisitCounter};
use super::curve::{EpisodeRecord, LearningCurve};
use super::estimate::CptSampler;
use super::explore::{epsilon_greedy, epsilon_greedy_value};
use crate::dp::QTable;
use crate::env::GenerativeModel;
use crate::error::Result;
use crate::risk::CptSpec;

#[derive(Debug, Clone)]
pub struct SarsaRun {
    pub q: QTable,
    pub visits: VisitCounter,
    pub curve: LearningCurve,
}

/// CPT-SARSA.
///
/// The behavior policy is epsilon-greedy over the current table, and the
/// same policy supplies the bootstrap average inside each CPT estimate.
pub fn sarsa_train<E, R>(env: &E, spec: &CptSpec, config: &LearningConfig, rng: &mut R) -> Result<SarsaRun>
where
    E: GenerativeModel + ?Sized,
    R: Rng + ?Sized,
{
    config.validate(env.n_actions())?;
    let (n_states, n_actions) = (env.n_states(), env.n_actions());
    let mut q = QTable::zeros(n_states, n_actions);
    let mut visits = VisitCounter::new(n_states, n_actions);
    let mut curve = LearningCurve::with_capacity(config.t_max);
    let mut sampler = CptSampler::new(*spec, config.n_max, config.gamma)?;

    for episode in 0..config.t_max {
        let epsilon = config.epsilon.at(episode);
        let mut s = env.start();
        let mut steps = 0;
        let mut td_error = 0.0;
        while !env.is_terminal(s) && steps < config.max_steps {
            let a = epsilon_greedy(&q, s, epsilon, rng);
            let est = sampler.estimate(env, s, a, |next| epsilon_greedy_value(&q, next, epsilon), rng);
            let delta = est.rho - q.get(s, a);
            let alpha = step_size(config.alpha_mode, &mut visits, s, a);
            *q.get_mut(s, a) += alpha * delta;
            td_error += delta.abs();
            s = match config.advance_mode {
                AdvanceMode::SStar => est.s_star,
                AdvanceMode::IndependentSample => env.sample_step(s, a, rng).1,
            };
            steps += 1;
        }
        curve.push(EpisodeRecord {
            steps,
            td_error,
            reached_terminal: env.is_terminal(s),
        });
    }
    Ok(SarsaRun { q, visits, curve })
}
