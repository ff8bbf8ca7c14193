use rand::Rng;

use super::config::{ARefRule, AdvanceMode, LearningConfig, VisitCounter};
use super::curve::{EpisodeRecord, LearningCurve};
use super::estimate::CptSampler;
use super::explore::{gibbs_policy, sample_index, PreferenceTable};
use crate::dp::{PolicyTable, QTable};
use crate::env::GenerativeModel;
use crate::error::Result;
use crate::risk::CptSpec;

#[derive(Debug, Clone)]
pub struct ActorCriticRun {
    pub q: QTable,
    pub preferences: PreferenceTable,
    /// Gibbs policy induced by the final preferences.
    pub policy: PolicyTable,
    pub visits: VisitCounter,
    pub curve: LearningCurve,
}

/// CPT-Actor-Critic with a tabular critic and a Gibbs actor.
///
/// Critic: `Q(s,a) += alpha1 (rho - Q(s,a))`. Actor:
/// `p(s,a) += alpha2 (Q(s,a) - Q(s,a_ref))`, with the policy a softmax over
/// `-p` so that actions costlier than the reference become less likely.
/// Both step sizes are constant.
pub fn actor_critic_train<E, R>(env: &E, spec: &CptSpec, config: &LearningConfig, rng: &mut R) -> Result<ActorCriticRun>
where
    E: GenerativeModel + ?Sized,
    R: Rng + ?Sized,
{
    config.validate(env.n_actions())?;
    let (n_states, n_actions) = (env.n_states(), env.n_actions());
    let mut q = QTable::zeros(n_states, n_actions);
    let mut prefs = PreferenceTable::zeros(n_states, n_actions);
    let mut visits = VisitCounter::new(n_states, n_actions);
    let mut curve = LearningCurve::with_capacity(config.t_max);
    let mut sampler = CptSampler::new(*spec, config.n_max, config.gamma)?;

    for _ in 0..config.t_max {
        let mut s = env.start();
        let mut steps = 0;
        let mut td_error = 0.0;
        while !env.is_terminal(s) && steps < config.max_steps {
            let a = sample_index(&gibbs_policy(&prefs, s), rng);
            let est = sampler.estimate(
                env,
                s,
                a,
                |next| {
                    gibbs_policy(&prefs, next)
                        .iter()
                        .zip(q.row(next))
                        .map(|(p, v)| p * v)
                        .sum()
                },
                rng,
            );
            visits.visit(s, a);
            let delta = est.rho - q.get(s, a);
            *q.get_mut(s, a) += config.alpha1 * delta;
            td_error += delta.abs();

            let a_ref = match config.a_ref_rule {
                ARefRule::Greedy => q.argmin(s),
                ARefRule::Fixed(b) => b,
            };
            prefs.add(s, a, config.alpha2 * (q.get(s, a) - q.get(s, a_ref)));

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
    let policy = prefs.to_policy();
    Ok(ActorCriticRun {
        q,
        preferences: prefs,
        policy,
        visits,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::CptQIteration;
    use crate::env::{Action, GridSpec, Gridworld, Transition, TransitionModel};

    #[test]
    fn single_action_never_moves_preferences() {
        // With one action the greedy reference is always the action taken.
        let tr = |next, prob, cost| Transition { next, prob, cost };
        let model = TransitionModel::new(
            vec![
                vec![vec![tr(0, 0.5, 2.0), tr(1, 0.5, 1.0)]],
                vec![vec![tr(1, 1.0, 0.0)]],
            ],
            vec![false, true],
            0,
        )
        .unwrap();
        let cfg = LearningConfig {
            t_max: 50,
            n_max: 8,
            ..Default::default()
        };
        let run = actor_critic_train(
            &model,
            &CptSpec::tversky_kahneman_1992(),
            &cfg,
            &mut crate::rng::stream(1, 0),
        )
        .unwrap();
        assert!(run.preferences.row(0).iter().all(|&p| p == 0.0));
        assert!(run.q.get(0, 0) > 0.0);
        assert_eq!(run.policy.row(0), &[1.0]);
    }

    #[test]
    fn corridor_policy_matches_dp_greedy() {
        let mut spec = GridSpec::open(3, 1);
        spec.slip_total = 0.0;
        let world = Gridworld::new(spec).unwrap();
        let cpt = CptSpec::tversky_kahneman_1992();
        let dp = CptQIteration::new(cpt, 0.9)
            .unwrap()
            .solve_greedy(world.model())
            .unwrap()
            .q;
        let cfg = LearningConfig {
            t_max: 2000,
            n_max: 5,
            advance_mode: AdvanceMode::IndependentSample,
            ..Default::default()
        };
        let run = actor_critic_train(&world, &cpt, &cfg, &mut crate::rng::stream(2, 0)).unwrap();
        for s in 0..2 {
            let row = run.policy.row(s);
            let learned = (0..4).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
            assert_eq!(learned, dp.argmin(s), "state {s}: {row:?}");
            assert_eq!(learned, Action::Right.index());
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
