use proptest::prelude::*;

use cpt_rl::dp::{
    cpt_q_fixed_point, cpt_q_operator, cpt_q_operator_with, cpt_v_from_q, greedy_policy_from_q,
    policy_improvement_check, CptQIteration, PolicyTable, QTable, Semantics,
};
use cpt_rl::env::{GenerativeModel, GridSpec, Gridworld, Transition, TransitionModel};
use cpt_rl::risk::CptSpec;

const STATES: usize = 4;
const ACTIONS: usize = 2;

/// Random kernel on four states where the last one is terminal.
fn model() -> impl Strategy<Value = TransitionModel> {
    prop::collection::vec((0.05f64..1.0, 1.0f64..10.0), (STATES - 1) * ACTIONS * STATES).prop_map(|entries| {
        let mut rows = Vec::new();
        for s in 0..STATES - 1 {
            let mut actions = Vec::new();
            for a in 0..ACTIONS {
                let chunk = &entries[(s * ACTIONS + a) * STATES..][..STATES];
                let total: f64 = chunk.iter().map(|e| e.0).sum();
                actions.push(
                    chunk
                        .iter()
                        .enumerate()
                        .map(|(next, &(w, cost))| Transition {
                            next,
                            prob: w / total,
                            cost,
                        })
                        .collect(),
                );
            }
            rows.push(actions);
        }
        rows.push(vec![
            vec![Transition {
                next: STATES - 1,
                prob: 1.0,
                cost: 0.0
            }];
            ACTIONS
        ]);
        let mut terminal = vec![false; STATES];
        terminal[STATES - 1] = true;
        TransitionModel::new(rows, terminal, 0).unwrap()
    })
}

fn q_table() -> impl Strategy<Value = QTable> {
    prop::collection::vec(0.0f64..20.0, STATES * ACTIONS).prop_map(|v| QTable::from_values(STATES, ACTIONS, v).unwrap())
}

fn policy() -> impl Strategy<Value = PolicyTable> {
    prop::collection::vec(0.01f64..1.0, STATES).prop_map(|p| {
        let probs = p.iter().flat_map(|&x| [x, 1.0 - x]).collect();
        PolicyTable::from_probs(STATES, ACTIONS, probs).unwrap()
    })
}

proptest! {
    #[test]
    fn operator_is_monotone(
        model in model(),
        pi in policy(),
        q in q_table(),
        bump in prop::collection::vec(0.0f64..5.0, STATES * ACTIONS),
    ) {
        let spec = CptSpec::tversky_kahneman_1992();
        let higher = QTable::from_values(
            STATES,
            ACTIONS,
            q.values().iter().zip(&bump).map(|(a, b)| a + b).collect(),
        )
        .unwrap();
        let lo = cpt_q_operator(&q, &pi, &model, &spec, 0.9).unwrap();
        let hi = cpt_q_operator(&higher, &pi, &model, &spec, 0.9).unwrap();
        for (a, b) in lo.values().iter().zip(hi.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn operator_contracts_under_both_semantics(model in model(), pi in policy(), q1 in q_table(), q2 in q_table()) {
        let spec = CptSpec::tversky_kahneman_1992();
        for semantics in [Semantics::Distributional, Semantics::Scalar] {
            let t1 = cpt_q_operator_with(&q1, &pi, &model, &spec, 0.8, semantics).unwrap();
            let t2 = cpt_q_operator_with(&q2, &pi, &model, &spec, 0.8, semantics).unwrap();
            prop_assert!(t1.sup_distance(&t2) <= (0.8 + 1e-6) * q1.sup_distance(&q2));
        }
    }

    #[test]
    fn fixed_point_does_not_depend_on_start(model in model(), pi in policy(), init in q_table()) {
        let solver = CptQIteration::new(CptSpec::tversky_kahneman_1992(), 0.9).unwrap();
        let a = solver.solve(&pi, &model).unwrap();
        let b = solver.solve_from(&pi, &model, init).unwrap();
        prop_assert!(a.q.sup_distance(&b.q) <= 10.0 * 1e-8);
    }

    #[test]
    fn greedy_fixed_point_improves_on_any_policy(model in model(), pi in policy()) {
        let spec = CptSpec::tversky_kahneman_1992();
        let solver = CptQIteration::new(spec, 0.9).unwrap();
        let q_pi = solver.solve(&pi, &model).unwrap().q;
        let best = solver.solve_greedy(&model).unwrap().q;
        for (b, p) in best.values().iter().zip(q_pi.values()) {
            prop_assert!(b <= &(p + 1e-7));
        }
        // The greedy policy over Q_pi satisfies the improvement condition.
        let v_pi = cpt_v_from_q(&q_pi, &pi).unwrap();
        let improved = policy_improvement_check(&pi, &greedy_policy_from_q(&q_pi), &q_pi, &v_pi).unwrap();
        prop_assert!(improved.iter().all(|&ok| ok));
    }
}

#[test]
fn terminal_rows_stay_zero() {
    let world = Gridworld::new(GridSpec::environment_1()).unwrap();
    let model = world.model();
    let goal = world.spec().index(world.spec().goal);
    let pi = PolicyTable::uniform(model.n_states(), 4);
    let fp = cpt_q_fixed_point(&pi, model, &CptSpec::tversky_kahneman_1992(), 0.9, 1e-8).unwrap();
    assert!(fp.q.row(goal).iter().all(|&v| v == 0.0));
    assert!(fp.q.values().iter().all(|&v| v >= 0.0));
    assert!(fp.residuals.last().unwrap() < &1e-8);
}

#[test]
fn iteration_cap_signals_failure() {
    let world = Gridworld::new(GridSpec::environment_1()).unwrap();
    let pi = PolicyTable::uniform(world.model().n_states(), 4);
    let err = CptQIteration::new(CptSpec::identity(), 0.99)
        .unwrap()
        .max_iterations(5)
        .solve(&pi, world.model())
        .unwrap_err();
    assert!(!err.is_validation(), "{err}");
}

#[test]
fn shape_mismatches_are_rejected() {
    let world = Gridworld::new(GridSpec::open(2, 2)).unwrap();
    let spec = CptSpec::identity();
    let pi = PolicyTable::uniform(4, 4);
    assert!(cpt_q_operator(&QTable::zeros(3, 4), &pi, world.model(), &spec, 0.9).is_err());
    assert!(cpt_q_operator(
        &QTable::zeros(4, 4),
        &PolicyTable::uniform(4, 2),
        world.model(),
        &spec,
        0.9
    )
    .is_err());
    assert!(cpt_q_operator(&QTable::zeros(4, 4), &pi, world.model(), &spec, 1.0).is_err());
}
