use rand::Rng;

use super::grid::{Action, Cell, GridSpec};
use super::model::{GenerativeModel, Transition, TransitionModel};
use crate::error::Result;

/// Builds the slip kernel of a gridworld.
///
/// From a cell with `N` in-grid neighbors, action `a` reaches its intended
/// cell with probability `1 - slip` and each other neighbor with
/// `slip / (N - 1)`. When the intended move leaves the grid the agent stays
/// put with probability `1 - slip` and the slip mass is shared by all `N`
/// neighbors. If the intended cell is the only neighbor, the slip mass stays
/// in place. The goal is absorbing and free. Costs are charged on entry into
/// the successor cell.
pub fn build_transition_model(spec: &GridSpec) -> Result<TransitionModel> {
    spec.validate()?;
    let goal = spec.index(spec.goal);
    let slip = spec.slip_total;

    let rows = spec
        .cells()
        .map(|c| {
            Action::ALL
                .iter()
                .map(|&a| {
                    if c == spec.goal {
                        return vec![Transition {
                            next: goal,
                            prob: 1.0,
                            cost: 0.0,
                        }];
                    }
                    let entry = |cell: Cell, prob: f64| Transition {
                        next: spec.index(cell),
                        prob,
                        cost: spec.entry_cost(cell),
                    };
                    let neighbors = spec.neighbors(c);
                    match spec.step(c, a) {
                        Some(intended) => {
                            let mut row = vec![entry(intended, 1.0 - slip)];
                            let others: Vec<Cell> = neighbors.into_iter().filter(|&n| n != intended).collect();
                            if others.is_empty() {
                                row.push(entry(c, slip));
                            } else {
                                let share = slip / others.len() as f64;
                                row.extend(others.into_iter().map(|n| entry(n, share)));
                            }
                            row
                        }
                        None => {
                            let share = slip / neighbors.len() as f64;
                            let mut row = vec![entry(c, 1.0 - slip)];
                            row.extend(neighbors.into_iter().map(|n| entry(n, share)));
                            row
                        }
                    }
                })
                .collect()
        })
        .collect();

    let terminal = (0..spec.n_states()).map(|i| i == goal).collect();
    TransitionModel::new(rows, terminal, spec.index(spec.start))
}

/// A validated grid together with its kernel.
#[derive(Debug, Clone)]
pub struct Gridworld {
    spec: GridSpec,
    model: TransitionModel,
    obstacle_by_state: Vec<Option<usize>>,
}

impl Gridworld {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let model = build_transition_model(&spec)?;
        let obstacle_by_state = spec.cells().map(|c| spec.obstacle_at(c)).collect();
        Ok(Self {
            spec,
            model,
            obstacle_by_state,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn model(&self) -> &TransitionModel {
        &self.model
    }

    pub fn n_obstacles(&self) -> usize {
        self.spec.obstacles.len()
    }

    pub fn obstacle_of(&self, s: usize) -> Option<usize> {
        self.obstacle_by_state[s]
    }

    pub fn max_steps(&self) -> usize {
        self.spec.max_steps
    }
}

impl GenerativeModel for Gridworld {
    fn n_states(&self) -> usize {
        self.model.n_states()
    }

    fn n_actions(&self) -> usize {
        self.model.n_actions()
    }

    fn start(&self) -> usize {
        self.model.start()
    }

    fn is_terminal(&self, s: usize) -> bool {
        self.model.is_terminal(s)
    }

    fn sample_step<R: Rng + ?Sized>(&self, s: usize, a: usize, rng: &mut R) -> (f64, usize) {
        self.model.sample_step(s, a, rng)
    }
}
