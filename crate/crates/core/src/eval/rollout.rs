use rand::Rng;
use rayon::prelude::*;

use crate::agents::sample_action;
use crate::dp::PolicyTable;
use crate::env::{GenerativeModel, Gridworld};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: usize,
    pub action: usize,
    pub cost: f64,
    pub next: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    pub terminated: bool,
    pub total_cost: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Simulates `policy` from the start state until a terminal state or
/// `max_steps` transitions.
pub fn rollout<E, R>(env: &E, policy: &PolicyTable, rng: &mut R, max_steps: usize) -> Trajectory
where
    E: GenerativeModel + ?Sized,
    R: Rng + ?Sized,
{
    let mut s = env.start();
    let mut steps = Vec::new();
    let mut total_cost = 0.0;
    while !env.is_terminal(s) && steps.len() < max_steps {
        let action = sample_action(policy, s, rng);
        let (cost, next) = env.sample_step(s, action, rng);
        total_cost += cost;
        steps.push(Step {
            state: s,
            action,
            cost,
            next,
        });
        s = next;
    }
    Trajectory {
        steps,
        terminated: env.is_terminal(s),
        total_cost,
    }
}

/// Outcome of one evaluation path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStats {
    /// Entries into each obstacle, indexed like the grid's obstacle list.
    pub visits: Vec<u32>,
    pub total_cost: f64,
    pub steps: usize,
    pub reached_goal: bool,
}

impl PathStats {
    pub fn from_trajectory(world: &Gridworld, trajectory: &Trajectory) -> Self {
        let mut visits = vec![0; world.n_obstacles()];
        for step in &trajectory.steps {
            if let Some(z) = world.obstacle_of(step.next) {
                visits[z] += 1;
            }
        }
        Self {
            visits,
            total_cost: trajectory.total_cost,
            steps: trajectory.len(),
            reached_goal: trajectory.terminated,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub per_path: Vec<PathStats>,
    pub mean_visits: Vec<f64>,
    pub mean_cost: f64,
}

impl RunStats {
    pub fn from_paths(n_obstacles: usize, per_path: Vec<PathStats>) -> Self {
        let n = per_path.len().max(1) as f64;
        let mean_visits = (0..n_obstacles)
            .map(|z| per_path.iter().map(|p| p.visits[z] as f64).sum::<f64>() / n)
            .collect();
        let mean_cost = per_path.iter().map(|p| p.total_cost).sum::<f64>() / n;
        Self {
            per_path,
            mean_visits,
            mean_cost,
        }
    }

    pub fn n_paths(&self) -> usize {
        self.per_path.len()
    }

    pub fn median_visits(&self) -> Vec<f64> {
        let n_obstacles = self.mean_visits.len();
        (0..n_obstacles)
            .map(|z| median(self.per_path.iter().map(|p| p.visits[z] as f64).collect()))
            .collect()
    }

    pub fn median_cost(&self) -> f64 {
        median(self.per_path.iter().map(|p| p.total_cost).collect())
    }

    pub fn goal_rate(&self) -> f64 {
        let reached = self.per_path.iter().filter(|p| p.reached_goal).count();
        reached as f64 / self.per_path.len().max(1) as f64
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        0.5 * (xs[mid - 1] + xs[mid])
    }
}

/// Runs `n_paths` independent rollouts. Path `i` draws from stream `i` of
/// `seed`, so a longer evaluation extends a shorter one.
pub fn evaluate(world: &Gridworld, policy: &PolicyTable, n_paths: usize, seed: u64, max_steps: usize) -> RunStats {
    let per_path = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let trajectory = rollout(world, policy, &mut rng, max_steps);
            PathStats::from_trajectory(world, &trajectory)
        })
        .collect();
    RunStats::from_paths(world.n_obstacles(), per_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Action, GridSpec};

    fn corridor() -> Gridworld {
        let mut spec = GridSpec::open(4, 1);
        spec.slip_total = 0.0;
        Gridworld::new(spec).unwrap()
    }

    #[test]
    fn always_right_walks_the_corridor() {
        let world = corridor();
        let pi = PolicyTable::deterministic(&[Action::Right.index(); 4], 4).unwrap();
        let t = rollout(&world, &pi, &mut rng::stream(0, 0), 100);
        assert_eq!(t.len(), 3);
        assert!(t.terminated);
        // Entering the goal is free.
        assert_eq!(t.total_cost, 2.0);
        assert_eq!(t.steps.iter().map(|s| s.next).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn step_cap_truncates() {
        let world = corridor();
        let pi = PolicyTable::deterministic(&[Action::Left.index(); 4], 4).unwrap();
        let t = rollout(&world, &pi, &mut rng::stream(0, 0), 7);
        assert_eq!(t.len(), 7);
        assert!(!t.terminated);
        let stats = RunStats::from_paths(0, vec![PathStats::from_trajectory(&world, &t)]);
        assert_eq!(stats.goal_rate(), 0.0);
        assert_eq!(stats.mean_cost, 7.0);
    }

    #[test]
    fn obstacle_entries_are_counted_per_region() {
        let world = Gridworld::new(GridSpec::environment_1()).unwrap();
        let t = Trajectory {
            steps: vec![
                Step {
                    state: 0,
                    action: 0,
                    cost: 5.0,
                    next: world.spec().index(crate::env::Cell::new(2, 1)),
                },
                Step {
                    state: 0,
                    action: 0,
                    cost: 1.0,
                    next: 0,
                },
                Step {
                    state: 0,
                    action: 0,
                    cost: 5.0,
                    next: world.spec().index(crate::env::Cell::new(3, 1)),
                },
            ],
            terminated: false,
            total_cost: 11.0,
        };
        assert_eq!(PathStats::from_trajectory(&world, &t).visits, vec![2]);
    }

    #[test]
    fn longer_evaluation_extends_shorter() {
        let world = Gridworld::new(GridSpec::environment_1()).unwrap();
        let pi = PolicyTable::uniform(world.model().n_states(), 4);
        let short = evaluate(&world, &pi, 5, 11, 200);
        let long = evaluate(&world, &pi, 12, 11, 200);
        assert_eq!(&long.per_path[..5], &short.per_path[..]);
    }

    #[test]
    fn medians() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0]), 2.5);
        assert!(median(vec![]).is_nan());
    }
}
