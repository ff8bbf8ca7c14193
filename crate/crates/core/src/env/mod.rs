//! Stochastic gridworlds with obstacle cost regions.
//!
//! The kernel is available explicitly through [`TransitionModel`] for the
//! dynamic-programming solver, while learning agents only see the
//! [`GenerativeModel`] sampler.

mod grid;
mod gridworld;
mod model;

pub use grid::{Action, Cell, GridSpec, Obstacle};
pub use gridworld::{build_transition_model, Gridworld};
pub use model::{GenerativeModel, Transition, TransitionModel};

/// In-grid orthogonal neighbors of `cell`.
pub fn neighbors(spec: &GridSpec, cell: Cell) -> Vec<Cell> {
    spec.neighbors(cell)
}
