use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid coordinates, `x` to the right and `y` upwards; `(0, 0)` is the
/// bottom-left cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

impl From<[usize; 2]> for Cell {
    fn from([x, y]: [usize; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Cell> for [usize; 2] {
    fn from(c: Cell) -> Self {
        [c.x, c.y]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Left,
    Right,
    Up,
    Down,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Left, Action::Right, Action::Up, Action::Down];
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Left => "left",
            Action::Right => "right",
            Action::Up => "up",
            Action::Down => "down",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    fn delta(self) -> (isize, isize) {
        match self {
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
            Action::Up => (0, 1),
            Action::Down => (0, -1),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A passable region that charges `cost` on every entry into one of its cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub cells: Vec<Cell>,
    pub cost: f64,
}

impl Obstacle {
    pub fn single(cell: Cell, cost: f64) -> Self {
        Self {
            cells: vec![cell],
            cost,
        }
    }
}

/// Cells of the `w` x `h` rectangle with lower-left corner `(x, y)`.
fn block(x: usize, y: usize, w: usize, h: usize) -> Vec<Cell> {
    (y..y + h)
        .flat_map(|cy| (x..x + w).map(move |cx| Cell::new(cx, cy)))
        .collect()
}

fn default_step_cost() -> f64 {
    1.0
}

fn default_slip_total() -> f64 {
    0.1
}

fn default_max_steps() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub start: Cell,
    pub goal: Cell,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default = "default_step_cost")]
    pub step_cost: f64,
    /// Probability mass moved away from the intended successor.
    #[serde(default = "default_slip_total")]
    pub slip_total: f64,
    /// Episode length cap for training and evaluation.
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

impl GridSpec {
    /// Corner-to-corner grid without obstacles and with default costs.
    pub fn open(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            start: Cell::new(0, 0),
            goal: Cell::new(width.saturating_sub(1), height.saturating_sub(1)),
            obstacles: Vec::new(),
            step_cost: default_step_cost(),
            slip_total: default_slip_total(),
            max_steps: default_max_steps(),
        }
    }

    /// 5x5 grid. A three-cell bar of cost 5 sits between the start on the
    /// left edge and the goal on the right; the short way hugs the bar.
    pub fn environment_1() -> Self {
        Self {
            start: Cell::new(0, 2),
            goal: Cell::new(4, 1),
            obstacles: vec![Obstacle {
                cells: block(1, 1, 3, 1),
                cost: 5.0,
            }],
            ..Self::open(5, 5)
        }
    }

    /// 10x10 grid split by a full-height wall (columns 6..=8) with a single
    /// tunnel along row 4. Obstacle `z` costs `10 z`:
    ///
    /// * 1 and 3 line the tunnel,
    /// * 2 is the wall body plus two tunnel flanks,
    /// * 4 is the far corner behind the goal.
    pub fn environment_2() -> Self {
        let mut wall = block(6, 0, 3, 3);
        wall.extend(block(7, 3, 2, 1));
        wall.extend(block(6, 6, 3, 4));
        let regions = [
            vec![Cell::new(6, 5), Cell::new(8, 5)],
            wall,
            vec![Cell::new(7, 5), Cell::new(6, 3)],
            vec![Cell::new(9, 9)],
        ];
        Self {
            start: Cell::new(5, 4),
            goal: Cell::new(9, 4),
            obstacles: regions
                .into_iter()
                .zip(1..)
                .map(|(cells, z)| Obstacle {
                    cells,
                    cost: 10.0 * z as f64,
                })
                .collect(),
            ..Self::open(10, 10)
        }
    }

    pub fn n_states(&self) -> usize {
        self.width * self.height
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn index(&self, c: Cell) -> usize {
        debug_assert!(self.contains(c));
        c.y * self.width + c.x
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.n_states()).map(|i| self.cell(i))
    }

    /// Cell reached by moving one step in `action`'s direction, if on the grid.
    pub fn step(&self, c: Cell, action: Action) -> Option<Cell> {
        let (dx, dy) = action.delta();
        let x = c.x.checked_add_signed(dx)?;
        let y = c.y.checked_add_signed(dy)?;
        let next = Cell::new(x, y);
        self.contains(next).then_some(next)
    }

    /// Orthogonally adjacent in-grid cells, in action order.
    pub fn neighbors(&self, c: Cell) -> Vec<Cell> {
        Action::ALL.iter().filter_map(|&a| self.step(c, a)).collect()
    }

    /// Index of the obstacle covering `c`, if any.
    pub fn obstacle_at(&self, c: Cell) -> Option<usize> {
        self.obstacles.iter().position(|o| o.cells.contains(&c))
    }

    /// Cost charged for entering `c`.
    pub fn entry_cost(&self, c: Cell) -> f64 {
        if c == self.goal {
            0.0
        } else if let Some(z) = self.obstacle_at(c) {
            self.obstacles[z].cost
        } else {
            self.step_cost
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGrid(msg));
        if self.width == 0 || self.height == 0 {
            return bad(format!("dimensions {}x{} must be positive", self.width, self.height));
        }
        if !self.contains(self.start) {
            return bad(format!("start {} lies outside the grid", self.start));
        }
        if !self.contains(self.goal) {
            return bad(format!("goal {} lies outside the grid", self.goal));
        }
        if self.start == self.goal {
            return bad("start and goal coincide".into());
        }
        if !(self.step_cost.is_finite() && self.step_cost > 0.0) {
            return bad(format!("step_cost must be positive, got {}", self.step_cost));
        }
        if !(0.0..1.0).contains(&self.slip_total) {
            return bad(format!("slip_total must lie in [0, 1), got {}", self.slip_total));
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        for (z, obstacle) in self.obstacles.iter().enumerate() {
            let name = z + 1;
            if obstacle.cells.is_empty() {
                return bad(format!("obstacle {name} has no cells"));
            }
            if !(obstacle.cost.is_finite() && obstacle.cost > 0.0) {
                return bad(format!("obstacle {name} cost must be positive, got {}", obstacle.cost));
            }
            for &c in &obstacle.cells {
                if !self.contains(c) {
                    return bad(format!("obstacle {name} cell {c} lies outside the grid"));
                }
                if c == self.start || c == self.goal {
                    return bad(format!("obstacle {name} covers start or goal at {c}"));
                }
                if self.obstacle_at(c) != Some(z) {
                    return bad(format!("cell {c} belongs to more than one obstacle"));
                }
            }
        }
        Ok(())
    }
}
