//! Seeded rollouts and obstacle-visit statistics.

mod output;
mod rollout;

pub use output::{paths_csv, read_paths_csv, summary_json, write_stats, RunMeta, PATHS_FILE, SUMMARY_FILE};
pub use rollout::{evaluate, rollout, PathStats, RunStats, Step, Trajectory};
