//! Configuration parsing and the experiment driver behind the `cpt-rl`
//! binary.
//!
//! Exit codes: 0 on success, 1 for invalid input (arguments, configuration,
//! tables), 2 for runtime failures (I/O, non-convergence).

mod config;
mod run;
mod tables;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{
    load_config, parse_config, AgentConfigs, AgentKind, DpConfig, DpPolicy, EvalPolicy, EvaluationConfig,
    ExperimentConfig, RiskConfig, RiskKind, WeightingKind, ENV1_CONFIG, ENV2_CONFIG,
};
pub use run::{
    comparison_csv, dp_solve, epsilon_greedy_policy, evaluate, reproduce, train, train_agent, ComparisonRow, DpReport,
    Trained, COMPARISON_FILE, CURVE_FILE, DP_FILE, POLICY_FILE, PREFERENCES_FILE, Q_FILE, V_FILE,
};
pub use tables::{
    curve_csv, policy_csv, q_table_csv, read_q_table, read_state_action_csv, state_action_csv, value_csv,
};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cpt-rl", version, about = "CPT-driven tabular RL on stochastic gridworlds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Experiment configuration (TOML). `reproduce` accepts it repeatedly.
    #[arg(long, global = true)]
    pub config: Vec<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory; defaults to the configured `output_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the configured agent and write its tables and learning curve.
    Train,
    /// Solve the CPT-Q fixed point exactly on the configured grid.
    DpSolve,
    /// Roll out the configured agent's policy and write per-path statistics.
    Evaluate {
        /// Directory written by `train`; without it the agent is trained first.
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Train and evaluate all three agents on each configuration (the two
    /// shipped environments by default) and write a comparison table.
    Reproduce,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn with_seed(mut cfg: ExperimentConfig, seed: Option<u64>) -> ExperimentConfig {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg
}

fn single_config(cli: &Cli) -> Result<ExperimentConfig> {
    match cli.config.as_slice() {
        [path] => Ok(with_seed(load_config(path)?, cli.seed)),
        [] => Err(Error::InvalidConfig {
            key: "--config".into(),
            reason: "required for this command".into(),
        }),
        _ => Err(Error::InvalidConfig {
            key: "--config".into(),
            reason: "only `reproduce` accepts more than one".into(),
        }),
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<()> {
    if let Command::Reproduce = cli.command {
        let configs = if cli.config.is_empty() {
            vec![parse_config(ENV1_CONFIG)?, parse_config(ENV2_CONFIG)?]
        } else {
            cli.config.iter().map(|p| load_config(p)).collect::<Result<_>>()?
        };
        let configs: Vec<_> = configs.into_iter().map(|c| with_seed(c, cli.seed)).collect();
        let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out/reproduce"));
        let rows = reproduce(&configs, &out)?;
        for r in &rows {
            let visits: Vec<String> = r.stats.mean_visits.iter().map(|v| format!("{v:.2}")).collect();
            println!(
                "{:<6} {:<13} visits [{}]  mean cost {:.2}  goal rate {:.2}",
                r.environment,
                r.agent.name(),
                visits.join(", "),
                r.stats.mean_cost,
                r.stats.goal_rate()
            );
        }
        println!("wrote {}", out.join(COMPARISON_FILE).display());
        return Ok(());
    }

    let cfg = single_config(cli)?;
    let out = cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    match &cli.command {
        Command::Train => {
            for f in train(&cfg, &out)? {
                println!("wrote {}", f.display());
            }
        }
        Command::DpSolve => {
            let (_, v, report) = dp_solve(&cfg, &out)?;
            let start = cfg.environment.index(cfg.environment.start);
            println!(
                "converged in {} iterations (residual {:e}); V(start) = {}",
                report.iterations,
                report.final_residual,
                v.get(start)
            );
        }
        Command::Evaluate { tables } => {
            let stats = evaluate(&cfg, &out, tables.as_deref())?;
            println!(
                "{} paths: mean visits {:?}, mean cost {:.3}, goal rate {:.2}",
                stats.n_paths(),
                stats.mean_visits,
                stats.mean_cost,
                stats.goal_rate()
            );
        }
        Command::Reproduce => unreachable!(),
    }
    Ok(())
}
