use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{AgentKind, DpPolicy, EvalPolicy, ExperimentConfig};
use super::tables::{
    curve_csv, policy_csv, q_table_csv, read_q_table, read_state_action_csv, state_action_csv, value_csv,
};
use crate::agents::{actor_critic_train, q_learning_train, sarsa_train, LearningCurve, PreferenceTable};
use crate::dp::{cpt_v_from_q, greedy_policy_from_q, CptQIteration, PolicyTable, QTable, ValueTable};
use crate::env::{Action, GenerativeModel, Gridworld};
use crate::error::{Error, Result};
use crate::eval::{evaluate as run_paths, paths_csv, summary_json, RunMeta, RunStats};
use crate::rng;

pub const Q_FILE: &str = "q.csv";
pub const V_FILE: &str = "v.csv";
pub const POLICY_FILE: &str = "policy.csv";
pub const PREFERENCES_FILE: &str = "preferences.csv";
pub const CURVE_FILE: &str = "curve.csv";
pub const DP_FILE: &str = "dp.json";
pub const COMPARISON_FILE: &str = "comparison.csv";

fn meta(cfg: &ExperimentConfig) -> RunMeta {
    RunMeta {
        seed: cfg.seed,
        config_digest: cfg.digest(),
        config: cfg.echo(),
    }
}

fn write(dir: &Path, name: &str, bytes: Vec<u8>) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Output of one training run.
#[derive(Debug, Clone)]
pub struct Trained {
    pub kind: AgentKind,
    pub q: QTable,
    /// Policy evaluated by default (see [`EvalPolicy`]).
    pub policy: PolicyTable,
    pub preferences: Option<PreferenceTable>,
    pub curve: LearningCurve,
}

/// Epsilon-greedy policy over `q` as an explicit table.
pub fn epsilon_greedy_policy(q: &QTable, epsilon: f64) -> PolicyTable {
    let n_actions = q.n_actions();
    let probs = (0..q.n_states())
        .flat_map(|s| {
            let best = q.argmin(s);
            (0..n_actions).map(move |a| epsilon / n_actions as f64 + if a == best { 1.0 - epsilon } else { 0.0 })
        })
        .collect();
    PolicyTable::from_probs(q.n_states(), n_actions, probs).expect("rows are distributions")
}

fn q_policy(cfg: &ExperimentConfig, kind: AgentKind, q: &QTable) -> PolicyTable {
    match cfg.evaluation.policy {
        EvalPolicy::Greedy => greedy_policy_from_q(q),
        EvalPolicy::Behavior => {
            let l = cfg.learning.get(kind);
            epsilon_greedy_policy(q, l.epsilon.at(l.t_max - 1))
        }
    }
}

/// Trains `kind` on the configured environment. The training stream depends
/// only on the seed, so every agent sees the same randomness source.
pub fn train_agent(cfg: &ExperimentConfig, world: &Gridworld, kind: AgentKind) -> Result<Trained> {
    let learning = cfg.learning.get(kind);
    let spec = cfg.risk.spec()?;
    let mut r = rng::stream(cfg.seed, rng::TRAIN_STREAM);
    Ok(match kind {
        AgentKind::Sarsa => {
            let run = sarsa_train(world, &spec, learning, &mut r)?;
            Trained {
                kind,
                policy: q_policy(cfg, kind, &run.q),
                q: run.q,
                preferences: None,
                curve: run.curve,
            }
        }
        AgentKind::QLearning => {
            let run = q_learning_train(world, learning, &mut r)?;
            Trained {
                kind,
                policy: q_policy(cfg, kind, &run.q),
                q: run.q,
                preferences: None,
                curve: run.curve,
            }
        }
        AgentKind::ActorCritic => {
            let run = actor_critic_train(world, &spec, learning, &mut r)?;
            Trained {
                kind,
                q: run.q,
                policy: run.policy,
                preferences: Some(run.preferences),
                curve: run.curve,
            }
        }
    })
}

/// `train`: learned tables and the learning curve.
pub fn train(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let world = Gridworld::new(cfg.environment.clone())?;
    let trained = train_agent(cfg, &world, cfg.agent)?;
    let m = meta(cfg);
    let grid = world.spec();
    let mut files = vec![
        write(out, Q_FILE, q_table_csv(grid, &trained.q, &m)?)?,
        write(out, POLICY_FILE, policy_csv(grid, &trained.policy, &m)?)?,
        write(out, CURVE_FILE, curve_csv(&trained.curve, &m)?)?,
    ];
    if let Some(p) = &trained.preferences {
        files.push(write(
            out,
            PREFERENCES_FILE,
            state_action_csv(grid, p.as_table().values(), &m)?,
        )?);
    }
    Ok(files)
}

#[derive(Debug, Clone, Serialize)]
pub struct DpReport {
    pub policy: DpPolicy,
    pub iterations: usize,
    pub final_residual: f64,
    pub n_states: usize,
    pub seed: u64,
    pub config_digest: String,
}

/// `dp-solve`: exact Q and V on the configured grid, refused above the
/// configured state count.
pub fn dp_solve(cfg: &ExperimentConfig, out: &Path) -> Result<(QTable, ValueTable, DpReport)> {
    let world = Gridworld::new(cfg.environment.clone())?;
    let model = world.model();
    let n_states = model.n_states();
    if n_states > cfg.dp.max_states {
        return Err(Error::InvalidConfig {
            key: "dp.max_states".into(),
            reason: format!("model has {n_states} states, cap is {}", cfg.dp.max_states),
        });
    }
    let solver = CptQIteration::new(cfg.risk.spec()?, cfg.selected_learning().gamma)?
        .tolerance(cfg.dp.tolerance)?
        .max_iterations(cfg.dp.max_iterations)
        .semantics(cfg.dp.semantics);
    let (fp, pi) = match cfg.dp.policy {
        DpPolicy::Greedy => {
            let fp = solver.solve_greedy(model)?;
            let pi = greedy_policy_from_q(&fp.q);
            (fp, pi)
        }
        DpPolicy::Uniform => {
            let pi = PolicyTable::uniform(n_states, Action::COUNT);
            (solver.solve(&pi, model)?, pi)
        }
    };
    let v = cpt_v_from_q(&fp.q, &pi)?;
    let m = meta(cfg);
    let report = DpReport {
        policy: cfg.dp.policy,
        iterations: fp.iterations,
        final_residual: fp.residuals.last().copied().unwrap_or(0.0),
        n_states,
        seed: cfg.seed,
        config_digest: m.config_digest.clone(),
    };
    write(out, Q_FILE, q_table_csv(world.spec(), &fp.q, &m)?)?;
    write(out, V_FILE, value_csv(world.spec(), &v, &m)?)?;
    let mut json = serde_json::to_vec_pretty(&report)?;
    json.push(b'\n');
    write(out, DP_FILE, json)?;
    Ok((fp.q, v, report))
}

fn load_policy(cfg: &ExperimentConfig, world: &Gridworld, dir: &Path) -> Result<PolicyTable> {
    let grid = world.spec();
    match cfg.agent {
        AgentKind::ActorCritic => {
            let values = read_state_action_csv(&dir.join(PREFERENCES_FILE), grid)?;
            Ok(PreferenceTable::from_values(grid.n_states(), Action::COUNT, values)?.to_policy())
        }
        kind => Ok(q_policy(cfg, kind, &read_q_table(&dir.join(Q_FILE), grid)?)),
    }
}

/// `evaluate`: rollouts of the configured agent. With `tables` the policy
/// comes from a previous `train` output directory, otherwise the agent is
/// trained first.
pub fn evaluate(cfg: &ExperimentConfig, out: &Path, tables: Option<&Path>) -> Result<RunStats> {
    let world = Gridworld::new(cfg.environment.clone())?;
    let policy = match tables {
        Some(dir) => load_policy(cfg, &world, dir)?,
        None => train_agent(cfg, &world, cfg.agent)?.policy,
    };
    let stats = run_paths(
        &world,
        &policy,
        cfg.evaluation.n_paths,
        cfg.seed,
        cfg.evaluation.max_steps,
    );
    let m = meta(cfg);
    write(out, crate::eval::PATHS_FILE, paths_csv(&stats, &m)?)?;
    write(out, crate::eval::SUMMARY_FILE, summary_json(&stats, &m)?)?;
    Ok(stats)
}

/// One cell of the comparison table.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub environment: String,
    pub agent: AgentKind,
    pub seed: u64,
    pub config_digest: String,
    pub stats: RunStats,
}

/// `reproduce`: all three agents on every configuration, 100 evaluation
/// paths each (or the configured count), plus `comparison.csv`.
pub fn reproduce(configs: &[ExperimentConfig], out: &Path) -> Result<Vec<ComparisonRow>> {
    let cells: Vec<(&ExperimentConfig, AgentKind)> = configs
        .iter()
        .flat_map(|c| AgentKind::ALL.into_iter().map(move |k| (c, k)))
        .collect();
    let results: Vec<(RunStats, Trained)> = cells
        .par_iter()
        .map(|&(cfg, kind)| {
            let world = Gridworld::new(cfg.environment.clone())?;
            let trained = train_agent(cfg, &world, kind)?;
            let stats = run_paths(
                &world,
                &trained.policy,
                cfg.evaluation.n_paths,
                cfg.seed,
                cfg.evaluation.max_steps,
            );
            Ok((stats, trained))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(cells.len());
    for (&(cfg, kind), (stats, trained)) in cells.iter().zip(results) {
        let m = meta(cfg);
        let dir = out.join(&cfg.name).join(kind.name());
        write(&dir, crate::eval::PATHS_FILE, paths_csv(&stats, &m)?)?;
        write(&dir, crate::eval::SUMMARY_FILE, summary_json(&stats, &m)?)?;
        write(&dir, Q_FILE, q_table_csv(&cfg.environment, &trained.q, &m)?)?;
        rows.push(ComparisonRow {
            environment: cfg.name.clone(),
            agent: kind,
            seed: cfg.seed,
            config_digest: m.config_digest,
            stats,
        });
    }
    write(out, COMPARISON_FILE, comparison_csv(&rows)?)?;
    Ok(rows)
}

/// Per-agent mean visits and costs, one row per (environment, agent).
pub fn comparison_csv(rows: &[ComparisonRow]) -> Result<Vec<u8>> {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    for r in rows {
        hasher.update(r.config_digest.as_bytes());
    }
    let seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
    let seed = match seeds.first() {
        Some(&s) if seeds.iter().all(|&x| x == s) => s.to_string(),
        _ => "mixed".to_string(),
    };
    let mut buf = format!("# config_digest={:x},seed={seed}\n", hasher.finalize()).into_bytes();
    let k = rows.iter().map(|r| r.stats.mean_visits.len()).max().unwrap_or(0);
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let mut header: Vec<String> = ["environment", "agent", "seed", "config_digest", "n_paths"]
            .map(String::from)
            .to_vec();
        header.extend((1..=k).map(|z| format!("visits_obs_{z}")));
        header.extend(["mean_cost", "goal_rate"].map(String::from));
        w.write_record(&header).map_err(|e| Error::csv("<buffer>", e))?;
        for r in rows {
            let mut rec = vec![
                r.environment.clone(),
                r.agent.name().to_string(),
                r.seed.to_string(),
                r.config_digest.clone(),
                r.stats.n_paths().to_string(),
            ];
            rec.extend((0..k).map(|z| r.stats.mean_visits.get(z).map(f64::to_string).unwrap_or_default()));
            rec.push(r.stats.mean_cost.to_string());
            rec.push(r.stats.goal_rate().to_string());
            w.write_record(&rec).map_err(|e| Error::csv("<buffer>", e))?;
        }
        w.flush().map_err(|e| Error::io("<buffer>", e))?;
    }
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_config;

    const TINY: &str = r#"
        name = "tiny"
        seed = 5
        [environment]
        width = 3
        height = 1
        start = [0, 0]
        goal = [2, 0]
        [agent]
        T_max = 30
        N_max = 10
        [evaluation]
        n_paths = 4
    "#;

    #[test]
    fn epsilon_greedy_table_matches_arithmetic() {
        let q = QTable::from_values(1, 4, vec![1.0, 9.0, 9.0, 9.0]).unwrap();
        let pi = epsilon_greedy_policy(&q, 0.5);
        assert!((pi.prob(0, 0) - 0.625).abs() < 1e-12);
        assert!((pi.prob(0, 3) - 0.125).abs() < 1e-12);
    }

    #[test]
    fn train_writes_tables_that_evaluate_can_load() {
        let dir = tempfile::tempdir().unwrap();
        for kind in AgentKind::ALL {
            let mut cfg = parse_config(TINY).unwrap();
            cfg.agent = kind;
            let out = dir.path().join(kind.name());
            let files = train(&cfg, &out).unwrap();
            assert_eq!(files.len(), if kind == AgentKind::ActorCritic { 4 } else { 3 });
            let from_disk = evaluate(&cfg, &out.join("eval"), Some(&out)).unwrap();
            let in_memory = evaluate(&cfg, &out.join("eval2"), None).unwrap();
            assert_eq!(from_disk, in_memory, "{kind}");
        }
    }

    #[test]
    fn dp_solve_respects_state_cap() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = parse_config(TINY).unwrap();
        let (q, v, report) = dp_solve(&cfg, dir.path()).unwrap();
        assert_eq!(q.n_states(), 3);
        assert_eq!(v.get(2), 0.0);
        assert!(report.final_residual < 1e-8);
        assert!(dir.path().join(V_FILE).exists());
        cfg.dp.max_states = 2;
        let err = dp_solve(&cfg, dir.path()).unwrap_err();
        assert!(err.to_string().contains("dp.max_states"), "{err}");
    }

    #[test]
    fn comparison_has_one_row_per_cell() {
        let dir = tempfile::tempdir().unwrap();
        let a = parse_config(TINY).unwrap();
        let mut b = a.clone();
        b.name = "tiny_b".into();
        b.environment
            .obstacles
            .push(crate::env::Obstacle::single(crate::env::Cell::new(1, 0), 4.0));
        let rows = reproduce(&[a, b], dir.path()).unwrap();
        assert_eq!(rows.len(), 6);
        let text = fs::read_to_string(dir.path().join(COMPARISON_FILE)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# config_digest=") && lines[0].ends_with(",seed=5"));
        assert_eq!(
            lines[1],
            "environment,agent,seed,config_digest,n_paths,visits_obs_1,mean_cost,goal_rate"
        );
        assert_eq!(lines.len(), 8);
        assert!(lines[2].starts_with("tiny,sarsa,5,"));
        // the obstacle-free grid leaves its visit column empty
        assert!(lines[2].contains(",4,,"), "{}", lines[2]);
        assert!(dir.path().join("tiny_b/actor_critic/paths.csv").exists());
    }
}
