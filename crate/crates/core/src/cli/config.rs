use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agents::LearningConfig;
use crate::env::{Action, GridSpec};
use crate::error::{Error, Result};
use crate::risk::{CptSpec, Side, UtilityFunction, WeightingFunction};

/// Shipped configuration of the small single-obstacle experiment.
pub const ENV1_CONFIG: &str = include_str!("../../../../configs/env1_paper.cfg");
/// Shipped configuration of the four-obstacle experiment.
pub const ENV2_CONFIG: &str = include_str!("../../../../configs/env2_paper.cfg");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Sarsa,
    ActorCritic,
    QLearning,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Sarsa, AgentKind::ActorCritic, AgentKind::QLearning];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Sarsa => "sarsa",
            AgentKind::ActorCritic => "actor_critic",
            AgentKind::QLearning => "q_learning",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig {
                key: "agent.kind".into(),
                reason: format!("expected one of sarsa, actor_critic, q_learning, got `{s}`"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskKind {
    Cpt,
    /// Risk-neutral baseline: identity utilities and weights.
    Expected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingKind {
    TverskyKahneman,
    Prelec,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiskConfig {
    pub kind: RiskKind,
    pub gain_exponent: f64,
    pub loss_exponent: f64,
    pub weighting: WeightingKind,
    pub eta_plus: f64,
    pub eta_minus: f64,
}

impl Default for RiskConfig {
    fn default() -> Self {
        Self {
            kind: RiskKind::Cpt,
            gain_exponent: 0.88,
            loss_exponent: 0.88,
            weighting: WeightingKind::TverskyKahneman,
            eta_plus: 0.61,
            eta_minus: 0.69,
        }
    }
}

impl RiskConfig {
    pub fn spec(&self) -> Result<CptSpec> {
        if self.kind == RiskKind::Expected {
            return Ok(CptSpec::identity());
        }
        let weight = |eta: f64| match self.weighting {
            WeightingKind::TverskyKahneman => WeightingFunction::tversky_kahneman(eta),
            WeightingKind::Prelec => WeightingFunction::prelec(eta),
            WeightingKind::Identity => Ok(WeightingFunction::Identity),
        };
        let build = || {
            CptSpec::new(
                UtilityFunction::power(Side::Gain, self.gain_exponent)?,
                UtilityFunction::power(Side::Loss, self.loss_exponent)?,
                weight(self.eta_plus)?,
                weight(self.eta_minus)?,
            )
        };
        build().map_err(|e| Error::InvalidConfig {
            key: "risk".into(),
            reason: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPolicy {
    /// Greedy in the learned Q table; the Gibbs policy for the actor-critic.
    Greedy,
    /// The behavior policy at the end of training.
    Behavior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub n_paths: usize,
    pub max_steps: usize,
    pub policy: EvalPolicy,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            n_paths: 100,
            max_steps: 500,
            policy: EvalPolicy::Greedy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DpPolicy {
    /// Iterate with the greedy policy of the current table.
    Greedy,
    /// Evaluate the uniform random policy.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DpConfig {
    /// Models with more states are refused.
    pub max_states: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub semantics: crate::dp::Semantics,
    pub policy: DpPolicy,
}

impl Default for DpConfig {
    fn default() -> Self {
        Self {
            max_states: 2500,
            tolerance: crate::dp::DEFAULT_TOLERANCE,
            max_iterations: crate::dp::DEFAULT_MAX_ITERATIONS,
            semantics: crate::dp::Semantics::Distributional,
            policy: DpPolicy::Greedy,
        }
    }
}

/// Learning settings for every agent kind; the `[agent]` table is shared and
/// `[agent.overrides.<kind>]` patches it per agent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentConfigs {
    pub sarsa: LearningConfig,
    pub actor_critic: LearningConfig,
    pub q_learning: LearningConfig,
}

impl AgentConfigs {
    pub fn get(&self, kind: AgentKind) -> &LearningConfig {
        match kind {
            AgentKind::Sarsa => &self.sarsa,
            AgentKind::ActorCritic => &self.actor_critic,
            AgentKind::QLearning => &self.q_learning,
        }
    }

    pub fn get_mut(&mut self, kind: AgentKind) -> &mut LearningConfig {
        match kind {
            AgentKind::Sarsa => &mut self.sarsa,
            AgentKind::ActorCritic => &mut self.actor_critic,
            AgentKind::QLearning => &mut self.q_learning,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    /// Not part of the digest: moving outputs must not change their bytes.
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub environment: GridSpec,
    pub risk: RiskConfig,
    /// Agent used by `train`, `evaluate` and `dp-solve`.
    pub agent: AgentKind,
    pub learning: AgentConfigs,
    pub evaluation: EvaluationConfig,
    pub dp: DpConfig,
}

impl ExperimentConfig {
    pub fn selected_learning(&self) -> &LearningConfig {
        self.learning.get(self.agent)
    }

    /// The configuration as JSON, echoed into summaries.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical JSON form without the seed, so that
    /// seed overrides keep the digest of the experiment they vary.
    pub fn digest(&self) -> String {
        let mut value = self.echo();
        if let Some(map) = value.as_object_mut() {
            map.remove("seed");
        }
        let hash = Sha256::digest(value.to_string().as_bytes());
        format!("{hash:x}")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    #[serde(default)]
    seed: u64,
    output_dir: Option<PathBuf>,
    environment: Option<GridSpec>,
    #[serde(default)]
    risk: RiskConfig,
    #[serde(default)]
    agent: toml::Table,
    #[serde(default)]
    evaluation: EvaluationConfig,
    #[serde(default)]
    dp: DpConfig,
}

/// Parses and validates a TOML experiment configuration. Missing keys take
/// their documented defaults; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::ConfigSyntax(e.message().to_string() + &span_note(text, e.span())))?;

    let environment = raw.environment.unwrap_or_else(GridSpec::environment_1);
    environment.validate().map_err(|e| Error::InvalidConfig {
        key: "environment".into(),
        reason: strip_prefix(e),
    })?;
    raw.risk.spec()?;

    let mut agent = raw.agent;
    let kind = match agent.remove("kind") {
        None => AgentKind::Sarsa,
        Some(toml::Value::String(s)) => s.parse()?,
        Some(other) => {
            return Err(Error::InvalidConfig {
                key: "agent.kind".into(),
                reason: format!("expected a string, got {}", other.type_str()),
            })
        }
    };
    let mut overrides = match agent.remove("overrides") {
        None => BTreeMap::new(),
        Some(toml::Value::Table(t)) => {
            let mut out = BTreeMap::new();
            for (name, value) in t {
                let kind: AgentKind = name.parse().map_err(|_| Error::InvalidConfig {
                    key: format!("agent.overrides.{name}"),
                    reason: "unknown agent".into(),
                })?;
                let toml::Value::Table(table) = value else {
                    return Err(Error::InvalidConfig {
                        key: format!("agent.overrides.{name}"),
                        reason: "expected a table".into(),
                    });
                };
                out.insert(kind, table);
            }
            out
        }
        Some(_) => {
            return Err(Error::InvalidConfig {
                key: "agent.overrides".into(),
                reason: "expected a table".into(),
            })
        }
    };

    let learning_for = |kind: AgentKind, patch: Option<toml::Table>| -> Result<LearningConfig> {
        let section = match &patch {
            Some(_) => format!("agent.overrides.{kind}"),
            None => "agent".to_string(),
        };
        let mut table = agent.clone();
        if let Some(patch) = patch {
            merge(&mut table, patch);
        }
        let cfg: LearningConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::ConfigSyntax(format!("[{section}] {}", e.message())))?;
        cfg.validate(Action::COUNT).map_err(|e| match e {
            Error::InvalidConfig { key, reason } => Error::InvalidConfig {
                key: format!("{section}.{key}"),
                reason,
            },
            other => other,
        })?;
        Ok(cfg)
    };
    let learning = AgentConfigs {
        sarsa: learning_for(AgentKind::Sarsa, overrides.remove(&AgentKind::Sarsa))?,
        actor_critic: learning_for(AgentKind::ActorCritic, overrides.remove(&AgentKind::ActorCritic))?,
        q_learning: learning_for(AgentKind::QLearning, overrides.remove(&AgentKind::QLearning))?,
    };

    let evaluation = raw.evaluation;
    if evaluation.n_paths == 0 {
        return Err(invalid("evaluation.n_paths", "must be at least 1"));
    }
    if evaluation.max_steps == 0 {
        return Err(invalid("evaluation.max_steps", "must be at least 1"));
    }
    let dp = raw.dp;
    if dp.max_states == 0 {
        return Err(invalid("dp.max_states", "must be at least 1"));
    }
    if !(dp.tolerance.is_finite() && dp.tolerance > 0.0) {
        return Err(invalid("dp.tolerance", "must be positive"));
    }
    if dp.max_iterations == 0 {
        return Err(invalid("dp.max_iterations", "must be at least 1"));
    }

    Ok(ExperimentConfig {
        name: raw.name.unwrap_or_else(|| "experiment".into()),
        seed: raw.seed,
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
        environment,
        risk: raw.risk,
        agent: kind,
        learning,
        evaluation,
        dp,
    })
}

/// Reads and parses a configuration file. Without a `name` key the file
/// stem names the experiment.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let has_name = toml::from_str::<toml::Table>(&text)
        .map(|t| t.contains_key("name"))
        .unwrap_or(false);
    let mut cfg = parse_config(&text).map_err(|e| match e {
        Error::ConfigSyntax(msg) => Error::ConfigSyntax(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    if !has_name {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            cfg.name = stem.to_string();
        }
    }
    Ok(cfg)
}

fn invalid(key: &str, reason: &str) -> Error {
    Error::InvalidConfig {
        key: key.into(),
        reason: reason.into(),
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::InvalidGrid(msg) => msg,
        other => other.to_string(),
    }
}

fn span_note(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let line = text[..r.start.min(text.len())].matches('\n').count() + 1;
            format!(" (line {line})")
        }
        None => String::new(),
    }
}

/// Recursive table merge; `patch` wins on conflicts.
fn merge(base: &mut toml::Table, patch: toml::Table) {
    for (key, value) in patch {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(p)) => merge(b, p),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}
