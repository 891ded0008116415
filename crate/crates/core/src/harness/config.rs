use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::controller::ControllerConfig;
use crate::envs::{Environment, GraphEnv, GridWorld, GridWorldConfig, Taxi, TaxiConfig};
use crate::planner::{DEFAULT_INF, DEFAULT_MAX_LEN};
use crate::symlang::{ground, initial_state, parse_domain, FluentAtom, TransitionSystem};
use crate::trust::TrustConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    #[default]
    Taxi,
    Gridworld,
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agent {
    Tdm,
    Q,
    P,
}

impl Agent {
    pub fn name(self) -> &'static str {
        match self {
            Agent::Tdm => "tdm",
            Agent::Q => "q",
            Agent::P => "p",
        }
    }
}

/// One transition of a `graph` environment, addressed by grounded state index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphEdge {
    pub from: usize,
    pub action: String,
    pub reward: f64,
    pub success: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphEnvConfig {
    /// Reward for transitions not listed in `edges`.
    pub default_reward: Option<f64>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QBaselineConfig {
    pub learning_rate: f64,
    pub discount: f64,
    pub epsilon: f64,
    /// Multiplier applied to ε after every episode.
    pub epsilon_decay: f64,
    pub max_steps: usize,
}

impl Default for QBaselineConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            discount: 0.99,
            epsilon: 0.1,
            epsilon_decay: 0.999,
            max_steps: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PAgentConfig {
    /// Replans allowed per episode before it is abandoned.
    pub replan_cap: usize,
}

impl Default for PAgentConfig {
    fn default() -> Self {
        Self { replan_cap: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Domain file; relative paths resolve against the config file's directory.
    pub domain: PathBuf,
    pub env: EnvKind,
    pub taxi: TaxiConfig,
    pub gridworld: GridWorldConfig,
    pub graph: GraphEnvConfig,
    /// Episodes per task.
    pub episodes: usize,
    /// Number of tasks to run in order; defaults to all the environment has.
    pub tasks: Option<usize>,
    pub seeds: Vec<u64>,
    pub agents: Vec<Agent>,
    pub explore_prob: f64,
    pub always_plan: bool,
    pub max_plan_len: usize,
    pub inf_value: f64,
    /// Episodes a newly adopted plan is executed before the agent may re-solve.
    pub max_hold_episodes: usize,
    /// Goal atoms for the shortest-plan agent, e.g. `"delivered=true"`.
    pub goal: Vec<String>,
    pub trust: TrustConfig,
    pub controller: ControllerConfig,
    pub q_baseline: QBaselineConfig,
    pub p_agent: PAgentConfig,
    pub output_dir: PathBuf,
    /// Write the trust table every this many episodes; 0 writes only the final one.
    pub trust_snapshot_interval: usize,
    pub save_qtables: bool,
    pub load_qtables: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            domain: PathBuf::new(),
            env: EnvKind::Taxi,
            taxi: TaxiConfig::default(),
            gridworld: GridWorldConfig::default(),
            graph: GraphEnvConfig::default(),
            episodes: 2000,
            tasks: None,
            seeds: vec![0],
            agents: vec![Agent::Tdm],
            explore_prob: 0.2,
            always_plan: false,
            max_plan_len: DEFAULT_MAX_LEN,
            inf_value: DEFAULT_INF,
            max_hold_episodes: 100,
            goal: Vec::new(),
            trust: TrustConfig::default(),
            controller: ControllerConfig::default(),
            q_baseline: QBaselineConfig::default(),
            p_agent: PAgentConfig::default(),
            output_dir: PathBuf::from("out"),
            trust_snapshot_interval: 0,
            save_qtables: false,
            load_qtables: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, HarnessError> {
        let mut cfg: Self =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        if cfg.domain.is_relative() {
            cfg.domain = base_dir.join(&cfg.domain);
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn check_fields(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.agents.is_empty() {
            return bad("at least one agent is required".into());
        }
        if self.episodes == 0 {
            return bad("episodes must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.explore_prob) {
            return bad(format!("explore_prob {} outside [0,1]", self.explore_prob));
        }
        if self.max_plan_len == 0 {
            return bad("max_plan_len must be at least 1".into());
        }
        let q = &self.q_baseline;
        if !(q.learning_rate > 0.0 && q.learning_rate <= 1.0)
            || !(0.0..1.0).contains(&q.discount)
            || !(0.0..=1.0).contains(&q.epsilon)
            || !(q.epsilon_decay > 0.0 && q.epsilon_decay <= 1.0)
            || q.max_steps == 0
        {
            return bad("q_baseline parameters out of range".into());
        }
        self.trust
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.controller.validate()?;
        Ok(())
    }
}

/// A validated experiment: parsed domain, grounded system and resolved goal.
#[derive(Debug, Clone)]
pub struct Setup {
    pub cfg: ExperimentConfig,
    pub ts: TransitionSystem,
    pub goal: Vec<FluentAtom>,
    pub tasks: usize,
}

impl Setup {
    pub fn new(cfg: ExperimentConfig) -> Result<Self, HarnessError> {
        cfg.check_fields()?;
        let text =
            std::fs::read_to_string(&cfg.domain).map_err(|e| HarnessError::io(&cfg.domain, e))?;
        Self::with_domain_text(cfg, &text)
    }

    /// Like [`Setup::new`] with the domain given inline; `cfg.domain` is ignored.
    pub fn with_domain_text(cfg: ExperimentConfig, text: &str) -> Result<Self, HarnessError> {
        cfg.check_fields()?;
        let d = parse_domain(text)?;
        let init = initial_state(&d).map_err(crate::symlang::GroundError::from)?;
        let ts = ground(&d, &init)?;
        let goal = cfg
            .goal
            .iter()
            .map(|g| parse_atom(g))
            .collect::<Result<Vec<_>, _>>()?;
        for a in &goal {
            if !ts.fluents().contains(&a.fluent) {
                return Err(HarnessError::Config(format!(
                    "goal fluent `{}` is not declared",
                    a.fluent
                )));
            }
        }
        let mut setup = Self {
            cfg,
            ts,
            goal,
            tasks: 1,
        };
        let env = setup.build_env()?;
        for f in setup.ts.fluents() {
            if env.fluent_id(f).is_none() {
                return Err(crate::envs::EnvError::UnknownFluent(f.clone()).into());
            }
        }
        let tasks = setup.cfg.tasks.unwrap_or(env.task_count());
        if tasks == 0 || tasks > env.task_count() {
            return Err(HarnessError::Config(format!(
                "tasks {tasks} outside 1..={}",
                env.task_count()
            )));
        }
        setup.tasks = tasks;
        setup.check_inf(env.max_abs_reward())?;
        Ok(setup)
    }

    /// Optimism must dominate any achievable plan: INF > max_len × max |ρ|.
    fn check_inf(&self, max_abs_reward: f64) -> Result<(), HarnessError> {
        let c = &self.cfg;
        let rho_bound = [
            c.trust.psi,
            c.controller.step_budget as f64 * max_abs_reward,
            c.trust.constant_subtask_reward.map_or(0.0, f64::abs),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let need = c.max_plan_len as f64 * rho_bound;
        if !(c.inf_value.is_finite() && c.inf_value > need) {
            return Err(HarnessError::Config(format!(
                "inf_value {} must exceed max_plan_len × max |rho| = {need}",
                c.inf_value
            )));
        }
        Ok(())
    }

    pub fn build_env(&self) -> Result<Box<dyn Environment>, HarnessError> {
        Ok(match self.cfg.env {
            EnvKind::Taxi => Box::new(Taxi::new(self.cfg.taxi.clone(), 1)?),
            EnvKind::Gridworld => Box::new(GridWorld::new(self.cfg.gridworld.clone())?),
            EnvKind::Graph => {
                let g = &self.cfg.graph;
                let mut rewards = BTreeMap::new();
                let mut success = BTreeMap::new();
                for e in &g.edges {
                    if self.ts.successor(e.from, &e.action).is_none() {
                        return Err(HarnessError::Config(format!(
                            "graph edge ({}, {}) is not a transition",
                            e.from, e.action
                        )));
                    }
                    rewards.insert((e.from, e.action.clone()), e.reward);
                    if let Some(p) = e.success {
                        success.insert((e.from, e.action.clone()), p);
                    }
                }
                if let Some(r) = g.default_reward {
                    for t in self.ts.transitions() {
                        rewards
                            .entry((t.from, self.ts.action_name(t).0.clone()))
                            .or_insert(r);
                    }
                }
                Box::new(GraphEnv::new(self.ts.clone(), &rewards, &success)?)
            }
        })
    }
}

/// Parse `name=true` / `name=false`.
pub fn parse_atom(s: &str) -> Result<FluentAtom, HarnessError> {
    let bad = || HarnessError::Config(format!("expected `fluent=true|false`, got `{s}`"));
    let (f, v) = s.split_once('=').ok_or_else(bad)?;
    let value = match v.trim() {
        "true" => true,
        "false" => false,
        _ => return Err(bad()),
    };
    let f = f.trim();
    if f.is_empty() {
        return Err(bad());
    }
    Ok(FluentAtom::new(f, value))
}
