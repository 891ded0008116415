//! Experiment orchestration: the plan–execute–evaluate loop, the flat
//! Q-learning and shortest-plan baselines, and CSV output.

mod baselines;
mod config;
mod output;
mod tdm;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::controller::ControllerError;
use crate::envs::EnvError;
use crate::planner::{Plan, PlanError};
use crate::symlang::{GroundError, ParseError};

pub use baselines::{run_p_agent, run_q_baseline, shortest_plan};
pub use config::{
    parse_atom, Agent, EnvKind, ExperimentConfig, GraphEdge, GraphEnvConfig, PAgentConfig,
    QBaselineConfig, Setup,
};
pub use output::{emit_csv, write_run};
pub use tdm::run_tdm;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One row of a run's episode log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    /// Zero-based across all tasks.
    pub episode: usize,
    pub task: usize,
    pub reward: f64,
    pub plan_id: String,
    pub plan_quality: f64,
    /// `(subtask, success ratio)` for subtasks executed this episode.
    pub ratios: Vec<(String, f64)>,
    pub failures: u32,
}

/// Plan in force at the end of a task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSummary {
    pub task: usize,
    pub plan: Plan,
}

/// A change of incumbent plan, with the incumbent's quality at that moment.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSwitch {
    pub episode: usize,
    pub incumbent_quality: f64,
    pub new_quality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrustRow {
    pub episode: usize,
    pub subtask: String,
    pub state: usize,
    pub success_ratio: f64,
    pub rho: f64,
    pub r_value: f64,
    pub executions: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub agent: Agent,
    pub seed: u64,
    pub records: Vec<EpisodeRecord>,
    pub tasks: Vec<TaskSummary>,
    pub switches: Vec<PlanSwitch>,
    pub planner_calls: usize,
    pub no_plan_results: usize,
    pub final_plan: Plan,
    /// Planner trace of the final plan.
    pub final_trace: String,
    pub trust: Vec<TrustRow>,
    /// `(file name, contents)` of Q-table checkpoints.
    pub checkpoints: Vec<(String, String)>,
    /// Largest |Q| over every table the run trained.
    pub max_abs_q: f64,
}

impl RunLog {
    pub(crate) fn new(agent: Agent, seed: u64) -> Self {
        Self {
            agent,
            seed,
            records: Vec::new(),
            tasks: Vec::new(),
            switches: Vec::new(),
            planner_calls: 0,
            no_plan_results: 0,
            final_plan: Plan::empty(),
            final_trace: String::new(),
            trust: Vec::new(),
            checkpoints: Vec::new(),
            max_abs_q: 0.0,
        }
    }
}

/// Subtask identifier used in logs: `<state>:<action>`.
pub fn subtask_id(state: usize, action: &str) -> String {
    format!("{state}:{action}")
}

/// Run one agent for every configured seed, in parallel; results keep seed order.
pub fn run_agent(setup: &Setup, agent: Agent) -> Result<Vec<RunLog>, HarnessError> {
    setup
        .cfg
        .seeds
        .par_iter()
        .map(|&seed| match agent {
            Agent::Tdm => run_tdm(setup, seed),
            Agent::Q => run_q_baseline(setup, seed),
            Agent::P => run_p_agent(setup, seed),
        })
        .collect()
}

/// Mix for the exploration stream so it is independent of the environment stream.
pub(crate) const EXPLORE_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;
