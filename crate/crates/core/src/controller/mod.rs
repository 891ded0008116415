//! Options induced from symbolic transitions, learned by tabular Q-learning
//! on the ±1 trustworthiness signal.

mod qtable;

use std::hash::{Hash, Hasher};

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envs::{CompiledAtoms, EnvError, Environment, StateKey};
use crate::symlang::{ActionSymbol, FluentAtom, SymbolicState, TransitionSystem};
use crate::trust::trustworthiness;

pub use qtable::QTable;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControllerError {
    #[error("option source and target are the same state")]
    InvalidOption,
    #[error("option `{0}` started outside its initiation set")]
    InitiationViolation(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("invalid controller configuration: {0}")]
    Config(String),
    #[error("Q-table checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    pub learning_rate: f64,
    pub discount: f64,
    pub epsilon_greedy: f64,
    /// Multiplier applied to ε after every option execution.
    pub epsilon_decay: f64,
    pub epsilon_decay_enabled: bool,
    pub step_budget: usize,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            discount: 0.95,
            epsilon_greedy: 0.1,
            epsilon_decay: 0.999,
            epsilon_decay_enabled: true,
            step_budget: 200,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<(), ControllerError> {
        let bad = |m: String| Err(ControllerError::Config(m));
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad(format!(
                "learning_rate {} outside (0,1]",
                self.learning_rate
            ));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return bad(format!("discount {} outside [0,1)", self.discount));
        }
        if !(0.0..=1.0).contains(&self.epsilon_greedy) {
            return bad(format!(
                "epsilon_greedy {} outside [0,1]",
                self.epsilon_greedy
            ));
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0) {
            return bad(format!(
                "epsilon_decay {} outside (0,1]",
                self.epsilon_decay
            ));
        }
        if self.step_budget == 0 {
            return bad("step_budget must be positive".into());
        }
        Ok(())
    }
}

/// A subtask induced from one symbolic transition. Initiation holds where
/// the source atoms map to the environment state; termination where the
/// target atoms do. Equality and hashing use (source, target) only.
#[derive(Debug, Clone)]
pub struct OptionSpec {
    pub source: SymbolicState,
    pub target: SymbolicState,
    pub action: ActionSymbol,
    source_atoms: Vec<FluentAtom>,
    target_atoms: Vec<FluentAtom>,
}

impl PartialEq for OptionSpec {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target
    }
}

impl Eq for OptionSpec {}

impl Hash for OptionSpec {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.source.hash(h);
        self.target.hash(h);
    }
}

impl OptionSpec {
    pub fn source_atoms(&self) -> &[FluentAtom] {
        &self.source_atoms
    }

    pub fn target_atoms(&self) -> &[FluentAtom] {
        &self.target_atoms
    }

    /// Resolve both atom sets against an environment's fluents.
    pub fn compile(&self, env: &dyn Environment) -> Result<CompiledOption, ControllerError> {
        Ok(CompiledOption {
            name: self.action.0.clone(),
            source: CompiledAtoms::new(&self.source_atoms, env)?,
            target: CompiledAtoms::new(&self.target_atoms, env)?,
        })
    }
}

pub fn induce_option(
    source: &SymbolicState,
    target: &SymbolicState,
    action: &ActionSymbol,
    fluents: &[String],
) -> Result<OptionSpec, ControllerError> {
    if source == target {
        return Err(ControllerError::InvalidOption);
    }
    Ok(OptionSpec {
        source: source.clone(),
        target: target.clone(),
        action: action.clone(),
        source_atoms: source.atoms(fluents),
        target_atoms: target.atoms(fluents),
    })
}

/// Option for transition `(from, action)` of a grounded system.
pub fn option_for(
    ts: &TransitionSystem,
    from: usize,
    action: &str,
) -> Option<Result<OptionSpec, ControllerError>> {
    let to = ts.successor(from, action)?;
    Some(induce_option(
        ts.state(from),
        ts.state(to),
        &ActionSymbol::new(action),
        ts.fluents(),
    ))
}

#[derive(Debug, Clone)]
pub struct CompiledOption {
    pub name: String,
    pub source: CompiledAtoms,
    pub target: CompiledAtoms,
}

impl CompiledOption {
    pub fn can_start(&self, env: &dyn Environment) -> bool {
        self.source.holds(env)
    }

    pub fn terminated(&self, env: &dyn Environment) -> bool {
        self.target.holds(env)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExecutionOutcome {
    pub terminated: bool,
    pub steps_used: usize,
    pub env_return: f64,
    pub final_env_state: StateKey,
    /// The environment episode ended during this execution.
    pub episode_done: bool,
}

/// Run the option's ε-greedy policy until termination, budget exhaustion or
/// episode end, learning from the trustworthiness signal at every step.
/// An episode that ends before termination is scored as −1 forever, so
/// ending the episode is never an escape from step costs. ε decays once per
/// call.
pub fn execute_option(
    env: &mut dyn Environment,
    opt: &CompiledOption,
    q: &mut QTable,
    budget: usize,
    rng: &mut dyn RngCore,
) -> Result<ExecutionOutcome, ControllerError> {
    if !opt.can_start(env) {
        return Err(ControllerError::InitiationViolation(opt.name.clone()));
    }
    let mut key = env.state_key();
    let mut out = ExecutionOutcome {
        terminated: false,
        steps_used: 0,
        env_return: 0.0,
        final_env_state: key,
        episode_done: env.is_done(),
    };
    while out.steps_used < budget && !out.episode_done {
        let a = q.select(key, rng);
        let step = env.step(a, rng);
        out.steps_used += 1;
        out.env_return += step.reward;
        out.terminated = opt.terminated(env);
        out.episode_done = step.done;
        let t_e = trustworthiness(out.terminated) as f64;
        if step.done && !out.terminated {
            // The target is now unreachable: −1 at every future step.
            q.update(key, a, t_e / (1.0 - q.discount()), step.key, true);
        } else {
            q.update(key, a, t_e, step.key, out.terminated);
        }
        key = step.key;
        if out.terminated {
            break;
        }
    }
    out.final_env_state = key;
    q.decay_epsilon();
    Ok(out)
}
