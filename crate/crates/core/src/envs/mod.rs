//! Discrete environments and the mapping from symbolic atoms to their states.

pub mod graph;
pub mod gridworld;
pub mod taxi;

use rand::RngCore;
use thiserror::Error;

use crate::symlang::FluentAtom;

pub use graph::GraphEnv;
pub use gridworld::{
    Bumper, BumperColor, DoorFailureMode, DoorStage, GridWorld, GridWorldConfig, GridWorldState,
};
pub use taxi::{Taxi, TaxiConfig, TaxiState};

/// Canonical discrete encoding of an environment state.
pub type StateKey = u64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("environment does not ground fluent `{0}`")]
    UnknownFluent(String),
    #[error("invalid environment configuration: {0}")]
    Config(String),
    #[error("task {task} out of range 1..={max}")]
    Task { task: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub key: StateKey,
    pub reward: f64,
    pub done: bool,
}

/// A designer-provided primitive action for reaching some target atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scripted {
    pub action: usize,
    /// The script gives up after this action instead of retrying.
    pub one_shot: bool,
}

pub trait Environment: Send {
    /// Primitive action names; actions are addressed by index.
    fn actions(&self) -> &[String];

    fn reset(&mut self, rng: &mut dyn RngCore) -> StateKey;

    /// Total over declared actions.
    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> StepResult;

    fn state_key(&self) -> StateKey;

    fn is_done(&self) -> bool;

    /// Fluents this environment grounds, addressed by index.
    fn fluents(&self) -> &[String];

    /// Truth value of fluent `id` in the current state.
    fn fluent(&self, id: usize) -> bool;

    /// Bound on |reward| of a single step.
    fn max_abs_reward(&self) -> f64;

    /// Hand-written policy step toward `target`, used by the non-learning agent.
    fn scripted_action(&self, target: &[FluentAtom]) -> Option<Scripted>;

    fn task_count(&self) -> usize {
        1
    }

    fn set_task(&mut self, task: usize) -> Result<(), EnvError> {
        if task == 1 {
            Ok(())
        } else {
            Err(EnvError::Task { task, max: 1 })
        }
    }

    fn fluent_id(&self, name: &str) -> Option<usize> {
        self.fluents().iter().position(|f| f == name)
    }

    /// All grounded atoms of the current state.
    fn fluent_eval(&self) -> Vec<FluentAtom> {
        self.fluents()
            .iter()
            .enumerate()
            .map(|(i, f)| FluentAtom::new(f.clone(), self.fluent(i)))
            .collect()
    }
}

/// Atoms resolved against one environment's fluent indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledAtoms(Vec<(usize, bool)>);

impl CompiledAtoms {
    pub fn new(atoms: &[FluentAtom], env: &dyn Environment) -> Result<Self, EnvError> {
        atoms
            .iter()
            .map(|a| {
                env.fluent_id(&a.fluent)
                    .map(|i| (i, a.value))
                    .ok_or_else(|| EnvError::UnknownFluent(a.fluent.clone()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    pub fn holds(&self, env: &dyn Environment) -> bool {
        self.0.iter().all(|&(i, v)| env.fluent(i) == v)
    }
}

/// True iff every atom holds in the environment's current state.
pub fn mapping_check(atoms: &[FluentAtom], env: &dyn Environment) -> Result<bool, EnvError> {
    Ok(CompiledAtoms::new(atoms, env)?.holds(env))
}

/// Breadth-first distances over a 4-connected grid; `blocked(from, to)` vetoes a move.
pub(crate) fn bfs_grid(
    width: i32,
    height: i32,
    start: (i32, i32),
    blocked: impl Fn((i32, i32), (i32, i32)) -> bool,
) -> Vec<Option<u32>> {
    let idx = |(x, y): (i32, i32)| (y * width + x) as usize;
    let mut dist = vec![None; (width * height) as usize];
    let mut queue = std::collections::VecDeque::from([start]);
    dist[idx(start)] = Some(0);
    while let Some(c) = queue.pop_front() {
        let d = dist[idx(c)].unwrap();
        for (dx, dy) in [(0, -1), (0, 1), (1, 0), (-1, 0)] {
            let n = (c.0 + dx, c.1 + dy);
            if n.0 < 0 || n.1 < 0 || n.0 >= width || n.1 >= height || blocked(c, n) {
                continue;
            }
            if dist[idx(n)].is_none() {
                dist[idx(n)] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}
