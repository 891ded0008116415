use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::semantics::{Dynamics, SemanticsError};
use super::{ActionDescription, ActionSymbol, FluentAtom, SymbolicState};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("state space exceeds cap of {0} states")]
    StateExplosion(usize),
    #[error("invalid transition system: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: usize,
    /// Index into [`TransitionSystem::actions`].
    pub action: usize,
    pub to: usize,
}

/// Deterministic graph of symbolic states reachable from `initial`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSystem {
    fluents: Vec<String>,
    actions: Vec<ActionSymbol>,
    states: Vec<SymbolicState>,
    transitions: Vec<Transition>,
    initial: usize,
    // Per state: transition indices sorted by action name.
    outgoing: Vec<Vec<usize>>,
    index: HashMap<SymbolicState, usize>,
}

impl TransitionSystem {
    /// Build from explicit parts, checking index validity, determinism and reachability.
    pub fn from_parts(
        fluents: Vec<String>,
        actions: Vec<ActionSymbol>,
        states: Vec<SymbolicState>,
        transitions: Vec<Transition>,
        initial: usize,
    ) -> Result<Self, GroundError> {
        let n = states.len();
        if initial >= n {
            return Err(GroundError::Invalid(format!(
                "initial index {initial} out of range"
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, s) in states.iter().enumerate() {
            if s.len() != fluents.len() {
                return Err(GroundError::Invalid(format!("state {i} has wrong arity")));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(GroundError::Invalid(format!("state {i} duplicated")));
            }
        }
        let mut outgoing = vec![Vec::new(); n];
        for (k, t) in transitions.iter().enumerate() {
            if t.from >= n || t.to >= n || t.action >= actions.len() {
                return Err(GroundError::Invalid(format!(
                    "transition {k} has invalid index"
                )));
            }
            if outgoing[t.from]
                .iter()
                .any(|&j: &usize| transitions[j].action == t.action)
            {
                return Err(GroundError::Invalid(format!(
                    "state {} has two successors under `{}`",
                    t.from, actions[t.action]
                )));
            }
            outgoing[t.from].push(k);
        }
        for out in &mut outgoing {
            out.sort_by(|&a, &b| {
                actions[transitions[a].action].cmp(&actions[transitions[b].action])
            });
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([initial]);
        seen[initial] = true;
        while let Some(s) = queue.pop_front() {
            for &k in &outgoing[s] {
                let to = transitions[k].to;
                if !seen[to] {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
        if let Some(u) = seen.iter().position(|&x| !x) {
            return Err(GroundError::Invalid(format!("state {u} unreachable")));
        }
        Ok(Self {
            fluents,
            actions,
            states,
            transitions,
            initial,
            outgoing,
            index,
        })
    }

    pub fn fluents(&self) -> &[String] {
        &self.fluents
    }

    pub fn actions(&self) -> &[ActionSymbol] {
        &self.actions
    }

    pub fn states(&self) -> &[SymbolicState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &SymbolicState {
        &self.states[i]
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn find_state(&self, s: &SymbolicState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn state_atoms(&self, i: usize) -> Vec<FluentAtom> {
        self.states[i].atoms(&self.fluents)
    }

    pub fn action_name(&self, t: &Transition) -> &ActionSymbol {
        &self.actions[t.action]
    }

    /// Outgoing transitions of `s`, in action-name order.
    pub fn outgoing(&self, s: usize) -> impl Iterator<Item = &Transition> + '_ {
        self.outgoing[s].iter().map(move |&k| &self.transitions[k])
    }

    pub fn successor(&self, s: usize, action: &str) -> Option<usize> {
        self.outgoing(s)
            .find(|t| self.actions[t.action].0 == action)
            .map(|t| t.to)
    }
}

/// Breadth-first closure of `apply` from `init`, actions tried in declaration order.
pub fn ground(
    d: &ActionDescription,
    init: &SymbolicState,
) -> Result<TransitionSystem, GroundError> {
    ground_with_cap(d, init, DEFAULT_STATE_CAP)
}

pub fn ground_with_cap(
    d: &ActionDescription,
    init: &SymbolicState,
    cap: usize,
) -> Result<TransitionSystem, GroundError> {
    if init.len() != d.fluents.len() {
        return Err(SemanticsError::Arity {
            got: init.len(),
            want: d.fluents.len(),
        }
        .into());
    }
    let dy = Dynamics::new(d);
    if let Some(law) = dy.static_violation(init) {
        return Err(SemanticsError::StaticViolation(law.to_string()).into());
    }
    let mut states = vec![init.clone()];
    let mut index: HashMap<SymbolicState, usize> = HashMap::from([(init.clone(), 0)]);
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for a in 0..dy.action_count() {
            let Some(next) = dy.apply_id(&states[i], a)? else {
                continue;
            };
            let to = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if states.len() >= cap {
                        return Err(GroundError::StateExplosion(cap));
                    }
                    let j = states.len();
                    index.insert(next.clone(), j);
                    states.push(next);
                    queue.push_back(j);
                    j
                }
            };
            transitions.push(Transition {
                from: i,
                action: a,
                to,
            });
        }
    }
    TransitionSystem::from_parts(d.fluents.clone(), d.actions.clone(), states, transitions, 0)
}
