//! Plan search over a grounded transition system.
//!
//! Plan quality is the sum of gain values along the plan. Unknown gains read
//! as a large finite `inf_value`, so untried transitions look attractive.

mod oracle;
mod solve;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::symlang::{ActionSymbol, TransitionSystem};

pub use oracle::{brute_force_optimal, simple_path_count, RewardMap};
pub use solve::solve;

pub const DEFAULT_INF: f64 = 1e6;
pub const DEFAULT_MAX_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("gain value for ({state}, {action}) is not finite: {value}")]
    NonFinite {
        state: usize,
        action: String,
        value: f64,
    },
    #[error("inf_value must be positive and finite, got {0}")]
    BadInf(f64),
    #[error("no reward given for transition ({state}, {action})")]
    MissingReward { state: usize, action: String },
    #[error("step {index} does not chain in the transition system")]
    Broken { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanStep {
    pub from: usize,
    pub action: ActionSymbol,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    pub quality: f64,
}

impl Plan {
    pub fn empty() -> Self {
        Self {
            steps: Vec::new(),
            quality: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn action_names(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.action.as_str()).collect()
    }

    /// Compact identifier: action names joined by `>`, or `-` for the empty plan.
    pub fn id(&self) -> String {
        if self.steps.is_empty() {
            "-".into()
        } else {
            self.action_names().join(">")
        }
    }

    /// Same steps, ignoring cached quality.
    pub fn same_path(&self, other: &Plan) -> bool {
        self.steps == other.steps
    }

    /// Check that steps chain from `ts.initial()` through existing transitions.
    pub fn validate(&self, ts: &TransitionSystem) -> Result<(), PlanError> {
        let mut at = ts.initial();
        for (index, st) in self.steps.iter().enumerate() {
            if st.from != at || ts.successor(st.from, st.action.as_str()) != Some(st.to) {
                return Err(PlanError::Broken { index });
            }
            at = st.to;
        }
        Ok(())
    }

    /// One line per step, `<from> --<action>--> <to> rho=<value>`, then `quality=<value>`.
    pub fn trace(&self, g: &GainTable) -> String {
        let mut out = String::new();
        for st in &self.steps {
            let _ = writeln!(
                out,
                "{} --{}--> {} rho={}",
                st.from,
                st.action,
                st.to,
                g.get(st.from, st.action.as_str())
            );
        }
        let _ = writeln!(out, "quality={}", self.quality);
        out
    }
}

/// Gain values per (state, action); absent entries read as `inf_value`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainTable {
    entries: BTreeMap<(usize, String), f64>,
    inf_value: f64,
}

impl Default for GainTable {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
            inf_value: DEFAULT_INF,
        }
    }
}

impl GainTable {
    pub fn new(inf_value: f64) -> Result<Self, PlanError> {
        if !(inf_value.is_finite() && inf_value > 0.0) {
            return Err(PlanError::BadInf(inf_value));
        }
        Ok(Self {
            entries: BTreeMap::new(),
            inf_value,
        })
    }

    pub fn inf_value(&self) -> f64 {
        self.inf_value
    }

    pub fn get(&self, state: usize, action: &str) -> f64 {
        self.entries
            .get(&(state, action.to_string()))
            .copied()
            .unwrap_or(self.inf_value)
    }

    pub fn stored(&self, state: usize, action: &str) -> Option<f64> {
        self.entries.get(&(state, action.to_string())).copied()
    }

    pub fn set(&mut self, state: usize, action: &str, value: f64) -> Result<(), PlanError> {
        if !value.is_finite() {
            return Err(PlanError::NonFinite {
                state,
                action: action.to_string(),
                value,
            });
        }
        self.entries.insert((state, action.to_string()), value);
        Ok(())
    }

    /// Number of stored (finite) entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, f64)> + '_ {
        self.entries.iter().map(|((s, a), v)| (*s, a.as_str(), *v))
    }
}

/// Sum of gain values over the plan's steps, left to right; empty plan is 0.
pub fn plan_quality(p: &Plan, g: &GainTable) -> f64 {
    p.steps
        .iter()
        .fold(0.0, |acc, st| acc + g.get(st.from, st.action.as_str()))
}

/// Total order used by both search and oracle: higher quality first, then
/// fewer steps, then lexicographically smaller action names.
pub(crate) fn better(q_a: f64, a: &[&str], q_b: f64, b: &[&str]) -> bool {
    if q_a != q_b {
        return q_a > q_b;
    }
    if a.len() != b.len() {
        return a.len() < b.len();
    }
    a < b
}
