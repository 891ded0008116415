//! Trust evaluation: per-step trustworthiness, per-subtask success windows,
//! subtask rewards and the average-reward (R-learning) gain estimates that
//! feed the planner.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::{GainTable, PlanError, PlanStep};
use crate::symlang::TransitionSystem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrustError {
    #[error("{name} must lie in {range}, got {value}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },
}

/// Which state the R-learning update treats as the successor of a subtask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Successor {
    /// The subtask's own source state: each subtask is evaluated as a
    /// recurrent process, so ρ(s,o) tracks r_e(s,o) independent of the plan.
    #[default]
    #[serde(rename = "self")]
    SelfLoop,
    /// The symbolic successor, wrapping to the initial state after the last step.
    Restart,
    /// The symbolic successor; terminal states contribute 0.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrustConfig {
    pub alpha: f64,
    pub beta_rate: f64,
    pub psi: f64,
    pub success_threshold: f64,
    pub window_size: usize,
    /// Replaces the environment-derived reward once a subtask is reliable.
    pub constant_subtask_reward: Option<f64>,
    pub successor: Successor,
}

impl Default for TrustConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            beta_rate: 0.1,
            psi: 100.0,
            success_threshold: 0.9,
            window_size: 100,
            constant_subtask_reward: None,
            successor: Successor::SelfLoop,
        }
    }
}

impl TrustConfig {
    pub fn validate(&self) -> Result<(), TrustError> {
        let unit = |name, value: f64| {
            if value > 0.0 && value <= 1.0 {
                Ok(())
            } else {
                Err(TrustError::OutOfRange {
                    name,
                    range: "(0, 1]",
                    value,
                })
            }
        };
        unit("alpha", self.alpha)?;
        unit("beta_rate", self.beta_rate)?;
        if !(self.psi > 0.0 && self.psi.is_finite()) {
            return Err(TrustError::OutOfRange {
                name: "psi",
                range: "(0, inf)",
                value: self.psi,
            });
        }
        if !(0.0..=1.0).contains(&self.success_threshold) {
            return Err(TrustError::OutOfRange {
                name: "success_threshold",
                range: "[0, 1]",
                value: self.success_threshold,
            });
        }
        if self.window_size == 0 {
            return Err(TrustError::OutOfRange {
                name: "window_size",
                range: "[1, inf)",
                value: 0.0,
            });
        }
        if let Some(c) = self.constant_subtask_reward {
            if !c.is_finite() {
                return Err(TrustError::OutOfRange {
                    name: "constant_subtask_reward",
                    range: "finite",
                    value: c,
                });
            }
        }
        Ok(())
    }
}

/// +1 when the option's termination condition fired, −1 otherwise.
pub fn trustworthiness(terminated: bool) -> i32 {
    if terminated {
        1
    } else {
        -1
    }
}

/// Outcomes and environment returns of a subtask's most recent executions.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessWindow {
    outcomes: VecDeque<bool>,
    returns: VecDeque<f64>,
    capacity: usize,
    executions: u64,
}

impl SuccessWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "window capacity must be positive");
        Self {
            outcomes: VecDeque::with_capacity(capacity),
            returns: VecDeque::with_capacity(capacity),
            capacity,
            executions: 0,
        }
    }

    pub fn record(&mut self, success: bool, env_return: f64) {
        if self.outcomes.len() == self.capacity {
            self.outcomes.pop_front();
            self.returns.pop_front();
        }
        self.outcomes.push_back(success);
        self.returns.push_back(env_return);
        self.executions += 1;
    }

    /// Fraction of successes in the window; 0 when empty.
    pub fn ratio(&self) -> f64 {
        if self.outcomes.is_empty() {
            return 0.0;
        }
        self.outcomes.iter().filter(|&&o| o).count() as f64 / self.outcomes.len() as f64
    }

    /// Mean environment return over the window; 0 when empty.
    pub fn env_return_avg(&self) -> f64 {
        if self.returns.is_empty() {
            return 0.0;
        }
        self.returns.iter().sum::<f64>() / self.returns.len() as f64
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.outcomes.len() == self.capacity
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Executions recorded over the window's lifetime.
    pub fn executions(&self) -> u64 {
        self.executions
    }
}

/// −ψ while the success ratio is below the threshold, else the environment
/// value of the subtask (or the configured constant).
pub fn subtask_reward(w: &SuccessWindow, cfg: &TrustConfig) -> f64 {
    if w.ratio() < cfg.success_threshold {
        -cfg.psi
    } else {
        cfg.constant_subtask_reward
            .unwrap_or_else(|| w.env_return_avg())
    }
}

/// R(s,o) and ρ(s,o), both defaulting to 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RTable {
    r_values: BTreeMap<(usize, String), f64>,
    rho_estimates: BTreeMap<(usize, String), f64>,
}

impl RTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn r(&self, s: usize, o: &str) -> f64 {
        self.r_values
            .get(&(s, o.to_string()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn rho(&self, s: usize, o: &str) -> f64 {
        self.rho_estimates
            .get(&(s, o.to_string()))
            .copied()
            .unwrap_or(0.0)
    }

    /// max over actions available at `s` of R(s,·); 0 when `s` has none.
    pub fn max_r(&self, ts: &TransitionSystem, s: usize) -> f64 {
        ts.outgoing(s)
            .map(|t| self.r(s, ts.action_name(t).as_str()))
            .reduce(f64::max)
            .unwrap_or(0.0)
    }

    /// One R-learning step. `s_next = None` is a terminal successor (value 0).
    /// Both tables are updated from the pre-update values.
    pub fn update(
        &mut self,
        ts: &TransitionSystem,
        s: usize,
        o: &str,
        s_next: Option<usize>,
        r_e: f64,
        cfg: &TrustConfig,
    ) {
        let r_old = self.r(s, o);
        let rho_old = self.rho(s, o);
        let v_next = s_next.map_or(0.0, |n| self.max_r(ts, n));
        let v_here = self.max_r(ts, s);
        let r_new = r_old + cfg.alpha * (r_e - rho_old + v_next - r_old);
        let rho_new = rho_old + cfg.beta_rate * (r_e + v_next - v_here - rho_old);
        self.r_values.insert((s, o.to_string()), r_new);
        self.rho_estimates.insert((s, o.to_string()), rho_new);
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &str, f64, f64)> + '_ {
        self.rho_estimates
            .iter()
            .map(|((s, o), rho)| (*s, o.as_str(), self.r(*s, o), *rho))
    }
}

/// Free-function form of [`RTable::update`].
pub fn r_update(
    rt: &mut RTable,
    ts: &TransitionSystem,
    s: usize,
    o: &str,
    s_next: Option<usize>,
    r_e: f64,
    cfg: &TrustConfig,
) {
    rt.update(ts, s, o, s_next, r_e, cfg);
}

/// Copy ρ estimates for the given steps into the gain table.
pub fn sync_gain_table(
    rt: &RTable,
    g: &mut GainTable,
    steps: &[PlanStep],
) -> Result<(), PlanError> {
    for st in steps {
        g.set(
            st.from,
            st.action.as_str(),
            rt.rho(st.from, st.action.as_str()),
        )?;
    }
    Ok(())
}
