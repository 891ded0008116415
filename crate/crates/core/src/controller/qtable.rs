use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::{Rng, RngCore};

use super::{ControllerConfig, ControllerError};
use crate::envs::StateKey;

/// Tabular action values for one option, keyed by environment state.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    values: HashMap<StateKey, Vec<f64>>,
    n_actions: usize,
    learning_rate: f64,
    discount: f64,
    epsilon: f64,
    epsilon_decay: f64,
}

impl QTable {
    pub fn new(n_actions: usize, cfg: &ControllerConfig) -> Self {
        assert!(n_actions > 0, "a Q-table needs at least one action");
        Self {
            values: HashMap::new(),
            n_actions,
            learning_rate: cfg.learning_rate,
            discount: cfg.discount,
            epsilon: cfg.epsilon_greedy,
            epsilon_decay: if cfg.epsilon_decay_enabled {
                cfg.epsilon_decay
            } else {
                1.0
            },
        }
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn set_epsilon(&mut self, epsilon: f64) {
        self.epsilon = epsilon;
    }

    pub fn decay_epsilon(&mut self) {
        self.epsilon *= self.epsilon_decay;
    }

    pub fn get(&self, key: StateKey, action: usize) -> f64 {
        self.values.get(&key).map_or(0.0, |row| row[action])
    }

    pub fn max_value(&self, key: StateKey) -> f64 {
        self.values.get(&key).map_or(0.0, |row| {
            row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        })
    }

    /// Greedy action, ties broken uniformly at random.
    pub fn greedy(&self, key: StateKey, rng: &mut dyn RngCore) -> usize {
        let Some(row) = self.values.get(&key) else {
            return rng.gen_range(0..self.n_actions);
        };
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<usize> = (0..self.n_actions).filter(|&a| row[a] == best).collect();
        ties[rng.gen_range(0..ties.len())]
    }

    pub fn select(&self, key: StateKey, rng: &mut dyn RngCore) -> usize {
        if rng.gen::<f64>() < self.epsilon {
            rng.gen_range(0..self.n_actions)
        } else {
            self.greedy(key, rng)
        }
    }

    /// One temporal-difference step; `terminal` drops the bootstrap term.
    pub fn update(
        &mut self,
        key: StateKey,
        action: usize,
        reward: f64,
        next: StateKey,
        terminal: bool,
    ) {
        let bootstrap = if terminal {
            0.0
        } else {
            self.discount * self.max_value(next)
        };
        let n = self.n_actions;
        let q = &mut self.values.entry(key).or_insert_with(|| vec![0.0; n])[action];
        *q += self.learning_rate * (reward + bootstrap - *q);
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .values()
            .flatten()
            .fold(0.0, |m, q| f64::max(m, q.abs()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Write `state_key<TAB>action<TAB>q` lines, sorted by key then action.
    pub fn save(&self, out: &mut dyn Write, action_names: &[String]) -> std::io::Result<()> {
        let mut keys: Vec<_> = self.values.keys().copied().collect();
        keys.sort_unstable();
        for k in keys {
            for (a, q) in self.values[&k].iter().enumerate() {
                writeln!(out, "{k}\t{}\t{q:?}", action_names[a])?;
            }
        }
        Ok(())
    }

    pub fn load(
        &mut self,
        input: &mut dyn BufRead,
        action_names: &[String],
    ) -> Result<(), ControllerError> {
        let n = self.n_actions;
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| ControllerError::Checkpoint(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |m: &str| ControllerError::Checkpoint(format!("line {}: {m}", i + 1));
            let mut parts = line.split('\t');
            let (Some(k), Some(a), Some(q), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad("expected three tab-separated fields"));
            };
            let k: StateKey = k.parse().map_err(|_| bad("bad state key"))?;
            let a = action_names
                .iter()
                .position(|n| n == a)
                .ok_or_else(|| bad("unknown action"))?;
            let q: f64 = q.parse().map_err(|_| bad("bad value"))?;
            if !q.is_finite() {
                return Err(bad("non-finite value"));
            }
            self.values.entry(k).or_insert_with(|| vec![0.0; n])[a] = q;
        }
        Ok(())
    }
}
