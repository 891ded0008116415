//! An environment that executes a transition system directly.
//!
//! Each primitive action is a symbolic action name. Defined transitions pay a
//! configured reward and may fail with some probability, leaving the state
//! unchanged at zero reward. Undefined actions are no-ops.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use super::{EnvError, Environment, Scripted, StateKey, StepResult};
use crate::symlang::{FluentAtom, TransitionSystem};

pub struct GraphEnv {
    ts: TransitionSystem,
    actions: Vec<String>,
    /// (state, action index) -> (successor, reward, success probability)
    edges: BTreeMap<(usize, usize), (usize, f64, f64)>,
    terminal: Vec<bool>,
    state: usize,
}

impl GraphEnv {
    /// `rewards` must cover every transition; `success` defaults to 1.
    pub fn new(
        ts: TransitionSystem,
        rewards: &BTreeMap<(usize, String), f64>,
        success: &BTreeMap<(usize, String), f64>,
    ) -> Result<Self, EnvError> {
        let actions: Vec<String> = ts.actions().iter().map(|a| a.0.clone()).collect();
        let mut edges = BTreeMap::new();
        for t in ts.transitions() {
            let name = &actions[t.action];
            let key = (t.from, name.clone());
            let r = *rewards
                .get(&key)
                .ok_or_else(|| EnvError::Config(format!("no reward for ({}, {name})", t.from)))?;
            let p = success.get(&key).copied().unwrap_or(1.0);
            if !r.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(EnvError::Config(format!(
                    "bad reward or probability for ({}, {name})",
                    t.from
                )));
            }
            edges.insert((t.from, t.action), (t.to, r, p));
        }
        let mut terminal = vec![true; ts.state_count()];
        for t in ts.transitions() {
            terminal[t.from] = false;
        }
        let state = ts.initial();
        Ok(Self {
            ts,
            actions,
            edges,
            terminal,
            state,
        })
    }

    pub fn system(&self) -> &TransitionSystem {
        &self.ts
    }

    pub fn current(&self) -> usize {
        self.state
    }
}

impl Environment for GraphEnv {
    fn actions(&self) -> &[String] {
        &self.actions
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> StateKey {
        self.state = self.ts.initial();
        self.state as StateKey
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> StepResult {
        let mut reward = 0.0;
        if let Some(&(to, r, p)) = self.edges.get(&(self.state, action)) {
            if p >= 1.0 || rng.gen::<f64>() < p {
                self.state = to;
                reward = r;
            }
        }
        StepResult {
            key: self.state as StateKey,
            reward,
            done: self.terminal[self.state],
        }
    }

    fn state_key(&self) -> StateKey {
        self.state as StateKey
    }

    fn is_done(&self) -> bool {
        self.terminal[self.state]
    }

    fn fluents(&self) -> &[String] {
        self.ts.fluents()
    }

    fn fluent(&self, id: usize) -> bool {
        self.ts.state(self.state).get(id)
    }

    fn max_abs_reward(&self) -> f64 {
        self.edges.values().fold(0.0, |m, e| f64::max(m, e.1.abs()))
    }

    fn scripted_action(&self, target: &[FluentAtom]) -> Option<Scripted> {
        let fluents = self.ts.fluents();
        self.ts.outgoing(self.state).find_map(|t| {
            let s = self.ts.state(t.to);
            let hit = target.iter().all(|a| {
                fluents
                    .iter()
                    .position(|f| *f == a.fluent)
                    .is_some_and(|i| s.get(i) == a.value)
            });
            hit.then_some(Scripted {
                action: t.action,
                one_shot: true,
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symlang::{ground, initial_state, parse_domain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn walks_the_system() {
        let d = parse_domain(
            "fluent a. fluent b. action go. action back.\n\
             inertial a. inertial b.\n\
             go causes a=true if a=false.\n\
             go causes b=true if a=true.\n\
             nonexecutable go if b=true.\n\
             nonexecutable back.\n\
             initial a=false.",
        )
        .unwrap();
        let ts = ground(&d, &initial_state(&d).unwrap()).unwrap();
        assert_eq!(ts.state_count(), 3);
        let rewards = ts
            .transitions()
            .iter()
            .map(|t| ((t.from, ts.action_name(t).0.clone()), 2.0))
            .collect();
        let mut env = GraphEnv::new(ts, &rewards, &BTreeMap::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        env.reset(&mut rng);
        assert_eq!(env.step(1, &mut rng).reward, 0.0);
        let r1 = env.step(0, &mut rng);
        let r2 = env.step(0, &mut rng);
        assert_eq!((r1.reward, r1.done), (2.0, false));
        assert_eq!((r2.reward, r2.done), (2.0, true));
        assert!(env.fluent(1));
    }
}
