//! 5×5 taxi with a one-time coupon and a drop-off reward that shrinks per task.
//!
//! Cells are `(col, row)` with row 0 at the top; `north` decreases the row.

use std::collections::HashSet;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{bfs_grid, EnvError, Environment, Scripted, StateKey, StepResult};
use crate::symlang::FluentAtom;

pub type Cell = (i32, i32);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaxiConfig {
    pub width: i32,
    pub height: i32,
    pub start: Cell,
    pub pickup: Cell,
    pub destination: Cell,
    pub coupon_cell: Cell,
    pub coupon_value: f64,
    /// Each wall separates two 4-adjacent cells.
    pub walls: Vec<(Cell, Cell)>,
    pub step_reward: f64,
    pub illegal_reward: f64,
    pub dropoff_base: f64,
    pub dropoff_decrement: f64,
    pub tasks: usize,
}

impl Default for TaxiConfig {
    fn default() -> Self {
        Self {
            width: 5,
            height: 5,
            start: (0, 4),
            pickup: (0, 0),
            destination: (4, 0),
            coupon_cell: (4, 4),
            coupon_value: 10.0,
            walls: vec![
                ((0, 0), (1, 0)),
                ((0, 1), (0, 2)),
                ((1, 1), (1, 2)),
                ((1, 1), (2, 1)),
            ],
            step_reward: -1.0,
            illegal_reward: -10.0,
            dropoff_base: 50.0,
            dropoff_decrement: 5.0,
            tasks: 10,
        }
    }
}

impl TaxiConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |m: String| Err(EnvError::Config(m));
        if self.width < 1 || self.height < 1 || self.width * self.height > 10_000 {
            return bad(format!("grid {}x{} out of range", self.width, self.height));
        }
        let inside = |c: Cell| c.0 >= 0 && c.1 >= 0 && c.0 < self.width && c.1 < self.height;
        for (name, c) in [
            ("start", self.start),
            ("pickup", self.pickup),
            ("destination", self.destination),
            ("coupon_cell", self.coupon_cell),
        ] {
            if !inside(c) {
                return bad(format!("{name} {c:?} outside the grid"));
            }
        }
        let cells = [self.start, self.pickup, self.destination, self.coupon_cell];
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if cells[i] == cells[j] {
                    return bad("start, pickup, destination and coupon cells must differ".into());
                }
            }
        }
        for &(a, b) in &self.walls {
            if !inside(a) || !inside(b) || (a.0 - b.0).abs() + (a.1 - b.1).abs() != 1 {
                return bad(format!("wall {a:?}|{b:?} does not separate adjacent cells"));
            }
        }
        if self.tasks == 0 {
            return bad("tasks must be positive".into());
        }
        let env = Taxi::new_unchecked(self.clone());
        let dist = bfs_grid(self.width, self.height, self.start, |a, b| env.wall(a, b));
        for (name, c) in [("pickup", self.pickup), ("destination", self.destination)] {
            if dist[(c.1 * self.width + c.0) as usize].is_none() {
                return bad(format!("{name} unreachable from start"));
            }
        }
        Ok(())
    }

    pub fn dropoff_reward(&self, task: usize) -> f64 {
        self.dropoff_base - self.dropoff_decrement * (task as f64 - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TaxiState {
    pub taxi_cell: Cell,
    pub passenger_in_taxi: bool,
    pub passenger_delivered: bool,
    pub coupon_available: bool,
}

const ACTIONS: [&str; 6] = ["north", "south", "east", "west", "pickup", "dropoff"];
const FLUENTS: [&str; 7] = [
    "at_start",
    "at_coupon",
    "at_pickup",
    "at_dest",
    "coupon_taken",
    "has_passenger",
    "delivered",
];

pub struct Taxi {
    cfg: TaxiConfig,
    walls: HashSet<(Cell, Cell)>,
    task: usize,
    state: TaxiState,
    actions: Vec<String>,
    fluents: Vec<String>,
}

impl Taxi {
    pub fn new(cfg: TaxiConfig, task: usize) -> Result<Self, EnvError> {
        cfg.validate()?;
        let mut env = Self::new_unchecked(cfg);
        env.set_task(task)?;
        Ok(env)
    }

    fn new_unchecked(cfg: TaxiConfig) -> Self {
        let walls = cfg
            .walls
            .iter()
            .flat_map(|&(a, b)| [(a, b), (b, a)])
            .collect();
        let state = TaxiState {
            taxi_cell: cfg.start,
            passenger_in_taxi: false,
            passenger_delivered: false,
            coupon_available: true,
        };
        Self {
            cfg,
            walls,
            task: 1,
            state,
            actions: ACTIONS.iter().map(|s| s.to_string()).collect(),
            fluents: FLUENTS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn config(&self) -> &TaxiConfig {
        &self.cfg
    }

    pub fn task(&self) -> usize {
        self.task
    }

    pub fn state(&self) -> TaxiState {
        self.state
    }

    /// Place the taxi in an arbitrary state (for oracles and tests).
    pub fn set_state(&mut self, s: TaxiState) {
        self.state = s;
    }

    pub fn dropoff_reward(&self) -> f64 {
        self.cfg.dropoff_reward(self.task)
    }

    pub fn wall(&self, a: Cell, b: Cell) -> bool {
        self.walls.contains(&(a, b))
    }

    pub fn key_of(&self, s: &TaxiState) -> StateKey {
        let cells = (self.cfg.width * self.cfg.height) as u64;
        let cell = (s.taxi_cell.1 * self.cfg.width + s.taxi_cell.0) as u64;
        cell + cells
            * (s.passenger_in_taxi as u64
                + 2 * s.passenger_delivered as u64
                + 4 * s.coupon_available as u64)
    }

    /// Successor state and reward of `action` from `s`, without touching `self.state`.
    pub fn transition(&self, s: &TaxiState, action: usize) -> (TaxiState, f64) {
        let mut n = *s;
        let mut reward = self.cfg.step_reward;
        match action {
            0..=3 => {
                let (dx, dy) = [(0, -1), (0, 1), (1, 0), (-1, 0)][action];
                let to = (s.taxi_cell.0 + dx, s.taxi_cell.1 + dy);
                let inside =
                    to.0 >= 0 && to.1 >= 0 && to.0 < self.cfg.width && to.1 < self.cfg.height;
                if inside && !self.wall(s.taxi_cell, to) {
                    n.taxi_cell = to;
                    if to == self.cfg.coupon_cell && n.coupon_available {
                        n.coupon_available = false;
                        reward += self.cfg.coupon_value;
                    }
                }
            }
            4 => {
                if s.taxi_cell == self.cfg.pickup && !s.passenger_in_taxi && !s.passenger_delivered
                {
                    n.passenger_in_taxi = true;
                } else {
                    reward = self.cfg.illegal_reward;
                }
            }
            5 => {
                if s.taxi_cell == self.cfg.destination && s.passenger_in_taxi {
                    n.passenger_in_taxi = false;
                    n.passenger_delivered = true;
                    reward += self.dropoff_reward();
                } else {
                    reward = self.cfg.illegal_reward;
                }
            }
            _ => panic!("taxi action {action} out of range"),
        }
        (n, reward)
    }

    pub fn fluent_of(&self, s: &TaxiState, id: usize) -> bool {
        match id {
            0 => s.taxi_cell == self.cfg.start,
            1 => s.taxi_cell == self.cfg.coupon_cell,
            2 => s.taxi_cell == self.cfg.pickup,
            3 => s.taxi_cell == self.cfg.destination,
            4 => !s.coupon_available,
            5 => s.passenger_in_taxi,
            6 => s.passenger_delivered,
            _ => panic!("taxi fluent {id} out of range"),
        }
    }

    fn navigate(&self, goal: Cell) -> Option<usize> {
        let dist = bfs_grid(self.cfg.width, self.cfg.height, goal, |a, b| {
            self.wall(a, b)
        });
        let here = self.state.taxi_cell;
        let d = |c: Cell| dist[(c.1 * self.cfg.width + c.0) as usize];
        let cur = d(here)?;
        if cur == 0 {
            return None;
        }
        (0..4).find(|&a| {
            let (dx, dy) = [(0, -1), (0, 1), (1, 0), (-1, 0)][a];
            let to = (here.0 + dx, here.1 + dy);
            to.0 >= 0
                && to.1 >= 0
                && to.0 < self.cfg.width
                && to.1 < self.cfg.height
                && !self.wall(here, to)
                && d(to) == Some(cur - 1)
        })
    }
}

impl Environment for Taxi {
    fn actions(&self) -> &[String] {
        &self.actions
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> StateKey {
        self.state = TaxiState {
            taxi_cell: self.cfg.start,
            passenger_in_taxi: false,
            passenger_delivered: false,
            coupon_available: true,
        };
        self.state_key()
    }

    fn step(&mut self, action: usize, _rng: &mut dyn RngCore) -> StepResult {
        let (n, reward) = self.transition(&self.state, action);
        self.state = n;
        StepResult {
            key: self.state_key(),
            reward,
            done: n.passenger_delivered,
        }
    }

    fn state_key(&self) -> StateKey {
        self.key_of(&self.state)
    }

    fn is_done(&self) -> bool {
        self.state.passenger_delivered
    }

    fn fluents(&self) -> &[String] {
        &self.fluents
    }

    fn fluent(&self, id: usize) -> bool {
        self.fluent_of(&self.state, id)
    }

    fn max_abs_reward(&self) -> f64 {
        let c = &self.cfg;
        [
            c.step_reward.abs(),
            c.illegal_reward.abs(),
            (c.step_reward + c.coupon_value).abs(),
            (c.step_reward + c.dropoff_base).abs(),
            (c.step_reward + c.dropoff_reward(c.tasks)).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn scripted_action(&self, target: &[FluentAtom]) -> Option<Scripted> {
        let wants = |f: &str| target.iter().any(|a| a.fluent == f && a.value);
        let s = self.state;
        // (cell to reach, action to finish with once there)
        let (goal, finish) = if wants("delivered") && !s.passenger_delivered {
            if s.passenger_in_taxi {
                (self.cfg.destination, Some(5))
            } else {
                (self.cfg.pickup, Some(4))
            }
        } else if wants("has_passenger") && !s.passenger_in_taxi {
            (self.cfg.pickup, Some(4))
        } else if wants("at_coupon") {
            (self.cfg.coupon_cell, None)
        } else if wants("at_pickup") {
            (self.cfg.pickup, None)
        } else if wants("at_dest") {
            (self.cfg.destination, None)
        } else if wants("at_start") {
            (self.cfg.start, None)
        } else {
            return None;
        };
        if let Some(a) = self.navigate(goal) {
            return Some(Scripted {
                action: a,
                one_shot: false,
            });
        }
        finish.map(|action| Scripted {
            action,
            one_shot: true,
        })
    }

    fn task_count(&self) -> usize {
        self.cfg.tasks
    }

    fn set_task(&mut self, task: usize) -> Result<(), EnvError> {
        if task == 0 || task > self.cfg.tasks {
            return Err(EnvError::Task {
                task,
                max: self.cfg.tasks,
            });
        }
        self.task = task;
        Ok(())
    }
}
