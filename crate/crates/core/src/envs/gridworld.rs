//! Grid World with bumpers and a three-stage door in front of the goal.
//!
//! Cells are `(x, y)` with `y` growing upward. The walkable area is
//! `width × height`; the goal cell lies outside it and is entered only by a
//! successful `push` at the door cell.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{bfs_grid, EnvError, Environment, Scripted, StateKey, StepResult};
use crate::symlang::FluentAtom;

pub type Cell = (i32, i32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BumperColor {
    Red,
    Yellow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bumper {
    pub cell: Cell,
    pub color: BumperColor,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DoorFailureMode {
    /// A failed door action returns the door to `Closed`.
    #[default]
    Reset,
    /// A failed door action undoes one stage.
    Regress,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DoorStage {
    Closed,
    Grabbed,
    Turned,
    Open,
}

impl DoorStage {
    fn index(self) -> u64 {
        self as u64
    }

    fn regress(self) -> Self {
        match self {
            DoorStage::Open | DoorStage::Turned => DoorStage::Grabbed,
            DoorStage::Grabbed | DoorStage::Closed => DoorStage::Closed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridWorldConfig {
    pub width: i32,
    pub height: i32,
    pub start_cells: Vec<Cell>,
    pub door: Cell,
    pub goal: Cell,
    /// Waypoint grounded by the `at_gap` fluent.
    pub gap: Cell,
    pub bumpers: Vec<Bumper>,
    pub door_failure_prob: f64,
    pub door_failure_mode: DoorFailureMode,
    pub step_reward: f64,
    pub door_failure_reward: f64,
    pub goal_reward: f64,
    pub red_penalty: f64,
    pub yellow_penalty: f64,
}

impl Default for GridWorldConfig {
    fn default() -> Self {
        let mut bumpers: Vec<Bumper> = (1..10)
            .map(|y| Bumper {
                cell: (4, y),
                color: BumperColor::Red,
            })
            .collect();
        bumpers.extend([(1, 5), (2, 5), (7, 3), (7, 4)].map(|cell| Bumper {
            cell,
            color: BumperColor::Yellow,
        }));
        Self {
            width: 10,
            height: 10,
            start_cells: vec![(0, 0), (0, 2), (0, 4), (0, 6), (0, 8)],
            door: (9, 9),
            goal: (9, 10),
            gap: (4, 0),
            bumpers,
            door_failure_prob: 0.2,
            door_failure_mode: DoorFailureMode::Reset,
            step_reward: -1.0,
            door_failure_reward: -10.0,
            goal_reward: 100.0,
            red_penalty: -30.0,
            yellow_penalty: -15.0,
        }
    }
}

impl GridWorldConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |m: String| Err(EnvError::Config(m));
        if self.width < 1 || self.height < 1 || self.width * self.height > 10_000 {
            return bad(format!("grid {}x{} out of range", self.width, self.height));
        }
        let inside = |c: Cell| c.0 >= 0 && c.1 >= 0 && c.0 < self.width && c.1 < self.height;
        if self.start_cells.is_empty() {
            return bad("no start cells".into());
        }
        for &c in self.start_cells.iter().chain([&self.door, &self.gap]) {
            if !inside(c) {
                return bad(format!("cell {c:?} outside the walkable area"));
            }
        }
        for b in &self.bumpers {
            if !inside(b.cell) {
                return bad(format!("bumper {:?} outside the walkable area", b.cell));
            }
            if b.cell == self.door || b.cell == self.gap {
                return bad(format!("bumper {:?} on the door or gap cell", b.cell));
            }
        }
        if inside(self.goal) {
            return bad(format!(
                "goal {:?} must lie outside the walkable area",
                self.goal
            ));
        }
        if (self.goal.0 - self.door.0).abs() + (self.goal.1 - self.door.1).abs() != 1 {
            return bad(format!(
                "door {:?} is not on the boundary of goal {:?}",
                self.door, self.goal
            ));
        }
        if !(0.0..=1.0).contains(&self.door_failure_prob) {
            return bad(format!(
                "door_failure_prob {} outside [0,1]",
                self.door_failure_prob
            ));
        }
        let dist = bfs_grid(self.width, self.height, self.door, |_, _| false);
        for &c in &self.start_cells {
            if dist[(c.1 * self.width + c.0) as usize].is_none() {
                return bad(format!("door unreachable from start {c:?}"));
            }
        }
        Ok(())
    }

    pub fn bumper_at(&self, c: Cell) -> Option<BumperColor> {
        self.bumpers.iter().find(|b| b.cell == c).map(|b| b.color)
    }

    /// Reward of entering cell `c` by a move.
    pub fn entry_reward(&self, c: Cell) -> f64 {
        self.step_reward
            + match self.bumper_at(c) {
                Some(BumperColor::Red) => self.red_penalty,
                Some(BumperColor::Yellow) => self.yellow_penalty,
                None => 0.0,
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridWorldState {
    pub agent_cell: Cell,
    pub door_stage: DoorStage,
    pub reached_goal: bool,
}

const ACTIONS: [&str; 7] = ["up", "down", "left", "right", "grab", "turn", "push"];
const MOVES: [(i32, i32); 4] = [(0, 1), (0, -1), (-1, 0), (1, 0)];
const FLUENTS: [&str; 7] = [
    "at_start",
    "at_gap",
    "at_door",
    "at_goal",
    "grabbed",
    "turned",
    "door_open",
];

pub struct GridWorld {
    cfg: GridWorldConfig,
    state: GridWorldState,
    actions: Vec<String>,
    fluents: Vec<String>,
}

impl GridWorld {
    pub fn new(cfg: GridWorldConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        let state = GridWorldState {
            agent_cell: cfg.start_cells[0],
            door_stage: DoorStage::Closed,
            reached_goal: false,
        };
        Ok(Self {
            cfg,
            state,
            actions: ACTIONS.iter().map(|s| s.to_string()).collect(),
            fluents: FLUENTS.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn config(&self) -> &GridWorldConfig {
        &self.cfg
    }

    pub fn state(&self) -> GridWorldState {
        self.state
    }

    pub fn set_state(&mut self, s: GridWorldState) {
        self.state = s;
    }

    pub fn key_of(&self, s: &GridWorldState) -> StateKey {
        let cells = (self.cfg.width * self.cfg.height) as u64;
        let cell = (s.agent_cell.1 * self.cfg.width + s.agent_cell.0) as u64;
        if s.reached_goal {
            return cells * 4;
        }
        cell + cells * s.door_stage.index()
    }

    pub fn fluent_of(&self, s: &GridWorldState, id: usize) -> bool {
        match id {
            0 => !s.reached_goal && s.agent_cell.0 == 0,
            1 => !s.reached_goal && s.agent_cell == self.cfg.gap,
            2 => !s.reached_goal && s.agent_cell == self.cfg.door,
            3 => s.reached_goal,
            4 => s.door_stage == DoorStage::Grabbed,
            5 => s.door_stage == DoorStage::Turned,
            6 => s.door_stage == DoorStage::Open,
            _ => panic!("grid world fluent {id} out of range"),
        }
    }

    fn door_step(&mut self, needed: DoorStage, next: DoorStage, rng: &mut dyn RngCore) -> f64 {
        let s = &mut self.state;
        if s.agent_cell != self.cfg.door || s.door_stage != needed {
            return self.cfg.step_reward;
        }
        if rng.gen::<f64>() < self.cfg.door_failure_prob {
            s.door_stage = match self.cfg.door_failure_mode {
                DoorFailureMode::Reset => DoorStage::Closed,
                DoorFailureMode::Regress => s.door_stage.regress(),
            };
            return self.cfg.door_failure_reward;
        }
        s.door_stage = next;
        if next == DoorStage::Open {
            s.agent_cell = self.cfg.goal;
            s.reached_goal = true;
            return self.cfg.step_reward + self.cfg.goal_reward;
        }
        self.cfg.step_reward
    }

    fn navigate(&self, goal: Cell) -> Option<usize> {
        let (w, h) = (self.cfg.width, self.cfg.height);
        let dist = bfs_grid(w, h, goal, |_, _| false);
        let here = self.state.agent_cell;
        let d = |c: Cell| dist[(c.1 * w + c.0) as usize];
        let cur = d(here)?;
        if cur == 0 {
            return None;
        }
        (0..4).find(|&a| {
            let to = (here.0 + MOVES[a].0, here.1 + MOVES[a].1);
            to.0 >= 0 && to.1 >= 0 && to.0 < w && to.1 < h && d(to) == Some(cur - 1)
        })
    }
}

impl Environment for GridWorld {
    fn actions(&self) -> &[String] {
        &self.actions
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> StateKey {
        let i = rng.gen_range(0..self.cfg.start_cells.len());
        self.state = GridWorldState {
            agent_cell: self.cfg.start_cells[i],
            door_stage: DoorStage::Closed,
            reached_goal: false,
        };
        self.state_key()
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> StepResult {
        let reward = if self.state.reached_goal {
            0.0
        } else {
            match action {
                0..=3 => {
                    let c = self.state.agent_cell;
                    let to = (c.0 + MOVES[action].0, c.1 + MOVES[action].1);
                    if to.0 >= 0 && to.1 >= 0 && to.0 < self.cfg.width && to.1 < self.cfg.height {
                        self.state.agent_cell = to;
                        self.cfg.entry_reward(to)
                    } else {
                        self.cfg.step_reward
                    }
                }
                4 => self.door_step(DoorStage::Closed, DoorStage::Grabbed, rng),
                5 => self.door_step(DoorStage::Grabbed, DoorStage::Turned, rng),
                6 => self.door_step(DoorStage::Turned, DoorStage::Open, rng),
                _ => panic!("grid world action {action} out of range"),
            }
        };
        StepResult {
            key: self.state_key(),
            reward,
            done: self.state.reached_goal,
        }
    }

    fn state_key(&self) -> StateKey {
        self.key_of(&self.state)
    }

    fn is_done(&self) -> bool {
        self.state.reached_goal
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
            c.door_failure_reward.abs(),
            (c.step_reward + c.goal_reward).abs(),
            (c.step_reward + c.red_penalty).abs(),
            (c.step_reward + c.yellow_penalty).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn scripted_action(&self, target: &[FluentAtom]) -> Option<Scripted> {
        let wants = |f: &str| target.iter().any(|a| a.fluent == f && a.value);
        let s = self.state;
        let door_work =
            wants("at_goal") || wants("door_open") || wants("turned") || wants("grabbed");
        if door_work {
            if s.agent_cell != self.cfg.door {
                return self.navigate(self.cfg.door).map(|action| Scripted {
                    action,
                    one_shot: false,
                });
            }
            let action = match s.door_stage {
                DoorStage::Closed => 4,
                DoorStage::Grabbed => 5,
                DoorStage::Turned => 6,
                DoorStage::Open => return None,
            };
            return Some(Scripted {
                action,
                one_shot: true,
            });
        }
        let goal = if wants("at_door") {
            self.cfg.door
        } else if wants("at_gap") {
            self.cfg.gap
        } else if wants("at_start") {
            (0, s.agent_cell.1)
        } else {
            return None;
        };
        self.navigate(goal).map(|action| Scripted {
            action,
            one_shot: false,
        })
    }
}
