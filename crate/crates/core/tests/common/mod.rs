#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdm_core::planner::{GainTable, RewardMap};
use tdm_core::symlang::{ActionSymbol, SymbolicState, Transition, TransitionSystem};

pub const ACTIONS: [&str; 4] = ["east", "north", "south", "west"];

/// Random reachable deterministic system with up to `max_states` states and
/// up to four actions per state, plus integer rewards in [-5, 5] so that ties
/// are common.
pub fn random_system(seed: u64, max_states: usize) -> (TransitionSystem, RewardMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_states);
    let mut edges: Vec<Vec<Option<usize>>> = vec![vec![None; ACTIONS.len()]; n];
    for i in 1..n {
        let parents: Vec<usize> = (0..i)
            .filter(|&p| edges[p].iter().any(Option::is_none))
            .collect();
        let p = *parents.choose(&mut rng).unwrap();
        let free: Vec<usize> = (0..ACTIONS.len())
            .filter(|&a| edges[p][a].is_none())
            .collect();
        edges[p][*free.choose(&mut rng).unwrap()] = Some(i);
    }
    for row in edges.iter_mut() {
        for slot in row.iter_mut() {
            if slot.is_none() && rng.gen_bool(0.35) {
                *slot = Some(rng.gen_range(0..n));
            }
        }
    }
    let states = (0..n)
        .map(|i| SymbolicState::from_values((0..4).map(|b| i >> b & 1 == 1).collect()))
        .collect();
    let mut transitions = Vec::new();
    let mut reward = RewardMap::new();
    for (from, row) in edges.iter().enumerate() {
        for (action, slot) in row.iter().enumerate() {
            if let Some(to) = *slot {
                transitions.push(Transition { from, action, to });
                reward.insert(
                    (from, ACTIONS[action].to_string()),
                    rng.gen_range(-5..=5) as f64,
                );
            }
        }
    }
    let ts = TransitionSystem::from_parts(
        (0..4).map(|b| format!("b{b}")).collect(),
        ACTIONS.iter().map(|a| ActionSymbol::new(*a)).collect(),
        states,
        transitions,
        0,
    )
    .unwrap();
    (ts, reward)
}

pub fn gains(reward: &RewardMap) -> GainTable {
    let mut g = GainTable::default();
    for ((s, a), v) in reward {
        g.set(*s, a, *v).unwrap();
    }
    g
}

/// Best simple path by plain recursion: highest total, then fewest steps,
/// then smallest action-name sequence.
pub fn recursive_best(
    ts: &TransitionSystem,
    reward: &RewardMap,
    max_len: usize,
) -> (f64, Vec<String>) {
    #[allow(clippy::too_many_arguments)]
    fn go(
        ts: &TransitionSystem,
        reward: &RewardMap,
        at: usize,
        left: usize,
        seen: &mut Vec<usize>,
        q: f64,
        names: &mut Vec<String>,
        best: &mut (f64, Vec<String>),
    ) {
        let key =
            |q: f64, n: &[String]| (q, std::cmp::Reverse(n.len()), std::cmp::Reverse(n.to_vec()));
        if key(q, names) > key(best.0, &best.1) {
            *best = (q, names.clone());
        }
        if left == 0 {
            return;
        }
        for t in ts.transitions().iter().filter(|t| t.from == at) {
            if seen.contains(&t.to) {
                continue;
            }
            let name = ts.actions()[t.action].0.clone();
            let r = reward[&(at, name.clone())];
            seen.push(t.to);
            names.push(name);
            go(ts, reward, t.to, left - 1, seen, q + r, names, best);
            names.pop();
            seen.pop();
        }
    }
    let mut best = (0.0, Vec::new());
    let mut seen = vec![ts.initial()];
    go(
        ts,
        reward,
        ts.initial(),
        max_len,
        &mut seen,
        0.0,
        &mut Vec::new(),
        &mut best,
    );
    best
}

pub mod taxi {
    use std::collections::HashMap;

    use tdm_core::envs::TaxiConfig;
    use tdm_core::planner::RewardMap;
    use tdm_core::symlang::TransitionSystem;

    /// (cell, passenger in taxi, delivered, coupon still available)
    pub type S = ((i32, i32), bool, bool, bool);

    /// Plain re-statement of the Taxi rules: moves cost the step reward and
    /// walls or edges leave the taxi in place; entering the coupon cell while
    /// the coupon is available adds its value; a legal pickup or dropoff costs
    /// a step, dropoff adds the task's drop-off reward; anything else illegal
    /// costs the illegal reward. Returns the successor and the reward.
    pub fn step(cfg: &TaxiConfig, task: usize, s: S, a: usize) -> (S, f64) {
        let ((x, y), inside, delivered, coupon) = s;
        let blocked = |p: (i32, i32), q: (i32, i32)| {
            cfg.walls
                .iter()
                .any(|&(u, v)| (u, v) == (p, q) || (v, u) == (p, q))
        };
        match a {
            0..=3 => {
                let to = [(x, y - 1), (x, y + 1), (x + 1, y), (x - 1, y)][a];
                let ok = to.0 >= 0
                    && to.1 >= 0
                    && to.0 < cfg.width
                    && to.1 < cfg.height
                    && !blocked((x, y), to);
                if !ok {
                    return (s, cfg.step_reward);
                }
                let took = coupon && to == cfg.coupon_cell;
                let r = cfg.step_reward + if took { cfg.coupon_value } else { 0.0 };
                ((to, inside, delivered, coupon && !took), r)
            }
            4 if (x, y) == cfg.pickup && !inside && !delivered => {
                (((x, y), true, delivered, coupon), cfg.step_reward)
            }
            5 if (x, y) == cfg.destination && inside => {
                let d = cfg.dropoff_base - cfg.dropoff_decrement * (task as f64 - 1.0);
                (((x, y), false, true, coupon), cfg.step_reward + d)
            }
            _ => (s, cfg.illegal_reward),
        }
    }

    pub fn all_states(cfg: &TaxiConfig) -> Vec<S> {
        let mut out = Vec::new();
        for x in 0..cfg.width {
            for y in 0..cfg.height {
                for bits in 0..8 {
                    out.push(((x, y), bits & 1 == 1, bits & 2 == 2, bits & 4 == 4));
                }
            }
        }
        out
    }

    fn fluents(cfg: &TaxiConfig, s: S) -> [(&'static str, bool); 7] {
        let (c, inside, delivered, coupon) = s;
        [
            ("at_start", c == cfg.start),
            ("at_coupon", c == cfg.coupon_cell),
            ("at_pickup", c == cfg.pickup),
            ("at_dest", c == cfg.destination),
            ("coupon_taken", !coupon),
            ("has_passenger", inside),
            ("delivered", delivered),
        ]
    }

    /// The concrete state a symbolic state stands for: its location fluent
    /// picks the cell, the remaining fluents pick the flags.
    pub fn concrete(cfg: &TaxiConfig, ts: &TransitionSystem, sym: usize) -> S {
        let v = |name: &str| {
            let i = ts.fluents().iter().position(|f| f == name).unwrap();
            ts.state(sym).get(i)
        };
        let cell = [
            ("at_start", cfg.start),
            ("at_coupon", cfg.coupon_cell),
            ("at_pickup", cfg.pickup),
            ("at_dest", cfg.destination),
        ]
        .into_iter()
        .find(|(f, _)| v(f))
        .map(|(_, c)| c)
        .expect("every taxi symbolic state has a location");
        (cell, v("has_passenger"), v("delivered"), !v("coupon_taken"))
    }

    /// Best undiscounted return from `from` until every fluent matches the
    /// symbolic state `target`, by value iteration; delivery before reaching
    /// the target ends the episode and counts as unreachable.
    pub fn subtask_value(
        cfg: &TaxiConfig,
        task: usize,
        ts: &TransitionSystem,
        from: S,
        target: usize,
    ) -> f64 {
        let want: Vec<(String, bool)> = ts
            .fluents()
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), ts.state(target).get(i)))
            .collect();
        let reached = |s: S| {
            fluents(cfg, s)
                .iter()
                .all(|(f, v)| want.iter().any(|(g, w)| g == f && w == v))
        };
        let states = all_states(cfg);
        let mut v: HashMap<S, f64> = states
            .iter()
            .map(|&s| (s, if reached(s) { 0.0 } else { f64::NEG_INFINITY }))
            .collect();
        loop {
            let mut changed = false;
            for &s in &states {
                if reached(s) || s.2 {
                    continue;
                }
                let best = (0..6)
                    .map(|a| {
                        let (n, r) = step(cfg, task, s, a);
                        r + v[&n]
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                if best > v[&s] {
                    v.insert(s, best);
                    changed = true;
                }
            }
            if !changed {
                return v[&from];
            }
        }
    }

    /// Subtask values for every transition of the taxi symbolic system.
    pub fn subtask_rewards(cfg: &TaxiConfig, task: usize, ts: &TransitionSystem) -> RewardMap {
        ts.transitions()
            .iter()
            .map(|t| {
                let from = concrete(cfg, ts, t.from);
                let value = subtask_value(cfg, task, ts, from, t.to);
                ((t.from, ts.action_name(t).0.clone()), value)
            })
            .collect()
    }
}

pub fn shipped_system(name: &str) -> TransitionSystem {
    use tdm_core::symlang::{ground, initial_state, parse_domain};
    let path = format!("{}/../../domains/{name}", env!("CARGO_MANIFEST_DIR"));
    let d = parse_domain(&std::fs::read_to_string(path).unwrap()).unwrap();
    ground(&d, &initial_state(&d).unwrap()).unwrap()
}
