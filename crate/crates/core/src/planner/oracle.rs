use std::collections::BTreeMap;

use super::{better, Plan, PlanError, PlanStep};
use crate::symlang::TransitionSystem;

/// Reward per (state index, action name).
pub type RewardMap = BTreeMap<(usize, String), f64>;

/// Every simple path from the initial state with at most `max_len` steps,
/// as transition-index lists, including the empty path.
fn all_simple_paths(ts: &TransitionSystem, max_len: usize) -> Vec<Vec<usize>> {
    let index_of: BTreeMap<(usize, usize), usize> = ts
        .transitions()
        .iter()
        .enumerate()
        .map(|(k, t)| ((t.from, t.action), k))
        .collect();
    let mut out = vec![Vec::new()];
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(path) = stack.pop() {
        if path.len() == max_len {
            continue;
        }
        let at = path
            .last()
            .map(|&k| ts.transitions()[k].to)
            .unwrap_or(ts.initial());
        let visited =
            |s: usize| s == ts.initial() || path.iter().any(|&k| ts.transitions()[k].to == s);
        for t in ts.outgoing(at) {
            if visited(t.to) {
                continue;
            }
            let mut next = path.clone();
            next.push(index_of[&(t.from, t.action)]);
            out.push(next.clone());
            stack.push(next);
        }
    }
    out
}

/// Number of simple paths from the initial state with at most `max_len` steps,
/// counting the empty path.
pub fn simple_path_count(ts: &TransitionSystem, max_len: usize) -> usize {
    all_simple_paths(ts, max_len).len()
}

/// Exhaustive search for the simple path maximizing total reward, with the
/// same tie-breaking as [`super::solve`]. The empty plan is a candidate.
pub fn brute_force_optimal(
    ts: &TransitionSystem,
    reward: &RewardMap,
    max_len: usize,
) -> Result<Plan, PlanError> {
    for t in ts.transitions() {
        let name = ts.action_name(t).as_str();
        if !reward.contains_key(&(t.from, name.to_string())) {
            return Err(PlanError::MissingReward {
                state: t.from,
                action: name.to_string(),
            });
        }
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for path in all_simple_paths(ts, max_len) {
        let names: Vec<&str> = path
            .iter()
            .map(|&k| ts.action_name(&ts.transitions()[k]).as_str())
            .collect();
        let q = path.iter().fold(0.0, |acc, &k| {
            let t = &ts.transitions()[k];
            acc + reward[&(t.from, ts.action_name(t).0.clone())]
        });
        let wins = match &best {
            None => true,
            Some((bq, bp)) => {
                let bnames: Vec<&str> = bp
                    .iter()
                    .map(|&k| ts.action_name(&ts.transitions()[k]).as_str())
                    .collect();
                better(q, &names, *bq, &bnames)
            }
        };
        if wins {
            best = Some((q, path));
        }
    }
    let (quality, path) = best.expect("the empty path is always present");
    Ok(Plan {
        steps: path
            .iter()
            .map(|&k| {
                let t = &ts.transitions()[k];
                PlanStep {
                    from: t.from,
                    action: ts.action_name(t).clone(),
                    to: t.to,
                }
            })
            .collect(),
        quality,
    })
}
