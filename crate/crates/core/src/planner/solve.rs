use super::{better, GainTable, Plan, PlanStep};
use crate::symlang::TransitionSystem;

struct Search<'a> {
    ts: &'a TransitionSystem,
    // Outgoing (to, weight, action name) per state, in action-name order.
    adj: Vec<Vec<(usize, f64, &'a str)>>,
    step_bound: f64,
    on_path: Vec<bool>,
    path: Vec<(usize, usize, &'a str)>,
    best_q: f64,
    best: Vec<(usize, usize, &'a str)>,
    cut_off: bool,
}

impl<'a> Search<'a> {
    fn offer(&mut self, q: f64) {
        let cand: Vec<&str> = self.path.iter().map(|p| p.2).collect();
        let cur: Vec<&str> = self.best.iter().map(|p| p.2).collect();
        if better(q, &cand, self.best_q, &cur) {
            self.best_q = q;
            self.best = self.path.clone();
        }
    }

    fn dfs(&mut self, s: usize, q: f64, limit: usize) {
        self.offer(q);
        let depth = self.path.len();
        if depth == limit {
            if !self.adj[s].is_empty() {
                self.cut_off = true;
            }
            return;
        }
        // Quality reachable from here is at most q plus the best step value
        // for every remaining step; stopping early adds nothing.
        let ub = q + (limit - depth) as f64 * self.step_bound;
        if ub < self.best_q {
            // A deeper limit loosens the bound, so the next round must revisit.
            if !self.adj[s].is_empty() {
                self.cut_off = true;
            }
            return;
        }
        for i in 0..self.adj[s].len() {
            let (to, w, name) = self.adj[s][i];
            if self.on_path[to] {
                continue;
            }
            self.on_path[to] = true;
            self.path.push((s, to, name));
            self.dfs(to, q + w, limit);
            self.path.pop();
            self.on_path[to] = false;
        }
    }
}

/// Highest-quality simple path from the initial state with at most `max_len`
/// steps, provided its quality is strictly above `quality_bound`.
///
/// The empty plan takes part with quality 0. Ties go to the shorter plan, then
/// to the lexicographically smaller action-name sequence. `None` when no
/// simple path beats the bound.
pub fn solve(
    ts: &TransitionSystem,
    g: &GainTable,
    quality_bound: f64,
    max_len: usize,
) -> Option<Plan> {
    assert!(max_len >= 1, "max_len must be positive");
    let adj: Vec<Vec<(usize, f64, &str)>> = (0..ts.state_count())
        .map(|s| {
            ts.outgoing(s)
                .map(|t| {
                    let name = ts.action_name(t).as_str();
                    (t.to, g.get(s, name), name)
                })
                .collect()
        })
        .collect();
    let step_bound = adj.iter().flatten().map(|e| e.1).fold(0.0_f64, f64::max);
    let mut search = Search {
        ts,
        adj,
        step_bound,
        on_path: vec![false; ts.state_count()],
        path: Vec::new(),
        best_q: 0.0,
        best: Vec::new(),
        cut_off: false,
    };
    // A simple path has fewer steps than there are states.
    let horizon = max_len.min(ts.state_count().saturating_sub(1)).max(1);
    for limit in 1..=horizon {
        search.cut_off = false;
        search.on_path[ts.initial()] = true;
        search.dfs(ts.initial(), 0.0, limit);
        search.on_path[ts.initial()] = false;
        if !search.cut_off {
            break;
        }
    }
    if search.best_q <= quality_bound {
        return None;
    }
    let steps = search
        .best
        .iter()
        .map(|&(from, to, name)| PlanStep {
            from,
            action: search
                .ts
                .actions()
                .iter()
                .find(|a| a.as_str() == name)
                .unwrap()
                .clone(),
            to,
        })
        .collect();
    Some(Plan {
        steps,
        quality: search.best_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::plan_quality;
    use crate::symlang::{ActionSymbol, SymbolicState, Transition};

    fn chain(n: usize) -> TransitionSystem {
        let states = (0..n)
            .map(|i| SymbolicState::from_values((0..n).map(|j| j == i).collect()))
            .collect();
        let transitions = (0..n - 1)
            .map(|i| Transition {
                from: i,
                action: 0,
                to: i + 1,
            })
            .collect();
        TransitionSystem::from_parts(
            (0..n).map(|i| format!("at{i}")).collect(),
            vec![ActionSymbol::new("go")],
            states,
            transitions,
            0,
        )
        .unwrap()
    }

    #[test]
    fn untried_entries_force_exploration() {
        let ts = chain(3);
        let g = GainTable::default();
        let p = solve(&ts, &g, 0.0, 32).unwrap();
        assert!(p.quality >= g.inf_value());
        assert!(!p.is_empty());
    }

    #[test]
    fn chain_prefix_beats_full_chain() {
        let ts = chain(3);
        let mut g = GainTable::default();
        g.set(0, "go", 5.0).unwrap();
        g.set(1, "go", -2.0).unwrap();
        let p = solve(&ts, &g, 4.0, 32).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.quality, 5.0);
        assert_eq!(plan_quality(&p, &g), p.quality);
        p.validate(&ts).unwrap();
    }

    #[test]
    fn bound_at_optimum_gives_no_plan() {
        let ts = chain(3);
        let mut g = GainTable::default();
        g.set(0, "go", 5.0).unwrap();
        g.set(1, "go", -2.0).unwrap();
        assert!(solve(&ts, &g, 5.0, 32).is_none());
    }

    #[test]
    fn negative_world_prefers_empty_plan() {
        let ts = chain(2);
        let mut g = GainTable::default();
        g.set(0, "go", -1.0).unwrap();
        let p = solve(&ts, &g, f64::NEG_INFINITY, 32).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.quality, 0.0);
    }

    #[test]
    fn max_len_limits_depth() {
        let ts = chain(5);
        let g = GainTable::default();
        assert_eq!(solve(&ts, &g, 0.0, 2).unwrap().len(), 2);
    }
}
