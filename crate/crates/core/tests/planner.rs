mod common;

use proptest::prelude::*;
use tdm_core::planner::{
    brute_force_optimal, plan_quality, simple_path_count, solve, GainTable, Plan, RewardMap,
};
use tdm_core::symlang::{ActionSymbol, SymbolicState, Transition, TransitionSystem};

fn chain() -> TransitionSystem {
    TransitionSystem::from_parts(
        vec!["x".into(), "y".into()],
        vec![ActionSymbol::new("go")],
        vec![
            SymbolicState::from_values(vec![false, false]),
            SymbolicState::from_values(vec![true, false]),
            SymbolicState::from_values(vec![true, true]),
        ],
        vec![
            Transition {
                from: 0,
                action: 0,
                to: 1,
            },
            Transition {
                from: 1,
                action: 0,
                to: 2,
            },
        ],
        0,
    )
    .unwrap()
}

fn names(p: &Plan) -> Vec<String> {
    p.action_names().iter().map(|s| s.to_string()).collect()
}

#[test]
fn chain_prefix_beats_full_chain() {
    let ts = chain();
    let reward = RewardMap::from([((0, "go".into()), 5.0), ((1, "go".into()), -2.0)]);
    let g = common::gains(&reward);
    let p = solve(&ts, &g, 4.0, 32).unwrap();
    assert_eq!(p.len(), 1);
    assert_eq!(p.quality, 5.0);
    assert_eq!(
        common::recursive_best(&ts, &reward, 32),
        (5.0, vec!["go".to_string()])
    );
}

#[test]
fn own_quality_as_bound_gives_no_plan() {
    let ts = chain();
    let reward = RewardMap::from([((0, "go".into()), 1.0), ((1, "go".into()), 2.0)]);
    let g = common::gains(&reward);
    let p = solve(&ts, &g, f64::NEG_INFINITY, 32).unwrap();
    assert_eq!(p.quality, 3.0);
    assert!(solve(&ts, &g, p.quality, 32).is_none());
}

#[test]
fn untried_entries_are_optimistic() {
    let ts = chain();
    let mut g = GainTable::default();
    g.set(0, "go", -50.0).unwrap();
    let p = solve(&ts, &g, 0.0, 32).unwrap();
    assert_eq!(p.len(), 2);
    assert_eq!(p.quality, 1e6 - 50.0);
}

#[test]
fn max_len_caps_the_search() {
    let ts = chain();
    let reward = RewardMap::from([((0, "go".into()), 1.0), ((1, "go".into()), 1.0)]);
    let g = common::gains(&reward);
    assert_eq!(solve(&ts, &g, f64::NEG_INFINITY, 1).unwrap().len(), 1);
    assert_eq!(simple_path_count(&ts, 1), 2);
    assert_eq!(simple_path_count(&ts, 2), 3);
}

#[test]
fn all_negative_gives_empty_plan() {
    let ts = chain();
    let reward = RewardMap::from([((0, "go".into()), -1.0), ((1, "go".into()), -1.0)]);
    let p = solve(&ts, &common::gains(&reward), f64::NEG_INFINITY, 32).unwrap();
    assert!(p.is_empty());
    assert_eq!(p.quality, 0.0);
    assert!(solve(&ts, &common::gains(&reward), 0.0, 32).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solve_matches_both_oracles(seed in any::<u64>(), max_len in 1usize..12) {
        let (ts, reward) = common::random_system(seed, 12);
        let g = common::gains(&reward);
        let p = solve(&ts, &g, f64::NEG_INFINITY, max_len).unwrap();
        let b = brute_force_optimal(&ts, &reward, max_len).unwrap();
        prop_assert_eq!(&p, &b);
        let (q, n) = common::recursive_best(&ts, &reward, max_len);
        prop_assert_eq!(p.quality, q);
        prop_assert_eq!(names(&p), n);
        prop_assert!(p.validate(&ts).is_ok());
        prop_assert_eq!(plan_quality(&p, &g), p.quality);
        prop_assert!(p.len() <= max_len);
    }

    #[test]
    fn rising_bound_terminates(seed in any::<u64>()) {
        let (ts, reward) = common::random_system(seed, 12);
        let g = common::gains(&reward);
        let mut bound = f64::NEG_INFINITY;
        let mut calls = 0;
        while let Some(p) = solve(&ts, &g, bound, 32) {
            prop_assert!(p.quality > bound);
            bound = p.quality;
            calls += 1;
            prop_assert!(calls <= simple_path_count(&ts, 32));
        }
    }
}
