mod common;

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdm_core::envs::{
    mapping_check, Environment, GridWorld, GridWorldConfig, Taxi, TaxiConfig, TaxiState,
};
use tdm_core::planner::brute_force_optimal;

use common::taxi;

fn to_env(s: taxi::S) -> TaxiState {
    TaxiState {
        taxi_cell: s.0,
        passenger_in_taxi: s.1,
        passenger_delivered: s.2,
        coupon_available: s.3,
    }
}

#[test]
fn taxi_transitions_match_reference_rules() {
    let cfg = TaxiConfig::default();
    for task in [1, 4, 10] {
        let env = Taxi::new(cfg.clone(), task).unwrap();
        for s in taxi::all_states(&cfg) {
            for a in 0..6 {
                let (n, r) = taxi::step(&cfg, task, s, a);
                assert_eq!(
                    env.transition(&to_env(s), a),
                    (to_env(n), r),
                    "{s:?} action {a}"
                );
            }
        }
    }
}

#[test]
fn taxi_rollout_rewards_add_up() {
    let cfg = TaxiConfig::default();
    let mut env = Taxi::new(cfg.clone(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        env.reset(&mut rng);
        let mut s: taxi::S = (cfg.start, false, false, true);
        let (mut got, mut want) = (0.0, 0.0);
        for _ in 0..300 {
            let a = rng.gen_range(0..6);
            let step = env.step(a, &mut rng);
            let (n, r) = taxi::step(&cfg, 3, s, a);
            got += step.reward;
            want += r;
            s = n;
            assert_eq!(step.done, s.2);
            if step.done {
                break;
            }
        }
        assert_eq!(got, want);
    }
}

#[test]
fn taxi_subtask_values_task_one() {
    let cfg = TaxiConfig::default();
    let ts = common::shipped_system("taxi.bc");
    let r = taxi::subtask_rewards(&cfg, 1, &ts);
    let value = |s: usize, a: &str| r[&(s, a.to_string())];
    let coupon_first = value(0, "get_coupon") + value(1, "pickup") + value(3, "dropoff");
    assert_eq!(value(0, "get_coupon"), 6.0);
    assert_eq!(coupon_first, 38.0);
    assert_eq!(value(0, "pickup") + value(2, "dropoff"), 32.0);
    assert_eq!(
        value(0, "pickup") + value(2, "get_coupon") + value(4, "dropoff"),
        34.0
    );
}

#[test]
fn taxi_optimal_plans_per_task() {
    let cfg = TaxiConfig::default();
    let ts = common::shipped_system("taxi.bc");
    for task in 1..=10 {
        let r = taxi::subtask_rewards(&cfg, task, &ts);
        let p = brute_force_optimal(&ts, &r, 32).unwrap();
        let want = if task <= 7 {
            "get_coupon>pickup>dropoff"
        } else {
            "get_coupon"
        };
        assert_eq!(p.id(), want, "task {task}");
    }
}

#[test]
fn taxi_scripts_follow_optimal_subtask_paths() {
    let cfg = TaxiConfig::default();
    let ts = common::shipped_system("taxi.bc");
    let mut env = Taxi::new(cfg.clone(), 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for t in ts.transitions() {
        let from = taxi::concrete(&cfg, &ts, t.from);
        let target = ts.state_atoms(t.to);
        env.set_state(to_env(from));
        assert!(mapping_check(&ts.state_atoms(t.from), &env).unwrap());
        let mut ret = 0.0;
        for _ in 0..100 {
            if mapping_check(&target, &env).unwrap() {
                break;
            }
            let a = env
                .scripted_action(&target)
                .expect("script has a move")
                .action;
            ret += env.step(a, &mut rng).reward;
        }
        assert!(mapping_check(&target, &env).unwrap());
        assert_eq!(ret, taxi::subtask_value(&cfg, 1, &ts, from, t.to), "{t:?}");
    }
}

#[test]
fn gridworld_door_reachable_from_every_start() {
    let cfg = GridWorldConfig::default();
    let (w, h) = (cfg.width, cfg.height);
    let mut seen = vec![false; (w * h) as usize];
    let mut queue = VecDeque::from([cfg.door]);
    seen[(cfg.door.1 * w + cfg.door.0) as usize] = true;
    while let Some((x, y)) = queue.pop_front() {
        for (nx, ny) in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if nx >= 0 && ny >= 0 && nx < w && ny < h && !seen[(ny * w + nx) as usize] {
                seen[(ny * w + nx) as usize] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    for c in &cfg.start_cells {
        assert!(seen[(c.1 * w + c.0) as usize], "{c:?}");
    }
    assert!(cfg.validate().is_ok());
}

#[test]
fn gridworld_scripted_episode_without_failures() {
    let cfg = GridWorldConfig {
        door_failure_prob: 0.0,
        bumpers: Vec::new(),
        ..GridWorldConfig::default()
    };
    let mut env = GridWorld::new(cfg.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        env.reset(&mut rng);
        let start = env.state().agent_cell;
        let target = [tdm_core::symlang::FluentAtom::new("at_goal", true)];
        let (mut ret, mut steps) = (0.0, 0);
        while !env.is_done() {
            let a = env.scripted_action(&target).unwrap().action;
            let st = env.step(a, &mut rng);
            ret += st.reward;
            steps += 1;
        }
        let manhattan = (cfg.door.0 - start.0).abs() + (cfg.door.1 - start.1).abs();
        assert_eq!(steps, manhattan + 3);
        assert_eq!(ret, cfg.goal_reward - steps as f64);
    }
}
