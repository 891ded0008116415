use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Agent, EpisodeRecord, HarnessError, RunLog, Setup, TaskSummary};
use crate::controller::{induce_option, ControllerConfig, QTable};
use crate::envs::{CompiledAtoms, Environment};
use crate::planner::{Plan, PlanStep};
use crate::symlang::{FluentAtom, TransitionSystem};

/// Fewest-step path from `from` to a state satisfying `goal`; among equally
/// short paths, the lexicographically smallest action sequence.
pub fn shortest_plan(
    ts: &TransitionSystem,
    from: usize,
    goal: &[FluentAtom],
) -> Option<Vec<PlanStep>> {
    let fluents = ts.fluents();
    let reached = |s: usize| {
        goal.iter().all(|a| {
            fluents
                .iter()
                .position(|f| *f == a.fluent)
                .is_some_and(|i| ts.state(s).get(i) == a.value)
        })
    };
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; ts.state_count()];
    let mut seen = vec![false; ts.state_count()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(s) = queue.pop_front() {
        if reached(s) {
            let mut steps = Vec::new();
            let mut at = s;
            while let Some((prev, action)) = parent[at] {
                steps.push(PlanStep {
                    from: prev,
                    action: ts.actions()[action].clone(),
                    to: at,
                });
                at = prev;
            }
            steps.reverse();
            return Some(steps);
        }
        for t in ts.outgoing(s) {
            if !seen[t.to] {
                seen[t.to] = true;
                parent[t.to] = Some((s, t.action));
                queue.push_back(t.to);
            }
        }
    }
    None
}

/// Symbolic state whose full atom set holds in the environment, if any.
fn current_state(
    ts: &TransitionSystem,
    matchers: &[CompiledAtoms],
    env: &dyn Environment,
) -> Option<usize> {
    (0..ts.state_count()).find(|&s| matchers[s].holds(env))
}

/// Shortest-plan agent: executes hand-written option policies, replans after
/// every failed option, and never learns.
pub fn run_p_agent(setup: &Setup, seed: u64) -> Result<RunLog, HarnessError> {
    let cfg = &setup.cfg;
    let ts = &setup.ts;
    let mut env = setup.build_env()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = RunLog::new(Agent::P, seed);
    let matchers = (0..ts.state_count())
        .map(|s| CompiledAtoms::new(&ts.state_atoms(s), env.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    let budget = cfg.controller.step_budget;
    let mut episode = 0;
    let mut last_plan = Plan::empty();

    for task in 1..=setup.tasks {
        env.set_task(task)?;
        for _ in 0..cfg.episodes {
            env.reset(&mut rng);
            let mut reward = 0.0;
            let mut failures = 0u32;
            let mut replans = 0usize;
            let mut at = current_state(ts, &matchers, env.as_ref());
            let mut first_plan = None;
            while let Some(s) = at {
                let Some(steps) = shortest_plan(ts, s, &setup.goal) else {
                    break;
                };
                if first_plan.is_none() {
                    first_plan = Some(steps.clone());
                }
                let mut failed = false;
                for st in &steps {
                    let spec = induce_option(
                        ts.state(st.from),
                        ts.state(st.to),
                        &st.action,
                        ts.fluents(),
                    )?;
                    let opt = spec.compile(env.as_ref())?;
                    if !opt.can_start(env.as_ref()) {
                        failed = true;
                        break;
                    }
                    let mut used = 0;
                    while used < budget && !opt.terminated(env.as_ref()) && !env.is_done() {
                        let Some(sa) = env.scripted_action(spec.target_atoms()) else {
                            break;
                        };
                        reward += env.step(sa.action, &mut rng).reward;
                        used += 1;
                        if sa.one_shot {
                            break;
                        }
                    }
                    if !opt.terminated(env.as_ref()) {
                        failed = true;
                        break;
                    }
                }
                if !failed {
                    break;
                }
                failures += 1;
                replans += 1;
                if replans > cfg.p_agent.replan_cap {
                    break;
                }
                at = current_state(ts, &matchers, env.as_ref());
            }
            last_plan = Plan {
                steps: first_plan.unwrap_or_default(),
                quality: 0.0,
            };
            log.records.push(EpisodeRecord {
                episode,
                task,
                reward,
                plan_id: last_plan.id(),
                plan_quality: 0.0,
                ratios: Vec::new(),
                failures,
            });
            episode += 1;
        }
        log.tasks.push(TaskSummary {
            task,
            plan: last_plan.clone(),
        });
    }
    log.final_trace = last_plan
        .steps
        .iter()
        .map(|st| format!("{} --{}--> {}\n", st.from, st.action, st.to))
        .collect();
    log.final_plan = last_plan;
    Ok(log)
}

/// Flat tabular Q-learning on primitive actions and environment reward.
pub fn run_q_baseline(setup: &Setup, seed: u64) -> Result<RunLog, HarnessError> {
    let cfg = &setup.cfg;
    let qc = &cfg.q_baseline;
    let mut env = setup.build_env()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = RunLog::new(Agent::Q, seed);
    let mut q = QTable::new(
        env.actions().len(),
        &ControllerConfig {
            learning_rate: qc.learning_rate,
            discount: qc.discount,
            epsilon_greedy: qc.epsilon,
            epsilon_decay: qc.epsilon_decay,
            epsilon_decay_enabled: cfg.controller.epsilon_decay_enabled,
            step_budget: qc.max_steps,
        },
    );
    let mut episode = 0;
    for task in 1..=setup.tasks {
        env.set_task(task)?;
        for _ in 0..cfg.episodes {
            let mut key = env.reset(&mut rng);
            let mut reward = 0.0;
            for _ in 0..qc.max_steps {
                let a = q.select(key, &mut rng);
                let r = env.step(a, &mut rng);
                q.update(key, a, r.reward, r.key, r.done);
                reward += r.reward;
                key = r.key;
                if r.done {
                    break;
                }
            }
            q.decay_epsilon();
            log.records.push(EpisodeRecord {
                episode,
                task,
                reward,
                plan_id: "-".into(),
                plan_quality: 0.0,
                ratios: Vec::new(),
                failures: 0,
            });
            episode += 1;
        }
        log.tasks.push(TaskSummary {
            task,
            plan: Plan::empty(),
        });
    }
    log.max_abs_q = q.max_abs();
    Ok(log)
}
