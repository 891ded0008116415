use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    subtask_id, Agent, EpisodeRecord, HarnessError, PlanSwitch, RunLog, Setup, TaskSummary,
    TrustRow,
};
use crate::controller::{execute_option, option_for, CompiledOption, QTable};
use crate::envs::Environment;
use crate::planner::{plan_quality, solve, GainTable, Plan, PlanStep};
use crate::trust::{r_update, subtask_reward, sync_gain_table, RTable, SuccessWindow, Successor};

struct OptionRuntime {
    compiled: CompiledOption,
    q: QTable,
}

struct Learner<'a> {
    setup: &'a Setup,
    seed: u64,
    g: GainTable,
    rt: RTable,
    windows: BTreeMap<(usize, String), SuccessWindow>,
    options: BTreeMap<(usize, String), OptionRuntime>,
}

impl Learner<'_> {
    fn option(
        &mut self,
        env: &dyn Environment,
        from: usize,
        action: &str,
    ) -> Result<&mut OptionRuntime, HarnessError> {
        let key = (from, action.to_string());
        if !self.options.contains_key(&key) {
            let spec = option_for(&self.setup.ts, from, action).ok_or_else(|| {
                HarnessError::Config(format!("no transition ({from}, {action})"))
            })??;
            let mut q = QTable::new(env.actions().len(), &self.setup.cfg.controller);
            if let Some(dir) = &self.setup.cfg.load_qtables {
                let path = dir
                    .join(format!("seed_{}", self.seed))
                    .join(checkpoint_name(from, action));
                if path.exists() {
                    let f = File::open(&path).map_err(|e| HarnessError::io(&path, e))?;
                    q.load(&mut BufReader::new(f), env.actions())?;
                }
            }
            self.options.insert(
                key.clone(),
                OptionRuntime {
                    compiled: spec.compile(env)?,
                    q,
                },
            );
        }
        Ok(self.options.get_mut(&key).unwrap())
    }

    fn window(&mut self, from: usize, action: &str) -> &mut SuccessWindow {
        let cap = self.setup.cfg.trust.window_size;
        self.windows
            .entry((from, action.to_string()))
            .or_insert_with(|| SuccessWindow::new(cap))
    }

    fn record(
        &mut self,
        from: usize,
        action: &str,
        success: bool,
        env_return: f64,
    ) -> &SuccessWindow {
        let w = self.window(from, action);
        w.record(success, env_return);
        w
    }

    fn successor(&self, step: &PlanStep, last: bool) -> Option<usize> {
        let ts = &self.setup.ts;
        match self.setup.cfg.trust.successor {
            Successor::SelfLoop => Some(step.from),
            Successor::Restart => Some(if last { ts.initial() } else { step.to }),
            Successor::Literal => Some(step.to),
        }
    }

    fn trust_rows(&self, episode: usize, out: &mut Vec<TrustRow>) {
        for ((s, a), w) in &self.windows {
            out.push(TrustRow {
                episode,
                subtask: subtask_id(*s, a),
                state: *s,
                success_ratio: w.ratio(),
                rho: self.rt.rho(*s, a),
                r_value: self.rt.r(*s, a),
                executions: w.executions(),
            });
        }
    }
}

pub(crate) fn checkpoint_name(from: usize, action: &str) -> String {
    format!("{from}_{action}.tsv")
}

/// The planning and learning loop for one seed.
///
/// Each episode, unless a freshly adopted plan is still within its
/// `max_hold_episodes` hold, the agent
/// solves with probability `explore_prob` for a plan strictly better than the
/// incumbent's current quality; otherwise it re-executes the incumbent. Each
/// step's option is run, scored and fed to the R-learner, and the executed
/// prefix is written back into the gain table.
pub fn run_tdm(setup: &Setup, seed: u64) -> Result<RunLog, HarnessError> {
    let cfg = &setup.cfg;
    let ts = &setup.ts;
    let mut env = setup.build_env()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut explore_rng = ChaCha8Rng::seed_from_u64(seed ^ super::EXPLORE_STREAM);
    let mut log = RunLog::new(Agent::Tdm, seed);
    let mut lr = Learner {
        setup,
        seed,
        g: GainTable::new(cfg.inf_value)?,
        rt: RTable::new(),
        windows: BTreeMap::new(),
        options: BTreeMap::new(),
    };
    let mut plan = Plan::empty();
    let mut hold = 0usize;
    let mut episode = 0usize;

    for task in 1..=setup.tasks {
        env.set_task(task)?;
        for _ in 0..cfg.episodes {
            let incumbent = plan_quality(&plan, &lr.g);
            let held = hold > 0;
            hold = hold.saturating_sub(1);
            if !held && (cfg.always_plan || explore_rng.gen::<f64>() < cfg.explore_prob) {
                log.planner_calls += 1;
                match solve(ts, &lr.g, incumbent, cfg.max_plan_len) {
                    Some(p) => {
                        log.switches.push(PlanSwitch {
                            episode,
                            incumbent_quality: incumbent,
                            new_quality: p.quality,
                        });
                        plan = p;
                        hold = cfg.max_hold_episodes;
                    }
                    None => log.no_plan_results += 1,
                }
            }

            env.reset(&mut rng);
            let mut reward = 0.0;
            let mut failures = 0u32;
            let mut executed = 0usize;
            let mut ratios = Vec::new();
            for (i, st) in plan.steps.iter().enumerate() {
                let a = st.action.as_str();
                let budget = cfg.controller.step_budget;
                let opt = lr.option(env.as_ref(), st.from, a)?;
                if !opt.compiled.can_start(env.as_ref()) {
                    failures += 1;
                    break;
                }
                let out =
                    execute_option(env.as_mut(), &opt.compiled, &mut opt.q, budget, &mut rng)?;
                reward += out.env_return;
                let w = lr.record(st.from, a, out.terminated, out.env_return);
                let ratio = w.ratio();
                let r_e = subtask_reward(w, &cfg.trust);
                let last = i + 1 == plan.steps.len() || !out.terminated || out.episode_done;
                let next = lr.successor(st, last);
                r_update(&mut lr.rt, ts, st.from, a, next, r_e, &cfg.trust);
                ratios.push((subtask_id(st.from, a), ratio));
                executed += 1;
                if !out.terminated {
                    failures += 1;
                    break;
                }
                if out.episode_done {
                    break;
                }
            }
            sync_gain_table(&lr.rt, &mut lr.g, &plan.steps[..executed])?;

            log.records.push(EpisodeRecord {
                episode,
                task,
                reward,
                plan_id: plan.id(),
                plan_quality: plan_quality(&plan, &lr.g),
                ratios,
                failures,
            });
            if cfg.trust_snapshot_interval > 0 && (episode + 1).is_multiple_of(cfg.trust_snapshot_interval) {
                lr.trust_rows(episode, &mut log.trust);
            }
            episode += 1;
        }
        let mut p = plan.clone();
        p.quality = plan_quality(&p, &lr.g);
        log.tasks.push(TaskSummary { task, plan: p });
    }

    plan.quality = plan_quality(&plan, &lr.g);
    log.final_trace = plan.trace(&lr.g);
    log.final_plan = plan;
    if cfg.trust_snapshot_interval == 0 || !episode.is_multiple_of(cfg.trust_snapshot_interval) {
        lr.trust_rows(episode.saturating_sub(1), &mut log.trust);
    }
    for ((from, a), opt) in &lr.options {
        log.max_abs_q = log.max_abs_q.max(opt.q.max_abs());
        if cfg.save_qtables {
            let mut buf = Vec::new();
            opt.q
                .save(&mut buf, env.actions())
                .expect("writing to memory cannot fail");
            log.checkpoints.push((
                checkpoint_name(*from, a),
                String::from_utf8(buf).expect("checkpoint text is UTF-8"),
            ));
        }
    }
    Ok(log)
}
