use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{HarnessError, RunLog};

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Write one agent's logs (seed order preserved) into `dir`.
///
/// Files: `learning_curve.csv`, `success_ratio.csv`, `failures.csv`,
/// `plans.csv`, `task_plans.csv`, `trust.csv`, `final_plan.txt`, and
/// `qtables/seed_<n>/*.tsv` when checkpoints were collected.
pub fn emit_csv(logs: &[RunLog], dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut curve = String::from("episode,seed,reward\n");
    let mut ratios = String::from("episode,seed,subtask,ratio\n");
    let mut failures = String::from("episode,seed,failures\n");
    let mut plans = String::from("episode,seed,task,plan,quality\n");
    let mut task_plans = String::from("seed,task,plan,quality\n");
    let mut trust =
        String::from("episode,seed,subtask,state,success_ratio,rho_estimate,R_value,executions\n");
    let mut final_plan = String::new();
    for log in logs {
        let seed = log.seed;
        for r in &log.records {
            let _ = writeln!(curve, "{},{seed},{}", r.episode, r.reward);
            for (s, x) in &r.ratios {
                let _ = writeln!(ratios, "{},{seed},{s},{x}", r.episode);
            }
            let _ = writeln!(failures, "{},{seed},{}", r.episode, r.failures);
            let _ = writeln!(
                plans,
                "{},{seed},{},{},{}",
                r.episode, r.task, r.plan_id, r.plan_quality
            );
        }
        for t in &log.tasks {
            let _ = writeln!(
                task_plans,
                "{seed},{},{},{}",
                t.task,
                t.plan.id(),
                t.plan.quality
            );
        }
        for t in &log.trust {
            let _ = writeln!(
                trust,
                "{},{seed},{},{},{},{},{},{}",
                t.episode, t.subtask, t.state, t.success_ratio, t.rho, t.r_value, t.executions
            );
        }
        let _ = writeln!(final_plan, "# seed {seed}");
        final_plan.push_str(&log.final_trace);
        if !log.checkpoints.is_empty() {
            let qdir = dir.join("qtables").join(format!("seed_{seed}"));
            fs::create_dir_all(&qdir).map_err(|e| HarnessError::io(&qdir, e))?;
            for (name, text) in &log.checkpoints {
                write(&qdir.join(name), text)?;
            }
        }
    }
    write(&dir.join("learning_curve.csv"), &curve)?;
    write(&dir.join("success_ratio.csv"), &ratios)?;
    write(&dir.join("failures.csv"), &failures)?;
    write(&dir.join("plans.csv"), &plans)?;
    write(&dir.join("task_plans.csv"), &task_plans)?;
    write(&dir.join("trust.csv"), &trust)?;
    write(&dir.join("final_plan.txt"), &final_plan)?;
    Ok(())
}

/// Emit logs under `<out>/<agent>/`.
pub fn write_run(logs: &[RunLog], out: &Path) -> Result<(), HarnessError> {
    let Some(first) = logs.first() else {
        return emit_csv(logs, out);
    };
    emit_csv(logs, &out.join(first.agent.name()))
}
