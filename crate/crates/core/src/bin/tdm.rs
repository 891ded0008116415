use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use tdm_core::harness::{run_agent, write_run, ExperimentConfig, Setup};
use tdm_core::planner::{solve, GainTable, DEFAULT_INF};
use tdm_core::symlang::{ground, initial_state, parse_domain};

#[derive(Parser)]
#[command(
    name = "tdm",
    version,
    about = "Symbolic planning with learned, trust-scored subtasks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the agents listed in a config file and write CSV logs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// First seed; replaces the config's seed list.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of consecutive seeds starting at --seed (or 0).
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Solve every episode instead of with the exploration probability.
        #[arg(long)]
        always_plan: bool,
        /// Keep the intra-option ε constant.
        #[arg(long)]
        no_epsilon_decay: bool,
        /// Warm-start option Q-tables from a previous run's `qtables` directory.
        #[arg(long)]
        load_qtables: Option<PathBuf>,
    },
    /// Ground a domain and print the best plan under the given gains.
    Plan {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 32)]
        max_len: usize,
        /// Lines of `state<TAB>action<TAB>value`; missing pairs read as INF.
        #[arg(long)]
        gains: Option<PathBuf>,
        /// Also print the grounded states.
        #[arg(long)]
        states: bool,
    },
    /// Check a config file, its domain and its environment without running.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            seeds,
            out,
            always_plan,
            no_epsilon_decay,
            load_qtables,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            match (seed, seeds) {
                (Some(s), None) => cfg.seeds = vec![s],
                (s, Some(k)) => {
                    let s = s.unwrap_or(0);
                    cfg.seeds = (s..s + k).collect();
                }
                (None, None) => {}
            }
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            cfg.always_plan |= always_plan;
            if no_epsilon_decay {
                cfg.controller.epsilon_decay_enabled = false;
            }
            if load_qtables.is_some() {
                cfg.load_qtables = load_qtables;
            }
            let setup = Setup::new(cfg)?;
            for &agent in &setup.cfg.agents {
                let logs = run_agent(&setup, agent)?;
                write_run(&logs, &setup.cfg.output_dir)?;
                let n = logs.iter().map(|l| l.records.len()).sum::<usize>().max(1);
                let mean = logs
                    .iter()
                    .flat_map(|l| &l.records)
                    .map(|r| r.reward)
                    .sum::<f64>()
                    / n as f64;
                println!(
                    "{}: {} seeds, mean episode reward {mean:.3}, output in {}",
                    agent.name(),
                    logs.len(),
                    setup.cfg.output_dir.join(agent.name()).display()
                );
                for log in &logs {
                    let plans: Vec<String> = log.tasks.iter().map(|t| t.plan.id()).collect();
                    println!("  seed {}: {}", log.seed, plans.join(" | "));
                }
            }
        }
        Command::Plan {
            domain,
            max_len,
            gains,
            states,
        } => {
            if max_len == 0 {
                bail!("--max-len must be at least 1");
            }
            let text =
                std::fs::read_to_string(&domain).with_context(|| domain.display().to_string())?;
            let d = parse_domain(&text)?;
            let ts = ground(&d, &initial_state(&d)?)?;
            let mut g = GainTable::new(DEFAULT_INF)?;
            if let Some(path) = gains {
                for (k, v) in read_gains(&path)? {
                    g.set(k.0, &k.1, v)?;
                }
            }
            if states {
                for i in 0..ts.state_count() {
                    println!("# state {i}: {}", ts.state(i).render_true(ts.fluents()));
                }
            }
            match solve(&ts, &g, f64::NEG_INFINITY, max_len) {
                Some(p) => print!("{}", p.trace(&g)),
                None => println!("quality=0"),
            }
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let setup = Setup::new(cfg)?;
            println!(
                "ok: {} fluents, {} actions, {} states, {} transitions, {} tasks, {} seeds",
                setup.ts.fluents().len(),
                setup.ts.actions().len(),
                setup.ts.state_count(),
                setup.ts.transitions().len(),
                setup.tasks,
                setup.cfg.seeds.len()
            );
        }
    }
    Ok(())
}

fn read_gains(path: &PathBuf) -> Result<BTreeMap<(usize, String), f64>> {
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            bail!(
                "{}:{}: expected state<TAB>action<TAB>value",
                path.display(),
                i + 1
            );
        }
        let s: usize = f[0]
            .parse()
            .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        let v: f64 = f[2]
            .parse()
            .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        out.insert((s, f[1].to_string()), v);
    }
    Ok(out)
}
