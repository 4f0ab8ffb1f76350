use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hrl_core::agent::Outcome;
use hrl_core::baselines::MethodSpec;
use hrl_core::harness::{self, Checkpoint, ExperimentConfig, MetricsReport, CHECKPOINT_FILE};

#[derive(Parser)]
#[command(
    name = "hrl",
    version,
    about = "Train, evaluate and compare lane-change planners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a method and write checkpoint.txt, curve.csv, probes.csv,
    /// config.toml and config_hash.txt.
    Train(Common),
    /// Greedy evaluation of <out>/checkpoint.txt; writes metrics.csv and
    /// episodes.csv.
    Eval(Common),
    /// Train and evaluate several configs (the eight table rows when no
    /// --config is given); writes comparison.csv and comparison.txt.
    Compare(Common),
    /// Roll out one episode of <out>/checkpoint.txt on scenario --seed and
    /// write trace.csv.
    Trace(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; repeat for `compare`.
    #[arg(long)]
    config: Vec<PathBuf>,
    /// Method name: ddqn-pid, hddqn, slot-based-pid, hddqn-pid or hddqn-pid-lstm.
    #[arg(long)]
    method: Option<String>,
    /// Add Gaussian observation noise.
    #[arg(long)]
    noise: bool,
    /// Master seed (the scenario seed for `trace`).
    #[arg(long)]
    seed: Option<u64>,
    /// Training episodes for `train`/`compare`, evaluation episodes for `eval`.
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

impl Common {
    fn base_configs(&self) -> hrl_core::Result<Vec<ExperimentConfig>> {
        if self.config.is_empty() {
            Ok(vec![ExperimentConfig::default()])
        } else {
            self.config
                .iter()
                .map(|p| ExperimentConfig::load(p))
                .collect()
        }
    }

    /// Apply the command-line overrides. `episodes` goes to training unless
    /// `eval_episodes` is set.
    fn apply(
        &self,
        mut cfg: ExperimentConfig,
        eval_episodes: bool,
        master_seed: bool,
    ) -> hrl_core::Result<ExperimentConfig> {
        if let Some(m) = &self.method {
            cfg.method = m.clone();
        }
        if self.noise {
            cfg.noise = true;
        }
        if let (Some(seed), true) = (self.seed, master_seed) {
            cfg.master_seed = seed;
        }
        match (self.episodes, eval_episodes) {
            (Some(n), true) => cfg.eval_episodes = n,
            (Some(n), false) => cfg.train.episodes = n,
            (None, _) => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn single(&self, eval_episodes: bool, master_seed: bool) -> hrl_core::Result<ExperimentConfig> {
        let mut configs = self.base_configs()?;
        if configs.len() != 1 {
            return Err(hrl_core::Error::Config("expected a single --config".into()));
        }
        self.apply(configs.remove(0), eval_episodes, master_seed)
    }
}

fn print_metrics(label: &str, m: &MetricsReport) {
    println!(
        "{label}: reward {:.2}, success {:.1}%, collision {:.1}%, timeout {:.1}%, lane invasion {:.1}%, jerk {:.2}",
        m.total_average_reward, m.success_rate, m.collision_rate, m.timeout_rate, m.lane_invasion_rate, m.jerk_rms
    );
}

fn load_checkpoint(out: &Path) -> hrl_core::Result<Checkpoint> {
    Checkpoint::load(&out.join(CHECKPOINT_FILE))
}

fn run(cli: Cli) -> hrl_core::Result<()> {
    match cli.command {
        Command::Train(c) => {
            let cfg = c.single(false, true)?;
            let run = harness::run_training(&cfg, &c.out)?;
            if let Some(report) = &run.report {
                let wins = report
                    .curve
                    .iter()
                    .rev()
                    .take(100)
                    .filter(|r| r.outcome == Outcome::Success)
                    .count();
                println!(
                    "trained {} for {} episodes ({} updates)",
                    cfg.method,
                    report.curve.len(),
                    report.updates
                );
                println!("success in the last 100 training episodes: {wins}");
            } else {
                println!("{} is rule-based; nothing to train", cfg.method);
            }
            println!("config hash {}", cfg.hash());
            println!("wrote {}", c.out.display());
        }
        Command::Eval(c) => {
            let cfg = c.single(true, true)?;
            let eval = harness::run_evaluation(&load_checkpoint(&c.out)?, &cfg, &c.out)?;
            print_metrics(&cfg.spec()?.label(), &eval.metrics);
        }
        Command::Compare(c) => {
            let configs: Vec<ExperimentConfig> = if c.config.is_empty() {
                if c.method.is_some() || c.noise {
                    return Err(hrl_core::Error::Config(
                        "--method and --noise need --config files when comparing".into(),
                    ));
                }
                MethodSpec::TABLE
                    .iter()
                    .map(|s| c.apply(ExperimentConfig::for_spec(*s), false, true))
                    .collect::<hrl_core::Result<_>>()?
            } else {
                c.base_configs()?
                    .into_iter()
                    .map(|cfg| c.apply(cfg, false, true))
                    .collect::<hrl_core::Result<_>>()?
            };
            let rows = harness::run_comparison(&configs)?;
            std::fs::create_dir_all(&c.out)?;
            let mut csv = Vec::new();
            harness::write_comparison_csv(&mut csv, &rows)?;
            std::fs::write(c.out.join("comparison.csv"), csv)?;
            let text = harness::comparison_text(&rows);
            std::fs::write(c.out.join("comparison.txt"), &text)?;
            print!("{text}");
        }
        Command::Trace(c) => {
            let cfg = c.single(false, false)?;
            let seed = c.seed.unwrap_or(cfg.master_seed);
            let rows = harness::run_trace(&load_checkpoint(&c.out)?, &cfg, seed, &c.out)?;
            let last = rows.last().map_or("", |r| r.event.as_str());
            println!("{} ticks, final event `{last}`", rows.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
