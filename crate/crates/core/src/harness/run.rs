use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::checkpoint::Checkpoint;
use super::config::ExperimentConfig;
use super::metrics::{write_curve, write_probes, write_records, EpisodeRecord, MetricsReport};
use crate::agent::{
    mix_seed, run_episode, slot_based_policy, train, Actuation, Episode, EpisodeSpec, FlatAgent,
    HierarchicalAgent, Learner, TrainReport,
};
use crate::baselines::Method;
use crate::world::{write_trace, HistoryVector, Observation, TraceRow};
use crate::{Error, OptionId, PlannerChoice, Result};

const NETWORK_SEED: u64 = 0x6e65_7477_6f72_6b73;

pub const CHECKPOINT_FILE: &str = "checkpoint.txt";
pub const CURVE_FILE: &str = "curve.csv";
pub const PROBES_FILE: &str = "probes.csv";
pub const CONFIG_FILE: &str = "config.toml";
pub const HASH_FILE: &str = "config_hash.txt";
pub const METRICS_FILE: &str = "metrics.csv";
pub const EPISODES_FILE: &str = "episodes.csv";
pub const TRACE_FILE: &str = "trace.csv";

/// A frozen policy ready for greedy rollouts.
#[derive(Debug, Clone)]
pub enum TrainedPolicy {
    Hierarchical(HierarchicalAgent),
    Flat(FlatAgent),
    Slot(crate::agent::RuleConfig),
}

impl TrainedPolicy {
    /// Greedy decision on the perceived history.
    pub fn decide(&self, h: &HistoryVector) -> Result<(OptionId, PlannerChoice)> {
        // With epsilon = 0 the draws do not influence the decision.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match self {
            TrainedPolicy::Hierarchical(a) => a.act(h, 0.0, &mut rng),
            TrainedPolicy::Flat(a) => a.act(h, 0.0, &mut rng),
            TrainedPolicy::Slot(rules) => Ok(slot_based_policy(h.latest(), rules)),
        }
    }

    pub fn networks(&self) -> Vec<hrl_neural::NetworkParams> {
        match self {
            TrainedPolicy::Hierarchical(a) => a.networks().into_iter().cloned().collect(),
            TrainedPolicy::Flat(a) => a.networks().into_iter().cloned().collect(),
            TrainedPolicy::Slot(_) => Vec::new(),
        }
    }
}

pub fn actuation(cfg: &ExperimentConfig) -> Result<Actuation> {
    Ok(if cfg.method()?.uses_pid() {
        Actuation::Pid
    } else {
        Actuation::Direct(cfg.direct.clone())
    })
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub checkpoint: Checkpoint,
    pub policy: TrainedPolicy,
    /// `None` for the rule-based method, which has nothing to train.
    pub report: Option<TrainReport>,
}

/// Train the configured method in memory.
pub fn train_method(cfg: &ExperimentConfig) -> Result<TrainingRun> {
    cfg.validate()?;
    let method = cfg.method()?;
    let net = cfg.network_for_method()?;
    let act = actuation(cfg)?;
    let net_seed = mix_seed(cfg.master_seed, NETWORK_SEED);
    let (policy, report) = match method {
        Method::SlotBasedPid => (TrainedPolicy::Slot(cfg.rules.clone()), None),
        Method::DdqnPid => {
            let mut agent = FlatAgent::new(&net, net_seed)?;
            let report = train(
                &mut agent,
                &cfg.env,
                &cfg.train,
                &cfg.rules,
                &act,
                cfg.noise,
                cfg.master_seed,
            )?;
            (TrainedPolicy::Flat(agent), Some(report))
        }
        Method::HDdqnNoPid | Method::HDdqnPid | Method::HDdqnPidLstm => {
            let mut agent = HierarchicalAgent::new(&net, net_seed)?;
            let report = train(
                &mut agent,
                &cfg.env,
                &cfg.train,
                &cfg.rules,
                &act,
                cfg.noise,
                cfg.master_seed,
            )?;
            (TrainedPolicy::Hierarchical(agent), Some(report))
        }
    };
    let checkpoint = Checkpoint {
        method,
        noise: cfg.noise,
        config_hash: cfg.hash(),
        networks: policy.networks(),
    };
    Ok(TrainingRun {
        checkpoint,
        policy,
        report,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_file(path: PathBuf, contents: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(contents)?;
    Ok(())
}

/// Train and write the checkpoint, the learning curve and greedy probes
/// (header only for the rule-based method), the canonical config and its hash to `out`.
pub fn run_training(cfg: &ExperimentConfig, out: &Path) -> Result<TrainingRun> {
    create_dir(out)?;
    let run = train_method(cfg)?;
    run.checkpoint.save(&out.join(CHECKPOINT_FILE))?;
    let mut curve = Vec::new();
    let empty = TrainReport {
        curve: Vec::new(),
        probes: Vec::new(),
        updates: 0,
        warm_start_transitions: 0,
        buffer_len: 0,
    };
    write_curve(&mut curve, run.report.as_ref().unwrap_or(&empty))?;
    write_file(out.join(CURVE_FILE), &curve)?;
    let mut probes = Vec::new();
    write_probes(&mut probes, run.report.as_ref().unwrap_or(&empty))?;
    write_file(out.join(PROBES_FILE), &probes)?;
    write_file(out.join(CONFIG_FILE), cfg.canonical().as_bytes())?;
    write_file(out.join(HASH_FILE), format!("{}\n", cfg.hash()).as_bytes())?;
    Ok(run)
}

/// Rebuild the policy stored in `cp`; the checkpoint must be for the
/// configured method.
pub fn load_policy(cp: &Checkpoint, cfg: &ExperimentConfig) -> Result<TrainedPolicy> {
    let method = cfg.method()?;
    if cp.method != method {
        return Err(Error::CheckpointMismatch {
            checkpoint: cp.method.cli_name().into(),
            config: method.cli_name().into(),
        });
    }
    let net = cfg.network_for_method()?;
    let count = |n: usize| {
        if cp.networks.len() == n {
            Ok(())
        } else {
            Err(Error::Checkpoint(format!(
                "expected {n} networks, found {}",
                cp.networks.len()
            )))
        }
    };
    Ok(match method {
        Method::SlotBasedPid => {
            count(0)?;
            TrainedPolicy::Slot(cfg.rules.clone())
        }
        Method::DdqnPid => {
            count(1)?;
            TrainedPolicy::Flat(FlatAgent::from_params(&net, cp.networks[0].clone())?)
        }
        _ => {
            count(2)?;
            TrainedPolicy::Hierarchical(HierarchicalAgent::from_params(
                &net,
                cp.networks[0].clone(),
                cp.networks[1].clone(),
            )?)
        }
    })
}

/// One greedy episode of `policy` on scenario `seed`.
pub fn rollout(
    policy: &TrainedPolicy,
    cfg: &ExperimentConfig,
    seed: u64,
    k: u64,
    record_trace: bool,
) -> Result<Episode> {
    let spec = EpisodeSpec {
        seed,
        randomize: cfg.eval_randomize,
        noisy: cfg.noise,
        record_trace,
        episode_id: k,
    };
    let mut decide = |h: &HistoryVector, _: &Observation| policy.decide(h);
    run_episode(&cfg.env, &spec, &mut decide, &actuation(cfg)?)
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub metrics: MetricsReport,
    pub records: Vec<EpisodeRecord>,
}

/// Greedy rollouts over the evaluation seeds.
pub fn evaluate_policy(policy: &TrainedPolicy, cfg: &ExperimentConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let records = cfg
        .eval_seeds()
        .enumerate()
        .map(|(k, seed)| {
            Ok(EpisodeRecord::new(
                seed,
                &rollout(policy, cfg, seed, k as u64, false)?.result,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation {
        metrics: MetricsReport::from_records(&records),
        records,
    })
}

pub fn evaluate(cp: &Checkpoint, cfg: &ExperimentConfig) -> Result<Evaluation> {
    evaluate_policy(&load_policy(cp, cfg)?, cfg)
}

pub fn write_metrics<W: Write>(
    out: W,
    label: &str,
    config_hash: &str,
    m: &MetricsReport,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "episodes",
        "total_average_reward",
        "lane_invasion_rate",
        "collision_rate",
        "success_rate",
        "timeout_rate",
        "jerk_rms",
        "config_hash",
    ])?;
    w.write_record([
        label.to_string(),
        m.episodes.to_string(),
        m.total_average_reward.to_string(),
        m.lane_invasion_rate.to_string(),
        m.collision_rate.to_string(),
        m.success_rate.to_string(),
        m.timeout_rate.to_string(),
        m.jerk_rms.to_string(),
        config_hash.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// Evaluate and write the summary and the per-episode table to `out`.
pub fn run_evaluation(cp: &Checkpoint, cfg: &ExperimentConfig, out: &Path) -> Result<Evaluation> {
    create_dir(out)?;
    let eval = evaluate(cp, cfg)?;
    let mut buf = Vec::new();
    write_metrics(&mut buf, &cfg.spec()?.label(), &cfg.hash(), &eval.metrics)?;
    write_file(out.join(METRICS_FILE), &buf)?;
    let mut buf = Vec::new();
    write_records(&mut buf, &eval.records)?;
    write_file(out.join(EPISODES_FILE), &buf)?;
    Ok(eval)
}

/// Per-tick trace of one greedy episode on scenario `seed`.
pub fn export_trace(cp: &Checkpoint, cfg: &ExperimentConfig, seed: u64) -> Result<Vec<TraceRow>> {
    Ok(rollout(&load_policy(cp, cfg)?, cfg, seed, 0, true)?.trace)
}

pub fn run_trace(
    cp: &Checkpoint,
    cfg: &ExperimentConfig,
    seed: u64,
    out: &Path,
) -> Result<Vec<TraceRow>> {
    create_dir(out)?;
    let rows = export_trace(cp, cfg, seed)?;
    let mut buf = Vec::new();
    write_trace(&mut buf, &rows)?;
    write_file(out.join(TRACE_FILE), &buf)?;
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub label: String,
    pub config_hash: String,
    pub metrics: MetricsReport,
}

/// Train and evaluate every config, in the given order.
pub fn run_comparison(configs: &[ExperimentConfig]) -> Result<Vec<ComparisonRow>> {
    if configs.len() < 2 {
        return Err(Error::Config(
            "a comparison needs at least two configs".into(),
        ));
    }
    configs
        .iter()
        .map(|cfg| {
            let run = train_method(cfg)?;
            let eval = evaluate_policy(&run.policy, cfg)?;
            Ok(ComparisonRow {
                label: cfg.spec()?.label(),
                config_hash: cfg.hash(),
                metrics: eval.metrics,
            })
        })
        .collect()
}

pub const COMPARISON_HEADERS: [&str; 8] = [
    "Method",
    "Total Average Reward",
    "Lane Invasion (%)",
    "Collision (%)",
    "Success (%)",
    "Timeout (%)",
    "Jerk RMS",
    "Config Hash",
];

fn comparison_cells(row: &ComparisonRow) -> [String; 8] {
    let m = &row.metrics;
    [
        row.label.clone(),
        format!("{:.2}", m.total_average_reward),
        format!("{:.1}", m.lane_invasion_rate),
        format!("{:.1}", m.collision_rate),
        format!("{:.1}", m.success_rate),
        format!("{:.1}", m.timeout_rate),
        format!("{:.2}", m.jerk_rms),
        row.config_hash.clone(),
    ]
}

pub fn write_comparison_csv<W: Write>(out: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARISON_HEADERS)?;
    for row in rows {
        w.write_record(comparison_cells(row))?;
    }
    w.flush()?;
    Ok(())
}

/// Left-aligned text table, columns padded to their widest cell.
pub fn comparison_text(rows: &[ComparisonRow]) -> String {
    let cells: Vec<[String; 8]> = rows.iter().map(comparison_cells).collect();
    let mut widths = COMPARISON_HEADERS.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cols: &[&str]| {
        let padded: Vec<String> = cols
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut text = line(&COMPARISON_HEADERS);
    text += &line(
        &widths
            .map(|w| "-".repeat(w))
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>(),
    );
    for row in &cells {
        text += &line(&row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    text
}
