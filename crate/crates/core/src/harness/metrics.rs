use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::agent::{EpisodeResult, Outcome, ProbeRow, TrainReport};
use crate::Result;

/// One evaluation episode, as written to the per-episode CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub outcome: Outcome,
    pub option_reward: f64,
    pub planner_reward: f64,
    pub total_reward: f64,
    pub lane_invasions: u32,
    pub macro_steps: u32,
    pub ticks: u32,
    pub jerk_rms: f64,
}

impl EpisodeRecord {
    pub fn new(seed: u64, r: &EpisodeResult) -> Self {
        EpisodeRecord {
            seed,
            outcome: r.outcome,
            option_reward: r.option_reward_total,
            planner_reward: r.planner_reward_total,
            total_reward: r.total_reward(),
            lane_invasions: r.lane_invasions,
            macro_steps: r.macro_steps,
            ticks: r.ticks,
            jerk_rms: r.jerk_rms,
        }
    }
}

/// Summary metrics over an evaluation run. Rates are percentages of
/// episodes; the lane-invasion rate counts episodes with at least one
/// invasion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub episodes: usize,
    pub total_average_reward: f64,
    pub lane_invasion_rate: f64,
    pub collision_rate: f64,
    pub success_rate: f64,
    pub timeout_rate: f64,
    /// Mean of the per-episode jerk RMS values.
    pub jerk_rms: f64,
}

impl MetricsReport {
    pub fn from_records(records: &[EpisodeRecord]) -> Self {
        let n = records.len();
        let pct = |k: usize| {
            if n == 0 {
                0.0
            } else {
                100.0 * k as f64 / n as f64
            }
        };
        let mean = |f: &dyn Fn(&EpisodeRecord) -> f64| {
            if n == 0 {
                0.0
            } else {
                records.iter().map(f).sum::<f64>() / n as f64
            }
        };
        let count = |o: Outcome| records.iter().filter(|r| r.outcome == o).count();
        MetricsReport {
            episodes: n,
            total_average_reward: mean(&|r| r.total_reward),
            lane_invasion_rate: pct(records.iter().filter(|r| r.lane_invasions > 0).count()),
            collision_rate: pct(count(Outcome::Collision)),
            success_rate: pct(count(Outcome::Success)),
            timeout_rate: pct(count(Outcome::Timeout)),
            jerk_rms: mean(&|r| r.jerk_rms),
        }
    }
}

pub fn write_records<W: Write>(out: W, records: &[EpisodeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record([
            "seed",
            "outcome",
            "option_reward",
            "planner_reward",
            "total_reward",
            "lane_invasions",
            "macro_steps",
            "ticks",
            "jerk_rms",
        ])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: std::io::Read>(input: R) -> Result<Vec<EpisodeRecord>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_curve<W: Write>(out: W, report: &TrainReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "episode",
        "option_reward",
        "planner_reward",
        "outcome",
        "epsilon",
        "loss_o",
        "loss_p",
    ])?;
    for row in &report.curve {
        w.write_record([
            row.episode.to_string(),
            row.option_reward.to_string(),
            row.planner_reward.to_string(),
            row.outcome.as_str().to_string(),
            row.epsilon.to_string(),
            row.loss_o.to_string(),
            row.loss_p.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_probes<W: Write>(out: W, report: &TrainReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["episode", "mean_reward", "success_rate"])?;
    for p in &report.probes {
        w.write_record([
            p.episode.to_string(),
            p.mean_reward.to_string(),
            p.success_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Learned-policy episodes until a greedy probe first scores at least
/// `fraction` of the final reward, taken as the mean of the last
/// `final_window` probes. `None` without enough probes or when the final
/// reward is not positive.
pub fn probe_convergence(probes: &[ProbeRow], fraction: f64, final_window: usize) -> Option<usize> {
    if final_window == 0 || probes.len() < final_window {
        return None;
    }
    let tail = &probes[probes.len() - final_window..];
    let final_reward = tail.iter().map(|p| p.mean_reward).sum::<f64>() / final_window as f64;
    if final_reward <= 0.0 {
        return None;
    }
    probes
        .iter()
        .find(|p| p.mean_reward >= fraction * final_reward)
        .map(|p| p.episode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(seed: u64, outcome: Outcome, reward: f64, invasions: u32) -> EpisodeRecord {
        EpisodeRecord {
            seed,
            outcome,
            option_reward: reward / 2.0,
            planner_reward: reward / 2.0,
            total_reward: reward,
            lane_invasions: invasions,
            macro_steps: 3,
            ticks: 90,
            jerk_rms: 1.0 + seed as f64,
        }
    }

    #[test]
    fn rates_from_counts() {
        let mut records: Vec<_> = (0..196)
            .map(|s| rec(s, Outcome::Success, 10.0, 0))
            .collect();
        records.extend((196..200).map(|s| rec(s, Outcome::Collision, -10.0, 0)));
        let m = MetricsReport::from_records(&records);
        assert_eq!(m.success_rate, 98.0);
        assert_eq!(m.collision_rate, 2.0);
        assert_eq!(m.lane_invasion_rate, 0.0);
        assert_eq!(m.success_rate + m.collision_rate + m.timeout_rate, 100.0);
        assert!((m.total_average_reward - (1960.0 - 40.0) / 200.0).abs() < 1e-12);
    }

    #[test]
    fn invasion_rate_counts_episodes() {
        let records = vec![
            rec(0, Outcome::Success, 0.0, 3),
            rec(1, Outcome::Timeout, 0.0, 0),
        ];
        let m = MetricsReport::from_records(&records);
        assert_eq!(m.lane_invasion_rate, 50.0);
        assert_eq!(m.timeout_rate, 50.0);
        assert_eq!(m.jerk_rms, 1.5);
    }

    #[test]
    fn records_csv_round_trip() {
        let records = vec![
            rec(4, Outcome::Success, 12.5, 0),
            rec(5, Outcome::Collision, -3.25, 1),
        ];
        let mut buf = Vec::new();
        write_records(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("seed,outcome,option_reward,"));
        assert_eq!(read_records(buf.as_slice()).unwrap(), records);
    }

    fn probes(rewards: &[f64]) -> Vec<ProbeRow> {
        rewards
            .iter()
            .enumerate()
            .map(|(k, &r)| ProbeRow {
                episode: 100 * (k + 1),
                mean_reward: r,
                success_rate: 1.0,
            })
            .collect()
    }

    #[test]
    fn convergence_point() {
        // Final over the last two probes: 100, target 80.
        let p = probes(&[-50.0, 20.0, 79.9, 85.0, 60.0, 95.0, 105.0]);
        assert_eq!(probe_convergence(&p, 0.8, 2), Some(400));
        assert_eq!(probe_convergence(&p, 0.8, 8), None);
        assert_eq!(probe_convergence(&p[..1], 0.8, 1), None);
    }

    #[test]
    fn convergence_requires_positive_final() {
        assert_eq!(
            probe_convergence(&probes(&[-100.0, -10.0, 0.0]), 0.8, 1),
            None
        );
    }
}
