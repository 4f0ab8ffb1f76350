//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is printed by a plain
//! `cargo test`. Criterion failures are reported, not raised; the process
//! only fails when something errors outright.

use std::collections::HashMap;
use std::fs;
use std::time::{Duration, Instant};

use hrl_core::agent::{
    argmax, ddqn_target, epsilon_greedy, max_target, EpsilonSchedule, QNetwork, ReplayBuffer,
    Sample,
};
use hrl_core::baselines::{Method, MethodSpec};
use hrl_core::control::{
    execute_subtrajectory, longitudinal_control, ControlConfig, Pid, PidGains, RewardSpec,
};
use hrl_core::harness::*;
use hrl_core::world::geometry::Vec2;
use hrl_core::world::{RewardContext, RewardWeights, World, WorldConfig};
use hrl_core::{OptionId, PlannerChoice};
use hrl_neural::{backward, forward, init_params, Architecture, NetworkParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 3] = [1, 2, 3];

struct Report {
    passed: usize,
    total: usize,
}

impl Report {
    fn line(&mut self, name: &str, pass: bool, detail: String) {
        self.total += 1;
        self.passed += usize::from(pass);
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

// ---------------------------------------------------------------- gradients

fn probe_loss(params: &NetworkParams, input: &[f64], c: &[f64]) -> f64 {
    params
        .predict(input)
        .unwrap()
        .iter()
        .zip(c)
        .map(|(q, w)| q * w)
        .sum()
}

struct GradientCheck {
    probes: usize,
    lstm: usize,
    checked: usize,
    kinks: usize,
    worst: f64,
}

fn gradient_check() -> GradientCheck {
    const EPS: f64 = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut worst: f64 = 0.0;
    let (mut probes, mut lstm, mut checked, mut kinks) = (0, 0, 0, 0);
    for k in 0..120 {
        let (input_dim, seq_len, units) = (
            rng.random_range(1..15),
            rng.random_range(1..5),
            rng.random_range(1..10),
        );
        let hidden: Vec<usize> = (0..rng.random_range(0..3))
            .map(|_| rng.random_range(1..9))
            .collect();
        let outputs = rng.random_range(1..7);
        let arch = if k % 2 == 0 {
            lstm += 1;
            Architecture::lstm(input_dim, seq_len, units, &hidden, outputs)
        } else {
            Architecture::dense(input_dim, seq_len, units, &hidden, outputs)
        };
        // Zero biases put units of a layer behind a dead ReLU layer exactly
        // on the kink; a small jitter moves every probe off it.
        let mut params = init_params(&arch, rng.random()).unwrap();
        for i in 0..params.param_count() {
            let v = params.get_flat(i) + rng.random_range(-0.1..0.1);
            params.set_flat(i, v);
        }
        let input: Vec<f64> = (0..arch.input_len())
            .map(|_| rng.random_range(-1.5..1.5))
            .collect();
        let c: Vec<f64> = (0..outputs).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (_, trace) = forward(&params, &input).unwrap();
        let grads = backward(&params, &trace, &c).unwrap();
        let f0 = probe_loss(&params, &input, &c);
        let n = params.param_count();
        let indices: Vec<usize> = if n <= 300 {
            (0..n).collect()
        } else {
            (0..300).map(|_| rng.random_range(0..n)).collect()
        };
        for i in indices {
            let mut p = params.clone();
            let base = p.get_flat(i);
            p.set_flat(i, base + EPS);
            let up = probe_loss(&p, &input, &c);
            p.set_flat(i, base - EPS);
            let down = probe_loss(&p, &input, &c);
            // A ReLU kink inside [base - EPS, base + EPS] shows up as
            // one-sided slopes that disagree; such coordinates are skipped.
            let (right, left) = ((up - f0) / EPS, (f0 - down) / EPS);
            if (right - left).abs() > 1e-3 * right.abs().max(left.abs()).max(1.0) {
                kinks += 1;
                continue;
            }
            let fd = (up - down) / (2.0 * EPS);
            let bp = grads.get_flat(i);
            worst = worst.max((fd - bp).abs() / fd.abs().max(bp.abs()).max(1e-5));
            checked += 1;
        }
        probes += 1;
    }
    GradientCheck {
        probes,
        lstm,
        checked,
        kinks,
        worst,
    }
}

// ------------------------------------------------------------ target oracle

fn target_oracle() -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut exact, mut reduced) = (0, 0);
    let n_cases = 10_000;
    for _ in 0..n_cases {
        let n = rng.random_range(1..7);
        let mut draw = || -> Vec<f64> {
            (0..n)
                .map(|_| {
                    if rng.random_bool(0.1) {
                        1.0
                    } else {
                        rng.random_range(-50.0..50.0)
                    }
                })
                .collect()
        };
        let (q_on, q_tg) = (draw(), draw());
        let r = rng.random_range(-200.0..200.0);
        let gamma = rng.random_range(0.0..1.0);
        let terminal = rng.random_bool(0.2);
        let mut best = 0;
        for i in 1..n {
            if q_on[i] > q_on[best] {
                best = i;
            }
        }
        let want = if terminal { r } else { r + gamma * q_tg[best] };
        exact += usize::from(
            ddqn_target(r, terminal, &q_on, &q_tg, gamma)
                .unwrap()
                .to_bits()
                == want.to_bits(),
        );
        let same = ddqn_target(r, terminal, &q_on, &q_on, gamma).unwrap();
        reduced +=
            usize::from(same.to_bits() == max_target(r, terminal, &q_on, gamma).unwrap().to_bits());
    }
    (exact, reduced)
}

// ---------------------------------------------------------------- chain MDP

const CHAIN: usize = 5;

fn chain_step(s: usize, a: usize) -> (usize, f64, bool) {
    match (s, a) {
        (0, 0) => (0, 0.1, true),
        (s, 0) => (s - 1, 0.0, false),
        (s, _) if s + 1 == CHAIN - 1 => (s + 1, 1.0, true),
        (s, _) => (s + 1, 0.0, false),
    }
}

fn one_hot(s: usize) -> Vec<f64> {
    let mut v = vec![0.0; CHAIN];
    v[s] = 1.0;
    v
}

/// Episodes after which the greedy policy equals the value-iteration
/// optimum for the rest of the run; `None` if it is not optimal at the end.
fn chain_run(seed: u64, episodes: usize) -> Option<usize> {
    let gamma = 0.9;
    let mut v = [0.0; CHAIN];
    let q_of = |v: &[f64; CHAIN], s: usize, a: usize| {
        let (n, r, done) = chain_step(s, a);
        r + if done { 0.0 } else { gamma * v[n] }
    };
    for _ in 0..200 {
        for s in 0..CHAIN - 1 {
            v[s] = q_of(&v, s, 0).max(q_of(&v, s, 1));
        }
    }
    let optimal: Vec<usize> = (0..CHAIN - 1)
        .map(|s| argmax(&[q_of(&v, s, 0), q_of(&v, s, 1)]).unwrap())
        .collect();

    let mut net = QNetwork::new(
        &Architecture::dense(CHAIN, 1, 16, &[16], 2),
        seed,
        0.05,
        0.9,
        10.0,
    )
    .unwrap();
    let mut buffer = ReplayBuffer::new(5_000);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schedule = EpsilonSchedule {
        start: 1.0,
        end: 0.05,
        decay_episodes: 200,
    };
    let greedy = |net: &QNetwork| -> Vec<usize> {
        (0..CHAIN - 1)
            .map(|s| argmax(&net.q(&one_hot(s)).unwrap()).unwrap())
            .collect()
    };
    let mut stable_from = None;
    for ep in 0..episodes {
        let mut s = 0;
        let mut steps = Vec::new();
        for _ in 0..20 {
            let a =
                epsilon_greedy(&net.q(&one_hot(s)).unwrap(), schedule.value(ep), &mut rng).unwrap();
            let (n, r, done) = chain_step(s, a);
            steps.push((s, a, r, n, done));
            s = n;
            if done {
                break;
            }
        }
        buffer.push_episode(steps);
        for _ in 0..4 {
            let batch: Vec<Sample> = buffer
                .sample_sequences(16, 1, &mut rng)
                .unwrap()
                .iter()
                .map(|w| {
                    let &(s, a, r, n, done) = w.last();
                    let next = one_hot(n);
                    let y = ddqn_target(
                        r,
                        done,
                        &net.q(&next).unwrap(),
                        &net.q_target(&next).unwrap(),
                        gamma,
                    )
                    .unwrap();
                    Sample {
                        input: one_hot(s),
                        action: a,
                        target: y,
                    }
                })
                .collect();
            net.train(&batch).unwrap();
        }
        if ep % 10 == 9 {
            net.sync_target();
        }
        if greedy(&net) != optimal {
            stable_from = None;
        } else if stable_from.is_none() {
            stable_from = Some(ep + 1);
        }
    }
    stable_from
}

// --------------------------------------------------------------------- PID

fn open_road() -> World {
    let mut w = World::reset(&WorldConfig::default(), 0, false).unwrap().0;
    for v in [&mut w.obstacle, &mut w.car_a, &mut w.car_b] {
        v.position.x = 195.0;
        v.speed = 0.0;
    }
    w
}

/// Worst cross-track error from 4 s onwards, starting 0.5 m off the midline.
fn lateral_settling(speed: f64) -> f64 {
    let mut w = open_road();
    w.ego.position.y = 0.5;
    w.ego.speed = speed;
    let weights = RewardWeights::default();
    let spec = RewardSpec {
        context: RewardContext {
            option: OptionId::LaneFollowWait,
            choice: PlannerChoice::Choice0,
            decision_tick: false,
        },
        weights: &weights,
    };
    let cfg = ControlConfig::default();
    let mut errors = Vec::new();
    while errors.len() < 240 {
        let wp = Vec2::new(w.ego.position.x + 20.0, 0.0);
        let out = execute_subtrajectory(&mut w, wp, speed, &cfg, 300, spec);
        errors.extend(out.trace.iter().map(|t| t.position.y.abs()));
    }
    errors[119..240].iter().copied().fold(0.0, f64::max)
}

/// Worst speed error from 5 s onwards after a 0 to 10 m/s step.
fn speed_settling() -> f64 {
    let mut w = open_road();
    w.ego.speed = 0.0;
    let dt = w.config().dt();
    let mut pid = Pid::new(PidGains::longitudinal());
    let mut worst: f64 = 0.0;
    for tick in 1..=300 {
        let t = longitudinal_control(&mut pid, w.ego.speed, 10.0, dt);
        w.step(t, 0.0);
        if tick >= 150 {
            worst = worst.max((w.ego.speed - 10.0).abs());
        }
    }
    worst
}

// ------------------------------------------------------------------ replay

fn replay_properties() -> (usize, usize, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let (mut windows, mut bad) = (0, 0);
    while windows < 100_000 {
        let mut buf = ReplayBuffer::new(rng.random_range(5..80));
        for tag in 0..rng.random_range(1..12) {
            let len = rng.random_range(0..25);
            buf.push_episode((0..len).map(|i| (tag, i)).collect::<Vec<(usize, usize)>>());
        }
        if buf.is_empty() {
            buf.push_episode(vec![(99, 0)]);
        }
        let stored: Vec<&[(usize, usize)]> = buf.episodes().collect();
        let n = rng.random_range(1..6);
        for w in buf
            .sample_sequences(rng.random_range(1..8), n, &mut rng)
            .unwrap()
        {
            windows += 1;
            let ep = stored[w.episode];
            let tag = ep[0].0;
            let last = *w.indices.last().unwrap();
            let ok = w.steps.len() == n
                && w.indices
                    .iter()
                    .zip(&w.steps)
                    .all(|(&i, s)| s.0 == tag && s.1 == i && i < ep.len())
                && w.indices
                    .iter()
                    .enumerate()
                    .all(|(k, &i)| i == (last + 1 + k).saturating_sub(n));
            bad += usize::from(!ok);
        }
    }

    let mut buf = ReplayBuffer::new(1_000);
    for (tag, len) in [1usize, 3, 7, 20, 50].into_iter().enumerate() {
        buf.push_episode((0..len).map(|i| (tag, i)).collect::<Vec<_>>());
    }
    let draws = 100_000;
    let mut counts = [0usize; 5];
    for w in buf.sample_sequences(draws, 3, &mut rng).unwrap() {
        counts[w.episode] += 1;
    }
    // Largest deviation from draws/5 in binomial standard deviations.
    let p = 0.2;
    let sd = (draws as f64 * p * (1.0 - p)).sqrt();
    let z = counts
        .iter()
        .map(|&c| (c as f64 - draws as f64 * p).abs() / sd)
        .fold(0.0, f64::max);
    (windows, bad, z)
}

// ------------------------------------------------------------ trained agents

struct Trained {
    run: TrainingRun,
    elapsed: Duration,
}

fn config(method: Method, noise: bool, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::for_spec(MethodSpec::new(method, noise).unwrap());
    cfg.master_seed = seed;
    cfg
}

/// Trains each (method, noise, seed) once and keeps the result.
#[derive(Default)]
struct Registry {
    trained: HashMap<(Method, bool, u64), Trained>,
    evals: HashMap<(Method, bool, u64, bool), MetricsReport>,
}

impl Registry {
    fn get(&mut self, method: Method, noise: bool, seed: u64) -> &Trained {
        self.trained
            .entry((method, noise, seed))
            .or_insert_with(|| {
                let start = Instant::now();
                let run = train_method(&config(method, noise, seed)).unwrap();
                let elapsed = start.elapsed();
                eprintln!(
                    "  trained {} seed {seed} in {:.1}s",
                    MethodSpec::new(method, noise).unwrap().label(),
                    elapsed.as_secs_f64()
                );
                Trained { run, elapsed }
            })
    }

    /// 200-episode greedy evaluation, on randomised scenarios or the fixed one.
    fn eval(&mut self, method: Method, noise: bool, seed: u64, randomize: bool) -> MetricsReport {
        if let Some(m) = self.evals.get(&(method, noise, seed, randomize)) {
            return m.clone();
        }
        let mut cfg = config(method, noise, seed);
        cfg.eval_randomize = randomize;
        let m = evaluate_policy(&self.get(method, noise, seed).run.policy, &cfg)
            .unwrap()
            .metrics;
        self.evals
            .insert((method, noise, seed, randomize), m.clone());
        m
    }
}

// ------------------------------------------------------------- determinism

fn files_identical(cfg: &ExperimentConfig) -> Vec<String> {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let run = run_training(cfg, d.path()).unwrap();
        run_evaluation(&run.checkpoint, cfg, d.path()).unwrap();
        run_trace(&run.checkpoint, cfg, cfg.master_seed, d.path()).unwrap();
        let rows = run_comparison(&[cfg.clone(), cfg.clone()]).unwrap();
        let mut buf = Vec::new();
        write_comparison_csv(&mut buf, &rows).unwrap();
        fs::write(d.path().join("comparison.csv"), buf).unwrap();
    }
    [
        CURVE_FILE,
        PROBES_FILE,
        METRICS_FILE,
        EPISODES_FILE,
        TRACE_FILE,
        "comparison.csv",
        CHECKPOINT_FILE,
        HASH_FILE,
    ]
    .into_iter()
    .filter(|f| {
        fs::read(dirs[0].path().join(f)).unwrap() != fs::read(dirs[1].path().join(f)).unwrap()
    })
    .map(String::from)
    .collect()
}

fn main() {
    let started = Instant::now();
    let mut report = Report {
        passed: 0,
        total: 0,
    };

    let t = Instant::now();
    let g = gradient_check();
    let secs = t.elapsed().as_secs_f64();
    report.line(
        "gradient correctness",
        g.probes >= 100 && g.lstm > 0 && g.worst < 1e-4 && g.kinks * 100 <= g.checked && secs < 60.0,
        format!(
            "{} probes ({} LSTM), {} coordinates, max relative error {:.2e}, {} skipped at ReLU kinks, {secs:.1}s",
            g.probes, g.lstm, g.checked, g.worst, g.kinks
        ),
    );

    let (exact, reduced) = target_oracle();
    report.line(
        "double-Q target oracle",
        exact == 10_000 && reduced == 10_000,
        format!("{exact}/10000 bit-exact, {reduced}/10000 equal-network reductions"),
    );

    let t = Instant::now();
    let chain: Vec<Option<usize>> = (0..5).map(|s| chain_run(s, 500)).collect();
    let secs = t.elapsed().as_secs_f64();
    let solved = chain.iter().filter(|c| c.is_some()).count();
    report.line(
        "tabular convergence probe",
        solved == 5 && secs < 120.0,
        format!("{solved}/5 seeds optimal within 500 episodes (stable from {chain:?}), {secs:.1}s"),
    );

    let t = Instant::now();
    let lateral: Vec<f64> = [6.0, 8.0, 10.0].into_iter().map(lateral_settling).collect();
    let speed = speed_settling();
    let secs = t.elapsed().as_secs_f64();
    let lat_worst = lateral.iter().copied().fold(0.0, f64::max);
    report.line(
        "PID tracking",
        lat_worst < 0.1 && speed <= 0.2 && secs < 5.0,
        format!("cross-track after 4 s <= {lat_worst:.4} m, speed error after 5 s <= {speed:.4} m/s, {secs:.2}s"),
    );

    let (windows, bad, z) = replay_properties();
    report.line(
        "replay sampling properties",
        bad == 0 && z <= 2.576,
        format!(
            "{windows} windows, {bad} malformed, episode-choice max |z| = {z:.2} (99% bound 2.576)"
        ),
    );

    let mut reg = Registry::default();

    // Headline: LSTM planner, no noise, fixed scenario.
    let mut details = Vec::new();
    let mut ok = 0;
    for seed in SEEDS {
        let m = reg.eval(Method::HDdqnPidLstm, false, seed, false);
        let secs = reg
            .get(Method::HDdqnPidLstm, false, seed)
            .elapsed
            .as_secs_f64();
        let pass = m.success_rate >= 90.0 && m.lane_invasion_rate == 0.0 && secs <= 1800.0;
        ok += usize::from(pass);
        details.push(format!(
            "seed {seed}: success {:.1}%, invasion {:.1}%, trained in {secs:.0}s",
            m.success_rate, m.lane_invasion_rate
        ));
    }
    report.line(
        "end-to-end headline",
        ok == 3,
        format!("{ok}/3 seeds; {}", details.join("; ")),
    );

    // Noise robustness on the shared randomised seed list.
    let mut details = Vec::new();
    let mut ok = 0;
    for seed in SEEDS {
        let lstm = reg
            .eval(Method::HDdqnPidLstm, true, seed, true)
            .success_rate;
        let slot = reg
            .eval(Method::SlotBasedPid, true, seed, true)
            .success_rate;
        let dense = reg.eval(Method::HDdqnPid, true, seed, true).success_rate;
        ok += usize::from(lstm > slot && lstm >= dense);
        details.push(format!(
            "seed {seed}: LSTM {lstm:.1}% vs slot {slot:.1}% vs no-LSTM {dense:.1}%"
        ));
    }
    report.line(
        "noise-robustness ordering",
        ok >= 2,
        format!("{ok}/3 seeds; {}", details.join("; ")),
    );

    // Hierarchy against the flat network: reward and greedy convergence.
    let mut details = Vec::new();
    let mut ok = 0;
    for seed in SEEDS {
        let h = reg
            .eval(Method::HDdqnPid, false, seed, true)
            .total_average_reward;
        let f = reg
            .eval(Method::DdqnPid, false, seed, true)
            .total_average_reward;
        let conv = |reg: &mut Registry, m: Method| {
            probe_convergence(
                &reg.get(m, false, seed).run.report.as_ref().unwrap().probes,
                0.8,
                3,
            )
        };
        let (hc, fc) = (
            conv(&mut reg, Method::HDdqnPid),
            conv(&mut reg, Method::DdqnPid),
        );
        let faster =
            matches!((hc, fc), (Some(a), Some(b)) if a < b) || matches!((hc, fc), (Some(_), None));
        ok += usize::from(h > f && faster);
        details.push(format!(
            "seed {seed}: reward {h:.1} vs {f:.1}, 80% of final at {hc:?} vs {fc:?} episodes"
        ));
    }
    report.line(
        "hierarchy-vs-flat ordering",
        ok >= 2,
        format!("{ok}/3 seeds; {}", details.join("; ")),
    );

    // Smoothness: PID against direct control on the same scenarios.
    let mut details = Vec::new();
    let mut ok = 0;
    for seed in SEEDS {
        let pid = reg.eval(Method::HDdqnPid, false, seed, true);
        let direct = reg.eval(Method::HDdqnNoPid, false, seed, true);
        let pid_invasions: f64 = [
            (Method::DdqnPid, false),
            (Method::SlotBasedPid, false),
            (Method::SlotBasedPid, true),
            (Method::HDdqnPid, false),
            (Method::HDdqnPid, true),
            (Method::HDdqnPidLstm, false),
            (Method::HDdqnPidLstm, true),
        ]
        .into_iter()
        .map(|(m, noise)| reg.eval(m, noise, seed, true).lane_invasion_rate)
        .fold(0.0, f64::max);
        ok += usize::from(
            pid.jerk_rms < direct.jerk_rms
                && direct.lane_invasion_rate > 0.0
                && pid_invasions == 0.0,
        );
        details.push(format!(
            "seed {seed}: jerk {:.2} vs {:.2}, invasion direct {:.1}% vs PID max {pid_invasions:.1}%",
            pid.jerk_rms, direct.jerk_rms, direct.lane_invasion_rate
        ));
    }
    report.line(
        "smoothness ordering",
        ok == 3,
        format!("{ok}/3 seeds; {}", details.join("; ")),
    );

    let mut differing = Vec::new();
    for method in [Method::HDdqnPidLstm, Method::SlotBasedPid] {
        let mut cfg = config(method, method == Method::SlotBasedPid, 5);
        cfg.train.episodes = 160;
        cfg.eval_episodes = 20;
        differing.extend(
            files_identical(&cfg)
                .into_iter()
                .map(|f| format!("{method}/{f}")),
        );
    }
    report.line(
        "determinism",
        differing.is_empty(),
        if differing.is_empty() {
            "two runs byte-identical for every CSV and checkpoint".into()
        } else {
            format!("differs: {differing:?}")
        },
    );

    println!(
        "acceptance: {}/{} criteria passed in {:.0}s",
        report.passed,
        report.total,
        started.elapsed().as_secs_f64()
    );
}
