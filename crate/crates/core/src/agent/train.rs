use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::episode::{run_episode, Actuation, EnvConfig, EpisodeSpec, Outcome};
use super::learner::Learner;
use super::replay::{ReplayBuffer, Transition};
use super::rules::{warm_start_policy, RuleConfig};
use super::select::EpsilonSchedule;
use super::targets::OptionBootstrap;
use crate::world::{HistoryVector, Observation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Total episodes, warm start included.
    pub episodes: usize,
    /// Leading rule-driven episodes that only fill the replay buffer.
    pub warm_start_episodes: usize,
    pub gamma: f64,
    pub batch_size: usize,
    pub updates_per_episode: usize,
    /// Extra updates run once, right after the warm start.
    pub pretrain_updates: usize,
    pub target_sync_episodes: usize,
    pub buffer_capacity: usize,
    pub epsilon: EpsilonSchedule,
    /// Rewards are multiplied by this before entering the targets.
    pub reward_scale: f64,
    /// Train on randomised scenarios.
    pub randomize: bool,
    pub option_bootstrap: OptionBootstrap,
    /// Run a greedy probe every this many learned-policy episodes (0 = never).
    pub probe_every: usize,
    /// Scenarios per greedy probe.
    pub probe_episodes: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            episodes: 2000,
            warm_start_episodes: 100,
            gamma: 0.99,
            batch_size: 32,
            updates_per_episode: 16,
            pretrain_updates: 0,
            target_sync_episodes: 20,
            buffer_capacity: 50_000,
            epsilon: EpsilonSchedule::default(),
            reward_scale: 0.01,
            randomize: true,
            option_bootstrap: OptionBootstrap::DoubleQ,
            probe_every: 100,
            probe_episodes: 20,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.warm_start_episodes > self.episodes {
            return bad("warm_start_episodes exceeds episodes");
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1)");
        }
        if self.probe_every > 0 && self.probe_episodes == 0 {
            return bad("probe_episodes must be positive when probing");
        }
        if self.batch_size == 0 || self.target_sync_episodes == 0 || self.buffer_capacity == 0 {
            return bad("batch_size, target_sync_episodes and buffer_capacity must be positive");
        }
        if !(self.reward_scale > 0.0 && self.reward_scale.is_finite()) {
            return bad("reward_scale must be positive");
        }
        self.epsilon.validate()
    }
}

/// One learning-curve row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub episode: usize,
    pub option_reward: f64,
    pub planner_reward: f64,
    pub outcome: Outcome,
    pub epsilon: f64,
    pub loss_o: f64,
    pub loss_p: f64,
}

/// Greedy performance of the learner partway through training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    /// Learned-policy episodes completed when the probe ran.
    pub episode: usize,
    pub mean_reward: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub curve: Vec<CurveRow>,
    pub probes: Vec<ProbeRow>,
    pub updates: usize,
    /// Transitions stored by the warm start.
    pub warm_start_transitions: usize,
    pub buffer_len: usize,
}

/// SplitMix64 finaliser, used to derive independent seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const TRAIN_EPISODES: u64 = 0x7472_6169_6e5f_6570;
const TRAIN_RNG: u64 = 0x7472_6169_6e5f_726e;
const PROBE_EPISODES: u64 = 0x7072_6f62_655f_6570;

/// Scenario seed for training episode `k`; disjoint in practice from the
/// evaluation seeds `master + i`.
pub fn train_episode_seed(master: u64, k: usize) -> u64 {
    mix_seed(mix_seed(master, TRAIN_EPISODES), k as u64)
}

/// Scenario seed for the `k`th scenario of every greedy probe.
pub fn probe_episode_seed(master: u64, k: usize) -> u64 {
    mix_seed(mix_seed(master, PROBE_EPISODES), k as u64)
}

/// Greedy rollouts of the learner on the probe scenarios. Uses its own
/// generator so probing leaves the training stream untouched.
fn probe<L: Learner>(
    learner: &L,
    env: &EnvConfig,
    cfg: &TrainConfig,
    actuation: &Actuation,
    noisy: bool,
    master_seed: u64,
    episode: usize,
) -> Result<ProbeRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut reward, mut successes) = (0.0, 0);
    for k in 0..cfg.probe_episodes {
        let spec = EpisodeSpec {
            seed: probe_episode_seed(master_seed, k),
            randomize: cfg.randomize,
            noisy,
            record_trace: false,
            episode_id: k as u64,
        };
        let rng = &mut rng;
        let mut policy = |h: &HistoryVector, _: &Observation| learner.act(h, 0.0, rng);
        let result = run_episode(env, &spec, &mut policy, actuation)?.result;
        reward += result.option_reward_total + result.planner_reward_total;
        successes += usize::from(result.outcome == Outcome::Success);
    }
    let n = cfg.probe_episodes as f64;
    Ok(ProbeRow {
        episode,
        mean_reward: reward / n,
        success_rate: successes as f64 / n,
    })
}

/// Run the full training loop: warm-start episodes driven by the rules,
/// then epsilon-greedy episodes from the learner, each followed by
/// `updates_per_episode` minibatch updates; targets are synced every
/// `target_sync_episodes` episodes.
pub fn train<L: Learner>(
    learner: &mut L,
    env: &EnvConfig,
    cfg: &TrainConfig,
    rules: &RuleConfig,
    actuation: &Actuation,
    noisy: bool,
    master_seed: u64,
) -> Result<TrainReport> {
    env.validate()?;
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(master_seed, TRAIN_RNG));
    let mut buffer: ReplayBuffer<Transition> = ReplayBuffer::new(cfg.buffer_capacity);
    let mut curve = Vec::with_capacity(cfg.episodes);
    let mut probes = Vec::new();
    let mut updates = 0;
    let mut warm_start_transitions = 0;

    for ep in 0..cfg.episodes {
        let spec = EpisodeSpec {
            seed: train_episode_seed(master_seed, ep),
            randomize: cfg.randomize,
            noisy,
            record_trace: false,
            episode_id: ep as u64,
        };
        let warm = ep < cfg.warm_start_episodes;
        let epsilon = if warm {
            cfg.epsilon.start
        } else {
            cfg.epsilon.value(ep - cfg.warm_start_episodes)
        };
        let episode = if warm {
            let mut policy =
                |_: &HistoryVector, truth: &Observation| Ok(warm_start_policy(truth, rules));
            run_episode(env, &spec, &mut policy, actuation)?
        } else {
            let agent = &*learner;
            let rng = &mut rng;
            let mut policy = |h: &HistoryVector, _: &Observation| agent.act(h, epsilon, rng);
            run_episode(env, &spec, &mut policy, actuation)?
        };
        if warm {
            warm_start_transitions += episode.transitions.len();
        }
        buffer.push_episode(episode.transitions);

        let mut n_updates = if warm { 0 } else { cfg.updates_per_episode };
        if ep + 1 == cfg.warm_start_episodes {
            n_updates += cfg.pretrain_updates;
        }
        let (mut loss_o, mut loss_p) = (0.0, 0.0);
        if buffer.len() >= cfg.batch_size && n_updates > 0 {
            for _ in 0..n_updates {
                let (lo, lp) = learner.learn(&buffer, cfg, &mut rng)?;
                loss_o += lo / n_updates as f64;
                loss_p += lp / n_updates as f64;
            }
            updates += n_updates;
        }
        if (ep + 1) % cfg.target_sync_episodes == 0 {
            learner.sync_targets();
        }
        curve.push(CurveRow {
            episode: ep,
            option_reward: episode.result.option_reward_total,
            planner_reward: episode.result.planner_reward_total,
            outcome: episode.result.outcome,
            epsilon,
            loss_o,
            loss_p,
        });
        let learned = (ep + 1).saturating_sub(cfg.warm_start_episodes);
        if cfg.probe_every > 0 && learned > 0 && learned % cfg.probe_every == 0 {
            probes.push(probe(
                learner,
                env,
                cfg,
                actuation,
                noisy,
                master_seed,
                learned,
            )?);
        }
    }
    Ok(TrainReport {
        curve,
        probes,
        updates,
        warm_start_transitions,
        buffer_len: buffer.len(),
    })
}
