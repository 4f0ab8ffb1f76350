use hrl_neural::{Architecture, NetworkParams};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encode::{Normalization, PLANNER_DIM};
use super::qnet::{QNetwork, Sample};
use super::replay::{ReplayBuffer, Transition};
use super::select::epsilon_greedy;
use super::targets::{ddqn_target, option_target, planner_target, OptionBootstrap};
use super::train::TrainConfig;
use crate::world::{HistoryVector, HISTORY_LEN, OBS_DIM};
use crate::{Error, OptionId, PlannerChoice, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Lstm,
    Dense,
}

/// Network shapes and optimiser settings shared by all learned methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub encoder: EncoderKind,
    /// LSTM units, or width of the dense encoder.
    pub units: usize,
    pub hidden: Vec<usize>,
    pub lr: f64,
    pub momentum: f64,
    /// Global gradient-norm clip per update; 0 disables clipping.
    pub grad_clip: f64,
    pub normalization: Normalization,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            encoder: EncoderKind::Lstm,
            units: 32,
            hidden: vec![64],
            lr: 1e-3,
            momentum: 0.9,
            grad_clip: 10.0,
            normalization: Normalization::default(),
        }
    }
}

impl NetworkConfig {
    pub fn architecture(
        &self,
        input_dim: usize,
        seq_len: usize,
        output_dim: usize,
    ) -> Architecture {
        match self.encoder {
            EncoderKind::Lstm => {
                Architecture::lstm(input_dim, seq_len, self.units, &self.hidden, output_dim)
            }
            EncoderKind::Dense => {
                Architecture::dense(input_dim, seq_len, self.units, &self.hidden, output_dim)
            }
        }
    }

    fn network(&self, arch: &Architecture, seed: u64) -> Result<QNetwork> {
        QNetwork::new(arch, seed, self.lr, self.momentum, self.grad_clip)
    }

    fn wrap(&self, params: NetworkParams, expected: &Architecture) -> Result<QNetwork> {
        if params.architecture() != expected {
            return Err(Error::Checkpoint(format!(
                "network architecture {:?} does not match configured {:?}",
                params.architecture(),
                expected
            )));
        }
        Ok(QNetwork::from_params(
            params,
            self.lr,
            self.momentum,
            self.grad_clip,
        ))
    }
}

/// A trainable decision maker over `(option, choice)` pairs.
pub trait Learner {
    fn act(
        &self,
        h: &HistoryVector,
        epsilon: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(OptionId, PlannerChoice)>;

    /// One minibatch update; returns the `(option, planner)` losses (the
    /// flat learner reports its single loss in both).
    fn learn(
        &mut self,
        buffer: &ReplayBuffer<Transition>,
        cfg: &TrainConfig,
        rng: &mut ChaCha8Rng,
    ) -> Result<(f64, f64)>;

    fn sync_targets(&mut self);

    fn networks(&self) -> Vec<&NetworkParams>;
}

/// Options network over the observation history and planner network over
/// the history with the option one-hot appended to every step.
#[derive(Debug, Clone)]
pub struct HierarchicalAgent {
    pub options: QNetwork,
    pub planner: QNetwork,
    pub norm: Normalization,
}

impl HierarchicalAgent {
    pub fn architectures(net: &NetworkConfig) -> (Architecture, Architecture) {
        (
            net.architecture(OBS_DIM, HISTORY_LEN, OptionId::COUNT),
            net.architecture(PLANNER_DIM, HISTORY_LEN, PlannerChoice::COUNT),
        )
    }

    pub fn new(net: &NetworkConfig, seed: u64) -> Result<Self> {
        let (ao, ap) = Self::architectures(net);
        Ok(HierarchicalAgent {
            options: net.network(&ao, seed)?,
            planner: net.network(&ap, seed.wrapping_add(1))?,
            norm: net.normalization,
        })
    }

    pub fn from_params(
        net: &NetworkConfig,
        options: NetworkParams,
        planner: NetworkParams,
    ) -> Result<Self> {
        let (ao, ap) = Self::architectures(net);
        Ok(HierarchicalAgent {
            options: net.wrap(options, &ao)?,
            planner: net.wrap(planner, &ap)?,
            norm: net.normalization,
        })
    }

    pub fn option_values(&self, h: &HistoryVector) -> Result<Vec<f64>> {
        self.options.q(&self.norm.history(h))
    }

    pub fn planner_values(&self, h: &HistoryVector, option: OptionId) -> Result<Vec<f64>> {
        self.planner.q(&self.norm.planner(h, option))
    }
}

/// The window's history and the history after its last transition.
fn window_histories(steps: &[&Transition]) -> (HistoryVector, HistoryVector) {
    let [a, b, c] = [steps[0], steps[1], steps[2]];
    (
        HistoryVector::from_steps([a.s, b.s, c.s]),
        HistoryVector::from_steps([b.s, c.s, c.s_next]),
    )
}

impl Learner for HierarchicalAgent {
    fn act(
        &self,
        h: &HistoryVector,
        epsilon: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(OptionId, PlannerChoice)> {
        let o = epsilon_greedy(&self.option_values(h)?, epsilon, rng)?;
        let option = OptionId::from_index(o).expect("two options");
        let p = epsilon_greedy(&self.planner_values(h, option)?, epsilon, rng)?;
        Ok((option, PlannerChoice::from_index(p).expect("three choices")))
    }

    fn learn(
        &mut self,
        buffer: &ReplayBuffer<Transition>,
        cfg: &TrainConfig,
        rng: &mut ChaCha8Rng,
    ) -> Result<(f64, f64)> {
        let windows = buffer.sample_sequences(cfg.batch_size, HISTORY_LEN, rng)?;
        let mut batch_o = Vec::with_capacity(windows.len());
        let mut batch_p = Vec::with_capacity(windows.len());
        for w in &windows {
            let t = w.last();
            let (h, h_next) = window_histories(&w.steps);
            let x_next = self.norm.history(&h_next);
            let y_o = option_target(
                &[t.r_option * cfg.reward_scale],
                t.terminal,
                &self.options.q(&x_next)?,
                &self.options.q_target(&x_next)?,
                cfg.gamma,
                cfg.option_bootstrap,
            )?;
            batch_o.push(Sample {
                input: self.norm.history(&h),
                action: t.option.index(),
                target: y_o,
            });

            let xp_next = self.norm.planner(&h_next, t.option);
            let y_p = planner_target(
                t.r_planner * cfg.reward_scale,
                t.terminal || !t.option_continues,
                &self.planner.q(&xp_next)?,
                &self.planner.q_target(&xp_next)?,
                cfg.gamma,
            )?;
            batch_p.push(Sample {
                input: self.norm.planner(&h, t.option),
                action: t.choice.index(),
                target: y_p,
            });
        }
        Ok((self.options.train(&batch_o)?, self.planner.train(&batch_p)?))
    }

    fn sync_targets(&mut self) {
        self.options.sync_target();
        self.planner.sync_target();
    }

    fn networks(&self) -> Vec<&NetworkParams> {
        vec![self.options.online(), self.planner.online()]
    }
}

pub const FLAT_ACTIONS: usize = OptionId::COUNT * PlannerChoice::COUNT;

/// Flat action index `k` to `(option k div 3, choice k mod 3)`.
pub fn flat_action(k: usize) -> Option<(OptionId, PlannerChoice)> {
    Some((
        OptionId::from_index(k / PlannerChoice::COUNT)?,
        PlannerChoice::from_index(k % PlannerChoice::COUNT)?,
    ))
}

pub fn flat_index(option: OptionId, choice: PlannerChoice) -> usize {
    option.index() * PlannerChoice::COUNT + choice.index()
}

/// One network over the latest observation with all six option/choice
/// pairs as actions, trained on the summed option and planner rewards.
#[derive(Debug, Clone)]
pub struct FlatAgent {
    pub net: QNetwork,
    pub norm: Normalization,
}

impl FlatAgent {
    pub fn architecture(net: &NetworkConfig) -> Architecture {
        Architecture::dense(OBS_DIM, 1, net.units, &net.hidden, FLAT_ACTIONS)
    }

    pub fn new(net: &NetworkConfig, seed: u64) -> Result<Self> {
        Ok(FlatAgent {
            net: net.network(&Self::architecture(net), seed)?,
            norm: net.normalization,
        })
    }

    pub fn from_params(net: &NetworkConfig, params: NetworkParams) -> Result<Self> {
        Ok(FlatAgent {
            net: net.wrap(params, &Self::architecture(net))?,
            norm: net.normalization,
        })
    }

    pub fn values(&self, h: &HistoryVector) -> Result<Vec<f64>> {
        self.net.q(&self.norm.frame(h.latest()))
    }
}

impl Learner for FlatAgent {
    fn act(
        &self,
        h: &HistoryVector,
        epsilon: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(OptionId, PlannerChoice)> {
        let k = epsilon_greedy(&self.values(h)?, epsilon, rng)?;
        Ok(flat_action(k).expect("six actions"))
    }

    fn learn(
        &mut self,
        buffer: &ReplayBuffer<Transition>,
        cfg: &TrainConfig,
        rng: &mut ChaCha8Rng,
    ) -> Result<(f64, f64)> {
        let windows = buffer.sample_sequences(cfg.batch_size, 1, rng)?;
        let mut batch = Vec::with_capacity(windows.len());
        for w in &windows {
            let t = w.last();
            let x_next = self.norm.frame(&t.s_next);
            let r = (t.r_option + t.r_planner) * cfg.reward_scale;
            let q_on = self.net.q(&x_next)?;
            let q_tg = self.net.q_target(&x_next)?;
            let y = match cfg.option_bootstrap {
                OptionBootstrap::DoubleQ => ddqn_target(r, t.terminal, &q_on, &q_tg, cfg.gamma)?,
                OptionBootstrap::Max => {
                    super::targets::max_target(r, t.terminal, &q_tg, cfg.gamma)?
                }
            };
            batch.push(Sample {
                input: self.norm.frame(&t.s),
                action: flat_index(t.option, t.choice),
                target: y,
            });
        }
        let loss = self.net.train(&batch)?;
        Ok((loss, loss))
    }

    fn sync_targets(&mut self) {
        self.net.sync_target();
    }

    fn networks(&self) -> Vec<&NetworkParams> {
        vec![self.net.online()]
    }
}
