use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agent::{EnvConfig, NetworkConfig, RuleConfig, TrainConfig};
use crate::baselines::{DirectControlConfig, Method, MethodSpec};
use crate::{Error, Result};

/// One experiment: which method, under which noise, in which environment,
/// trained and evaluated how. Read from TOML; every section and key is
/// optional and falls back to the defaults.
///
/// ```toml
/// method = "hddqn-pid-lstm"
/// noise = true
/// master_seed = 3
/// eval_episodes = 200
///
/// [train]
/// episodes = 2000
///
/// [env.noise]
/// speed = 0.5
/// distance = 1.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub method: String,
    /// Perturb observations with `env.noise` during training and evaluation.
    pub noise: bool,
    pub master_seed: u64,
    pub eval_episodes: usize,
    /// Evaluate on randomised scenarios; otherwise every evaluation episode
    /// uses the fixed scenario and differs only in its noise stream.
    pub eval_randomize: bool,
    pub env: EnvConfig,
    pub train: TrainConfig,
    pub network: NetworkConfig,
    pub rules: RuleConfig,
    pub direct: DirectControlConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            method: Method::HDdqnPidLstm.cli_name().to_string(),
            noise: false,
            master_seed: 0,
            eval_episodes: 200,
            eval_randomize: true,
            env: EnvConfig::default(),
            train: TrainConfig::default(),
            network: NetworkConfig::default(),
            rules: RuleConfig::default(),
            direct: DirectControlConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn for_spec(spec: MethodSpec) -> Self {
        ExperimentConfig {
            method: spec.method().cli_name().to_string(),
            noise: spec.noise(),
            ..Default::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn method(&self) -> Result<Method> {
        Method::parse(&self.method)
    }

    pub fn spec(&self) -> Result<MethodSpec> {
        MethodSpec::new(self.method()?, self.noise)
    }

    /// The evaluation network settings for this method: the encoder kind is
    /// implied by the method and overrides `network.encoder`.
    pub fn network_for_method(&self) -> Result<NetworkConfig> {
        let mut net = self.network.clone();
        if let Some(encoder) = self.method()?.encoder() {
            net.encoder = encoder;
        }
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        if self.eval_episodes == 0 {
            return Err(Error::Config("eval_episodes must be at least 1".into()));
        }
        self.env.validate()?;
        self.train.validate()
    }

    /// Serialization with a fixed key order; equal configs give equal text.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("experiment config always serializes")
    }

    /// Hex SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Seeds of the evaluation episodes: `master_seed + k`.
    pub fn eval_seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.eval_episodes as u64).map(|k| self.master_seed.wrapping_add(k))
    }
}
