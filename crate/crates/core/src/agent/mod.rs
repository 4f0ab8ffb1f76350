//! The two-level double-DQN agent: options and planner Q-networks, episodic
//! replay, targets, exploration, the rule-based warm start and the training
//! loop.

pub mod encode;
pub mod episode;
pub mod learner;
pub mod qnet;
pub mod replay;
pub mod rules;
pub mod select;
pub mod targets;
pub mod train;

pub use encode::{Normalization, PLANNER_DIM};
pub use episode::{
    run_episode, Actuation, EnvConfig, Episode, EpisodeResult, EpisodeSpec, Outcome, Policy,
};
pub use learner::{
    flat_action, flat_index, EncoderKind, FlatAgent, HierarchicalAgent, Learner, NetworkConfig,
    FLAT_ACTIONS,
};
pub use qnet::{QNetwork, Sample};
pub use replay::{ReplayBuffer, Transition, Window};
pub use rules::{slot_based_policy, warm_start_policy, RuleConfig};
pub use select::{argmax, epsilon_greedy, EpsilonSchedule};
pub use targets::{ddqn_target, max_target, option_target, planner_target, OptionBootstrap};
pub use train::{
    mix_seed, probe_episode_seed, train, train_episode_seed, CurveRow, ProbeRow, TrainConfig,
    TrainReport,
};
