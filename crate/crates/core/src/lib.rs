//! Hierarchical double-DQN lane-change planner with PID waypoint tracking.
//!
//! * [`world`]: a seedable two-lane kinematic world (ego car, a parked
//!   obstacle, two moving cars), observations, rewards and events.
//! * [`control`]: PID controllers and the sub-trajectory executor that
//!   drives the ego car to a chosen waypoint.
//! * [`agent`]: options/planner Q-networks, replay, targets, the
//!   rule-based warm start and the training loop.
//! * [`baselines`]: flat DDQN, direct-control hDDQN, slot-based rules and
//!   the no-LSTM variant.
//! * [`harness`]: experiment configuration, evaluation metrics,
//!   comparison tables and trajectory export.

pub mod action;
pub mod agent;
pub mod baselines;
pub mod control;
mod error;
pub mod harness;
pub mod world;

pub use action::{OptionId, PlannerChoice};
pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
