//! Comparison methods: flat DDQN, the hierarchical agent with direct
//! control primitives, slot-based rules and the agent without recurrence.
//!
//! The flat learner lives in [`crate::agent::FlatAgent`] and the slot rules
//! in [`crate::agent::slot_based_policy`]; this module adds the primitive
//! table and the method registry.

mod direct;
mod method;

pub use direct::DirectControlConfig;
pub use method::{Method, MethodSpec};
