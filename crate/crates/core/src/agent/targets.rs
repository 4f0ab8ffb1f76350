use serde::{Deserialize, Serialize};

use super::select::argmax;
use crate::{Error, Result};

/// Double-Q target: the online network picks the next action, the target
/// network values it. `r` alone when `terminal`.
pub fn ddqn_target(
    r: f64,
    terminal: bool,
    q_online_next: &[f64],
    q_target_next: &[f64],
    gamma: f64,
) -> Result<f64> {
    if q_online_next.is_empty() || q_target_next.is_empty() {
        return Err(Error::EmptyValues);
    }
    if q_online_next.len() != q_target_next.len() {
        return Err(Error::Config(format!(
            "value arrays differ in length: {} vs {}",
            q_online_next.len(),
            q_target_next.len()
        )));
    }
    if terminal {
        return Ok(r);
    }
    let a = argmax(q_online_next)?;
    Ok(r + gamma * q_target_next[a])
}

/// Vanilla Q-learning target `r + gamma * max(q_next)`.
pub fn max_target(r: f64, terminal: bool, q_next: &[f64], gamma: f64) -> Result<f64> {
    let a = argmax(q_next)?;
    Ok(if terminal { r } else { r + gamma * q_next[a] })
}

/// How the options network bootstraps from the next history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptionBootstrap {
    DoubleQ,
    Max,
}

/// Options-network target: the summed per-tick rewards of one macro step
/// plus the discounted bootstrap at the post-step history.
pub fn option_target(
    rewards: &[f64],
    terminal: bool,
    q_online_next: &[f64],
    q_target_next: &[f64],
    gamma: f64,
    bootstrap: OptionBootstrap,
) -> Result<f64> {
    if rewards.is_empty() {
        return Err(Error::EmptyValues);
    }
    let r: f64 = rewards.iter().sum();
    match bootstrap {
        OptionBootstrap::DoubleQ => ddqn_target(r, terminal, q_online_next, q_target_next, gamma),
        OptionBootstrap::Max => max_target(r, terminal, q_target_next, gamma),
    }
}

/// Planner target under a fixed option: `r_p` when the episode ends or the
/// next decision switches option, otherwise the double-Q bootstrap over the
/// planner choices for the same option.
pub fn planner_target(
    r_p: f64,
    ends_goal: bool,
    q_online_next: &[f64],
    q_target_next: &[f64],
    gamma: f64,
) -> Result<f64> {
    ddqn_target(r_p, ends_goal, q_online_next, q_target_next, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_evaluated_double_q() {
        let y = ddqn_target(1.0, false, &[1.0, 2.0], &[0.5, 0.3], 0.9).unwrap();
        assert!((y - 1.27).abs() < 1e-12);
        assert_eq!(
            ddqn_target(1.0, true, &[1.0, 2.0], &[0.5, 0.3], 0.9).unwrap(),
            1.0
        );
    }

    #[test]
    fn equal_networks_reduce_to_max() {
        let q = [0.3, -1.0, 2.5];
        assert_eq!(
            ddqn_target(0.5, false, &q, &q, 0.9).unwrap(),
            max_target(0.5, false, &q, 0.9).unwrap()
        );
    }

    #[test]
    fn option_target_cases() {
        let y = option_target(
            &[-0.1, -0.1, 100.0],
            true,
            &[0.0, 0.0],
            &[0.0, 0.0],
            0.99,
            OptionBootstrap::DoubleQ,
        );
        assert!((y.unwrap() - 99.8).abs() < 1e-12);
        let y = option_target(
            &[0.0, 0.0],
            false,
            &[1.0, 0.0],
            &[4.0, 7.0],
            0.5,
            OptionBootstrap::DoubleQ,
        )
        .unwrap();
        assert_eq!(y, 2.0);
        let y = option_target(
            &[0.0],
            false,
            &[1.0, 0.0],
            &[4.0, 7.0],
            0.5,
            OptionBootstrap::Max,
        )
        .unwrap();
        assert_eq!(y, 3.5);
        let one = option_target(
            &[0.25],
            false,
            &[1.0, 3.0],
            &[2.0, -1.0],
            0.9,
            OptionBootstrap::DoubleQ,
        )
        .unwrap();
        assert_eq!(
            one,
            ddqn_target(0.25, false, &[1.0, 3.0], &[2.0, -1.0], 0.9).unwrap()
        );
        assert!(matches!(
            option_target(&[], true, &[0.0], &[0.0], 0.9, OptionBootstrap::DoubleQ),
            Err(Error::EmptyValues)
        ));
    }

    #[test]
    fn planner_target_cases() {
        assert_eq!(
            planner_target(1.0, true, &[5.0, 0.0, 0.0], &[2.0, 1.0, 0.0], 0.5).unwrap(),
            1.0
        );
        assert_eq!(
            planner_target(1.0, false, &[5.0, 0.0, 0.0], &[2.0, 1.0, 0.0], 0.5).unwrap(),
            2.0
        );
        assert_eq!(
            planner_target(1.0, false, &[5.0, 0.0, 0.0], &[2.0, 1.0, 0.0], 0.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn empty_and_mismatched_arrays() {
        assert!(ddqn_target(0.0, false, &[], &[], 0.9).is_err());
        assert!(ddqn_target(0.0, false, &[1.0], &[1.0, 2.0], 0.9).is_err());
    }
}
