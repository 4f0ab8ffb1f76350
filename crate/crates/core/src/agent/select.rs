use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Index of the largest value; ties go to the lowest index. NaN never wins
/// against a number.
pub fn argmax(values: &[f64]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if v > values[b] || (values[b].is_nan() && !v.is_nan()) => best = Some(i),
            _ => {}
        }
    }
    best.ok_or(Error::EmptyValues)
}

/// With probability `epsilon` a uniform index, otherwise [`argmax`].
///
/// Always consumes one uniform draw for the coin and one for the action so
/// the random stream does not depend on `epsilon` or the Q-values.
pub fn epsilon_greedy<R: Rng + ?Sized>(values: &[f64], epsilon: f64, rng: &mut R) -> Result<usize> {
    let greedy = argmax(values)?;
    let coin: f64 = rng.random();
    let random = rng.random_range(0..values.len());
    Ok(if coin < epsilon { random } else { greedy })
}

/// Linear decay from `start` to `end` over the first `decay_episodes`
/// learned-policy episodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_episodes: usize,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            start: 1.0,
            end: 0.05,
            decay_episodes: 1500,
        }
    }
}

impl EpsilonSchedule {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(unit(self.start) && unit(self.end) && self.end <= self.start) {
            return Err(Error::Config("epsilon needs 0 <= end <= start <= 1".into()));
        }
        Ok(())
    }

    /// Epsilon for the `k`-th learned-policy episode (0-based).
    pub fn value(&self, k: usize) -> f64 {
        if self.decay_episodes == 0 || k >= self.decay_episodes {
            return self.end;
        }
        let frac = k as f64 / self.decay_episodes as f64;
        self.start + (self.end - self.start) * frac
    }
}
