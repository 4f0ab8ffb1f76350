use serde::{Deserialize, Serialize};

use crate::world::{HistoryVector, Observation, OBS_DIM};
use crate::OptionId;

/// Per-step width of the planner input: observation plus option one-hot.
pub const PLANNER_DIM: usize = OBS_DIM + OptionId::COUNT;

/// Scales applied to observations before they reach a network. Scaled
/// values are capped so the far sentinel does not dominate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Normalization {
    pub speed: f64,
    pub distance: f64,
    pub ratio: f64,
    pub cap: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization {
            speed: 20.0,
            distance: 100.0,
            ratio: 5.0,
            cap: 2.0,
        }
    }
}

impl Normalization {
    pub fn apply(&self, obs: &Observation) -> [f64; OBS_DIM] {
        let mut a = obs.to_array();
        let c = |v: f64| v.min(self.cap);
        a[0] = c(a[0] / self.speed);
        for k in 0..3 {
            let base = 2 + 4 * k;
            a[base] = c(a[base] / self.speed);
            a[base + 1] = c(a[base + 1] / self.distance);
            a[base + 2] = c(a[base + 2] / self.ratio);
        }
        a
    }

    /// Single-frame input.
    pub fn frame(&self, obs: &Observation) -> Vec<f64> {
        self.apply(obs).to_vec()
    }

    /// Options-network input: the history, oldest first, `3 x 14`.
    pub fn history(&self, h: &HistoryVector) -> Vec<f64> {
        h.steps().iter().flat_map(|o| self.apply(o)).collect()
    }

    /// Planner input: every history step followed by the option one-hot,
    /// `3 x 16`.
    pub fn planner(&self, h: &HistoryVector, option: OptionId) -> Vec<f64> {
        let hot = option.one_hot();
        let mut out = Vec::with_capacity(h.steps().len() * PLANNER_DIM);
        for o in h.steps() {
            out.extend(self.apply(o));
            out.extend(hot);
        }
        out
    }
}
