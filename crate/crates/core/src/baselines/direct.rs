use serde::{Deserialize, Serialize};

use crate::{OptionId, PlannerChoice};

/// Fixed `(throttle, steer)` primitives for the hierarchical agent without
/// waypoint tracking. Follow choices hold one primitive for the whole
/// burst; lane-change choices steer towards the other lane for the first
/// half of the burst and back for the second, with a larger steer for the
/// sharper profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectControlConfig {
    /// long / short / wait.
    pub follow: [[f64; 2]; 3],
    pub change_throttle: f64,
    /// fast / normal / sharp steer magnitudes.
    pub change_steer: [f64; 3],
    pub burst_ticks: u32,
}

impl Default for DirectControlConfig {
    fn default() -> Self {
        DirectControlConfig {
            follow: [[0.7, 0.0], [0.4, 0.0], [-0.5, 0.0]],
            change_throttle: 0.6,
            change_steer: [0.15, 0.25, 0.35],
            burst_ticks: 30,
        }
    }
}

impl DirectControlConfig {
    /// Controls for tick `k` of a burst started in lane `lane`.
    pub fn primitive(
        &self,
        option: OptionId,
        choice: PlannerChoice,
        k: u32,
        lane: u8,
    ) -> (f64, f64) {
        match option {
            OptionId::LaneFollowWait => {
                let [t, s] = self.follow[choice.index()];
                (t, s)
            }
            OptionId::LaneChange => {
                let toward = if lane == 0 { 1.0 } else { -1.0 };
                let phase = if 2 * k < self.burst_ticks { 1.0 } else { -1.0 };
                (
                    self.change_throttle,
                    toward * phase * self.change_steer[choice.index()],
                )
            }
        }
    }
}
