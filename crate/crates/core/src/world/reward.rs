use serde::{Deserialize, Serialize};

use super::{Events, World};
use crate::{OptionId, PlannerChoice};

/// Reward magnitudes (all non-negative; signs are applied where used) plus
/// the thresholds that decide when a choice was unnecessary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardWeights {
    /// Per-tick time penalty.
    pub sigma1: f64,
    /// Progress reward per metre driven along the road.
    pub sigma2: f64,
    /// Collision penalty.
    pub sigma3: f64,
    /// Penalty for picking a goal or choice that was not needed.
    pub sigma4: f64,
    /// Penalty for a lane-change profile that does not match the ego speed.
    pub sigma5: f64,
    /// Success reward.
    pub sigma6: f64,
    /// Lane counts as clear when the nearest vehicle ahead in it is at least
    /// this many safety thresholds away.
    pub clear_ratio: f64,
    /// At or above this speed the fast lane-change profile is expected.
    pub fast_speed: f64,
    /// Below this speed the sharp lane-change profile is expected.
    pub slow_speed: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights {
            sigma1: 0.1,
            sigma2: 0.5,
            sigma3: 100.0,
            sigma4: 1.0,
            sigma5: 1.0,
            sigma6: 100.0,
            clear_ratio: 3.0,
            fast_speed: 6.0,
            slow_speed: 3.0,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            self.sigma1,
            self.sigma2,
            self.sigma3,
            self.sigma4,
            self.sigma5,
            self.sigma6,
        ];
        if all.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(crate::Error::Config(
                "reward weights must be finite and non-negative".into(),
            ));
        }
        if self.slow_speed > self.fast_speed {
            return Err(crate::Error::Config(
                "slow_speed must not exceed fast_speed".into(),
            ));
        }
        Ok(())
    }

    /// Lane-change profile that suits the current speed.
    pub fn expected_change_profile(&self, speed: f64) -> PlannerChoice {
        if speed >= self.fast_speed {
            PlannerChoice::Choice0
        } else if speed >= self.slow_speed {
            PlannerChoice::Choice1
        } else {
            PlannerChoice::Choice2
        }
    }
}

/// Magnitude of the unsafe-distance penalty, `exp(-ratio)`; lies in (0, 1]
/// and strictly decreases with the distance ratio.
pub fn unsafe_penalty(ratio: f64) -> f64 {
    (-ratio.max(0.0)).exp()
}

/// What the ego car was doing during this tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardContext {
    pub option: OptionId,
    pub choice: PlannerChoice,
    /// First tick after a decision; the one-off choice penalties land here.
    pub decision_tick: bool,
}

/// Option and planner rewards for one tick from `prev` to `next`.
///
/// Both streams get the time penalty, the progress reward, the unsafe
/// penalty for the nearest vehicle ahead in the ego lane and the terminal
/// collision/success terms. On a decision tick, the level that picked an
/// unnecessary goal or choice is charged `sigma4`, and the planner is
/// charged `sigma5` for a lane-change profile that does not fit the speed
/// at decision time.
pub fn compute_rewards(
    prev: &World,
    next: &World,
    ctx: &RewardContext,
    events: &Events,
    w: &RewardWeights,
) -> (f64, f64) {
    let progress = next.ego.position.x - prev.ego.position.x;
    let danger = next
        .front_vehicle()
        .map_or(0.0, |(d, threshold, _)| unsafe_penalty(d / threshold));
    let mut shared = -w.sigma1 + w.sigma2 * progress - danger;
    if events.collision {
        shared -= w.sigma3;
    }
    if events.success {
        shared += w.sigma6;
    }
    let (mut r_option, mut r_planner) = (shared, shared);
    if ctx.decision_tick {
        let (po, pp) = decision_penalties(prev, ctx.option, ctx.choice, w);
        r_option -= po;
        r_planner -= pp;
    }
    (r_option, r_planner)
}

/// One-off `(option, planner)` penalties for a decision taken in `world`.
pub fn decision_penalties(
    world: &World,
    option: OptionId,
    choice: PlannerChoice,
    w: &RewardWeights,
) -> (f64, f64) {
    let clear = world
        .front_vehicle()
        .is_none_or(|(d, threshold, _)| d / threshold >= w.clear_ratio);
    match option {
        OptionId::LaneChange => {
            // Leaving the target lane again, or swerving with nothing ahead.
            let needless = world.ego.lane_id == 1 || clear;
            let option_pen = if needless { w.sigma4 } else { 0.0 };
            let expected = w.expected_change_profile(world.ego.speed);
            let planner_pen = if choice != expected { w.sigma5 } else { 0.0 };
            (option_pen, planner_pen)
        }
        OptionId::LaneFollowWait => {
            let holding_back = choice != PlannerChoice::Choice0;
            (0.0, if holding_back && clear { w.sigma4 } else { 0.0 })
        }
    }
}
