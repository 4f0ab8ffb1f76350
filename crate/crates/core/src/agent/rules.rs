use serde::{Deserialize, Serialize};

use crate::world::{Observation, VehicleReading};
use crate::{OptionId, PlannerChoice};

/// Thresholds for the hand-written driving rules used for the warm start
/// and the slot-based baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuleConfig {
    /// Consider changing lane once the obstacle is this close.
    pub trigger_distance: f64,
    /// Follow long while the obstacle is further than this, short down to
    /// the obstacle threshold, wait below it.
    pub long_distance: f64,
    pub obstacle_threshold: f64,
    pub moving_threshold: f64,
    /// Extra gap, beyond the moving threshold, required on each target-lane
    /// car before changing lane.
    pub gap_margin: f64,
    /// Ratio bands for following in the target lane: long above `follow_long_ratio`,
    /// short above `follow_short_ratio`, wait otherwise.
    pub follow_long_ratio: f64,
    pub follow_short_ratio: f64,
    pub fast_speed: f64,
    pub slow_speed: f64,
    /// Slot test: predicted gap must exceed `slot_factor` times the moving
    /// threshold.
    pub slot_factor: f64,
    /// Horizon over which slot gaps are predicted from relative speed.
    pub slot_horizon: f64,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            trigger_distance: 30.0,
            long_distance: 30.0,
            obstacle_threshold: 16.0,
            moving_threshold: 9.0,
            gap_margin: 3.0,
            follow_long_ratio: 2.0,
            follow_short_ratio: 1.0,
            fast_speed: 6.0,
            slow_speed: 3.0,
            slot_factor: 1.25,
            slot_horizon: 2.0,
        }
    }
}

impl RuleConfig {
    pub fn change_profile(&self, speed: f64) -> PlannerChoice {
        if speed >= self.fast_speed {
            PlannerChoice::Choice0
        } else if speed >= self.slow_speed {
            PlannerChoice::Choice1
        } else {
            PlannerChoice::Choice2
        }
    }

    fn follow_by_ratio(&self, nearest: Option<&VehicleReading>) -> PlannerChoice {
        match nearest.map(|r| r.ratio) {
            Some(r) if r <= self.follow_short_ratio => PlannerChoice::Choice2,
            Some(r) if r <= self.follow_long_ratio => PlannerChoice::Choice1,
            _ => PlannerChoice::Choice0,
        }
    }

    fn follow_obstacle(&self, d_co: f64) -> PlannerChoice {
        if d_co > self.long_distance {
            PlannerChoice::Choice0
        } else if d_co > self.obstacle_threshold {
            PlannerChoice::Choice1
        } else {
            PlannerChoice::Choice2
        }
    }
}

/// Shared rule table; `gap_ok` decides whether the target lane is open.
fn rule_table(
    obs: &Observation,
    cfg: &RuleConfig,
    gap_ok: impl Fn(&VehicleReading) -> bool,
) -> (OptionId, PlannerChoice) {
    if obs.ego_lane != obs.obstacle.lane_id {
        return (
            OptionId::LaneFollowWait,
            cfg.follow_by_ratio(obs.nearest_in_lane()),
        );
    }
    let d_co = obs.obstacle.distance;
    if d_co <= cfg.trigger_distance && obs.other_lane_cars().all(gap_ok) {
        return (OptionId::LaneChange, cfg.change_profile(obs.ego_speed));
    }
    let nearest_moving = [&obs.car_a, &obs.car_b]
        .into_iter()
        .filter(|r| r.lane_id == obs.ego_lane)
        .map(|r| cfg.follow_by_ratio(Some(r)))
        .max();
    let choice = cfg
        .follow_obstacle(d_co)
        .max(nearest_moving.unwrap_or(PlannerChoice::Choice0));
    (OptionId::LaneFollowWait, choice)
}

/// Warm-start rules: change lane when the obstacle is within the trigger
/// distance and each target-lane car is at least `threshold + margin`
/// ahead; otherwise follow with a choice keyed to the obstacle distance
/// (or, in the target lane, to the front-car distance ratio).
pub fn warm_start_policy(obs: &Observation, cfg: &RuleConfig) -> (OptionId, PlannerChoice) {
    rule_table(obs, cfg, |r| {
        r.distance >= cfg.moving_threshold + cfg.gap_margin
    })
}

/// Slot-based rules: like the warm start, but a target-lane gap counts as a
/// free slot only if the gap predicted over the slot horizon from the
/// relative speed exceeds `slot_factor` times the moving threshold.
pub fn slot_based_policy(obs: &Observation, cfg: &RuleConfig) -> (OptionId, PlannerChoice) {
    rule_table(obs, cfg, |r| {
        let predicted = r.distance + (r.speed - obs.ego_speed).min(0.0) * cfg.slot_horizon;
        r.distance > 0.0 && predicted > cfg.slot_factor * cfg.moving_threshold
    })
}
