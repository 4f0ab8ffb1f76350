use serde::{Deserialize, Serialize};

use super::geometry::Vec2;
use super::World;
use crate::{OptionId, PlannerChoice};

/// Velocity profile attached to a waypoint; the controller turns it into a
/// target speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpeedProfile {
    FollowLong,
    FollowShort,
    Crawl,
    Wait,
    Fast,
    Normal,
    Sharp,
}

impl SpeedProfile {
    pub fn name(self) -> &'static str {
        match self {
            SpeedProfile::FollowLong => "follow_long",
            SpeedProfile::FollowShort => "follow_short",
            SpeedProfile::Crawl => "crawl",
            SpeedProfile::Wait => "wait",
            SpeedProfile::Fast => "fast",
            SpeedProfile::Normal => "normal",
            SpeedProfile::Sharp => "sharp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub position: Vec2,
    pub lane: u8,
    pub profile: SpeedProfile,
}

/// Longitudinal offsets of the candidate waypoints and the safety follow
/// point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MenuConfig {
    pub follow_long: f64,
    pub follow_short: f64,
    pub wait: f64,
    pub change_fast: f64,
    pub change_normal: f64,
    pub change_sharp: f64,
    /// Default distance of the safety follow point after a lane change.
    pub follow_point_distance: f64,
    /// Gap kept to the front vehicle when placing the follow point.
    pub follow_point_margin: f64,
    pub follow_point_min_offset: f64,
}

impl Default for MenuConfig {
    fn default() -> Self {
        MenuConfig {
            follow_long: 20.0,
            follow_short: 10.0,
            wait: 4.0,
            change_fast: 25.0,
            change_normal: 15.0,
            change_sharp: 8.0,
            follow_point_distance: 12.0,
            follow_point_margin: 4.0,
            follow_point_min_offset: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaypointMenu {
    pub option: OptionId,
    pub candidates: [Waypoint; 3],
}

impl WaypointMenu {
    pub fn get(&self, choice: PlannerChoice) -> Waypoint {
        self.candidates[choice.index()]
    }
}

/// The three candidates for `option`, indexed by [`PlannerChoice`].
///
/// Lane follow: long, short and wait points on the current lane midline.
/// The wait point carries a full stop when the nearest vehicle ahead in the
/// lane is inside its safety threshold, otherwise a crawl.
/// Lane change: fast, normal and sharp points on the other lane's midline,
/// far to near.
pub fn waypoint_menu(world: &World, option: OptionId, cfg: &MenuConfig) -> WaypointMenu {
    let s = world.ego.position.x;
    let geo = world.geometry();
    let lane = world.ego.lane_id;
    let point = |lane: u8, offset: f64, profile| Waypoint {
        position: geo.midline(lane, s + offset),
        lane,
        profile,
    };
    let candidates = match option {
        OptionId::LaneFollowWait => {
            let blocked = world
                .front_vehicle()
                .is_some_and(|(d, threshold, _)| d <= threshold);
            let wait_profile = if blocked {
                SpeedProfile::Wait
            } else {
                SpeedProfile::Crawl
            };
            [
                point(lane, cfg.follow_long, SpeedProfile::FollowLong),
                point(lane, cfg.follow_short, SpeedProfile::FollowShort),
                point(lane, cfg.wait, wait_profile),
            ]
        }
        OptionId::LaneChange => {
            let target = 1 - lane;
            [
                point(target, cfg.change_fast, SpeedProfile::Fast),
                point(target, cfg.change_normal, SpeedProfile::Normal),
                point(target, cfg.change_sharp, SpeedProfile::Sharp),
            ]
        }
    };
    WaypointMenu { option, candidates }
}

/// Point on the midline of `lane` (the lane just changed into) used to
/// straighten out after a lane change: `min(follow distance, front gap -
/// margin)` ahead of the ego car, never closer than the minimum offset.
pub fn safety_follow_point(world: &World, lane: u8, cfg: &MenuConfig) -> Waypoint {
    let gap = world
        .front_vehicle_in(lane)
        .map_or(f64::INFINITY, |(d, _, _)| d);
    let offset = cfg
        .follow_point_distance
        .min(gap - cfg.follow_point_margin)
        .max(cfg.follow_point_min_offset);
    Waypoint {
        position: world
            .geometry()
            .midline(lane, world.ego.position.x + offset),
        lane,
        profile: SpeedProfile::FollowShort,
    }
}
