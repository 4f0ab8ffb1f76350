//! Two-lane straight road with an ego car, a parked obstacle in the ego lane
//! and two cars moving at constant speed in the target lane.
//!
//! Coordinates: `x` runs along the road, `y` to the left. Lane 0 (the ego
//! lane) is centred on `y = 0`, lane 1 (the target lane) on
//! `y = lane_width`. Heading 0 points down the road; positive steer turns
//! left.

mod config;
pub mod geometry;
pub mod menu;
pub mod observation;
pub mod reward;
pub mod trace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use config::WorldConfig;
use geometry::{wrap_angle, OrientedRect, Vec2};
pub use menu::{
    safety_follow_point, waypoint_menu, MenuConfig, SpeedProfile, Waypoint, WaypointMenu,
};
pub use observation::{
    add_noise, HistoryVector, NoiseStd, Observation, Thresholds, VehicleReading, HISTORY_LEN,
    OBS_DIM,
};
pub use reward::{
    compute_rewards, decision_penalties, unsafe_penalty, RewardContext, RewardWeights,
};
pub use trace::{read_trace, write_trace, TraceRow, TRACE_HEADER};

use crate::{OptionId, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaneGeometry {
    pub lane_width: f64,
    pub lane_length: f64,
}

impl LaneGeometry {
    pub const LANE_COUNT: u8 = 2;

    pub fn lane_center_y(&self, lane: u8) -> f64 {
        lane as f64 * self.lane_width
    }

    pub fn midline(&self, lane: u8, s: f64) -> Vec2 {
        Vec2::new(s, self.lane_center_y(lane))
    }

    /// Lane containing lateral position `y` (nearest midline, clamped).
    pub fn lane_of(&self, y: f64) -> u8 {
        let idx = (y / self.lane_width).round();
        idx.clamp(0.0, (Self::LANE_COUNT - 1) as f64) as u8
    }

    /// `(right, left)` lateral boundaries of `lane`.
    pub fn boundaries(&self, lane: u8) -> (f64, f64) {
        let c = self.lane_center_y(lane);
        (c - self.lane_width / 2.0, c + self.lane_width / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub length: f64,
    pub width: f64,
    pub lane_id: u8,
}

impl VehicleState {
    pub fn footprint(&self) -> OrientedRect {
        OrientedRect {
            center: self.position,
            heading: self.heading,
            length: self.length,
            width: self.width,
        }
    }

    pub fn front_x(&self) -> f64 {
        self.position.x + self.length / 2.0
    }

    pub fn rear_x(&self) -> f64 {
        self.position.x - self.length / 2.0
    }
}

/// Terminal and per-tick flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Events {
    pub collision: bool,
    pub lane_invasion: bool,
    pub success: bool,
    pub timeout: bool,
}

impl Events {
    pub fn terminal(&self) -> bool {
        self.collision || self.success || self.timeout
    }

    pub fn label(&self) -> &'static str {
        if self.collision {
            "collision"
        } else if self.success {
            "success"
        } else if self.timeout {
            "timeout"
        } else if self.lane_invasion {
            "lane_invasion"
        } else {
            ""
        }
    }
}

/// Acceleration bookkeeping for jerk statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Kinematics {
    pub accel_long: f64,
    pub accel_lat: f64,
    pub jerk: f64,
}

#[derive(Debug, Clone)]
pub struct World {
    config: WorldConfig,
    geometry: LaneGeometry,
    pub ego: VehicleState,
    pub obstacle: VehicleState,
    pub car_a: VehicleState,
    pub car_b: VehicleState,
    tick: u32,
    active_option: OptionId,
    kinematics: Kinematics,
}

impl World {
    /// Build the start-of-episode world.
    ///
    /// With `randomize` set, the obstacle position and the target-lane
    /// speeds are drawn uniformly from their configured ranges using
    /// `seed`; otherwise the fixed scenario is used and `seed` is ignored.
    pub fn reset(config: &WorldConfig, seed: u64, randomize: bool) -> Result<(World, Observation)> {
        config.validate()?;
        let geometry = LaneGeometry {
            lane_width: config.lane_width,
            lane_length: config.lane_length,
        };
        let (obstacle_x, speed_a, speed_b) = if randomize {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let [lo, hi] = config.obstacle_x_range;
            let [slo, shi] = config.car_speed_range;
            let x = if hi > lo {
                rng.random_range(lo..=hi)
            } else {
                lo
            };
            let mut draw = || {
                if shi > slo {
                    rng.random_range(slo..=shi)
                } else {
                    slo
                }
            };
            let (s1, s2) = (draw(), draw());
            (x, s1.max(s2), s1.min(s2))
        } else {
            (config.obstacle_x, config.car_a_speed, config.car_b_speed)
        };
        let vehicle = |x: f64, lane: u8, speed: f64| VehicleState {
            position: geometry.midline(lane, x),
            heading: 0.0,
            speed,
            length: config.vehicle_length,
            width: config.vehicle_width,
            lane_id: lane,
        };
        let world = World {
            config: config.clone(),
            geometry,
            ego: vehicle(config.ego_start_x, 0, config.ego_start_speed),
            obstacle: vehicle(obstacle_x, 0, 0.0),
            car_a: vehicle(config.car_a_x, 1, speed_a),
            car_b: vehicle(config.car_b_x, 1, speed_b),
            tick: 0,
            active_option: OptionId::LaneFollowWait,
            kinematics: Kinematics::default(),
        };
        let obs = world.observe();
        Ok((world, obs))
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn geometry(&self) -> &LaneGeometry {
        &self.geometry
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn kinematics(&self) -> Kinematics {
        self.kinematics
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            obstacle: self.config.obstacle_threshold,
            moving: self.config.moving_threshold,
        }
    }

    pub fn active_option(&self) -> OptionId {
        self.active_option
    }

    /// Record which option is driving; lane invasions only count while
    /// following the lane.
    pub fn set_active_option(&mut self, option: OptionId) {
        self.active_option = option;
    }

    pub fn others(&self) -> [&VehicleState; 3] {
        [&self.obstacle, &self.car_a, &self.car_b]
    }

    /// Advance one tick of `1 / fps` seconds.
    pub fn step(&mut self, throttle: f64, steer: f64) {
        self.step_dt(throttle, steer, self.config.dt());
    }

    /// Kinematic bicycle update for the ego car; other cars move along their
    /// lane midlines at constant speed. Controls are clamped to `[-1, 1]`.
    pub fn step_dt(&mut self, throttle: f64, steer: f64, dt: f64) {
        let throttle = if throttle.is_nan() {
            0.0
        } else {
            throttle.clamp(-1.0, 1.0)
        };
        let steer = if steer.is_nan() {
            0.0
        } else {
            steer.clamp(-1.0, 1.0)
        };
        let accel = if throttle >= 0.0 {
            throttle * self.config.max_accel
        } else {
            throttle * self.config.max_decel
        };

        let ego = &mut self.ego;
        let v0 = ego.speed;
        let v1 = (v0 + accel * dt).max(0.0);
        let v_mid = 0.5 * (v0 + v1);
        let delta = steer * self.config.max_steer_rad();
        let yaw_rate = v_mid * delta.tan() / self.config.wheelbase;
        let dpsi = yaw_rate * dt;
        // Chord direction of a constant-curvature arc is the mean heading.
        let dir = Vec2::from_angle(ego.heading + 0.5 * dpsi);
        ego.position = ego.position + dir * (v_mid * dt);
        ego.heading = wrap_angle(ego.heading + dpsi);
        ego.speed = v1;
        ego.lane_id = self.geometry.lane_of(ego.position.y);

        for car in [&mut self.car_a, &mut self.car_b] {
            car.position.x += car.speed * dt;
        }

        let accel_long = (v1 - v0) / dt;
        let accel_lat = v_mid * yaw_rate;
        let prev = self.kinematics;
        let jerk = (accel_long - prev.accel_long).hypot(accel_lat - prev.accel_lat) / dt;
        self.kinematics = Kinematics {
            accel_long,
            accel_lat,
            jerk,
        };
        self.tick += 1;
    }

    /// Chase distance from the ego front bumper to the rear of `other`.
    /// Zero while the two overlap longitudinally; the sentinel once `other`
    /// is completely behind the ego car.
    pub fn chase_distance(&self, other: &VehicleState) -> f64 {
        if other.front_x() < self.ego.rear_x() {
            self.config.sentinel_distance
        } else {
            (other.rear_x() - self.ego.front_x()).max(0.0)
        }
    }

    pub fn observe(&self) -> Observation {
        let reading = |v: &VehicleState, threshold: f64| {
            let d = self.chase_distance(v);
            VehicleReading {
                speed: v.speed,
                distance: d,
                ratio: d / threshold,
                lane_id: v.lane_id,
            }
        };
        Observation {
            ego_speed: self.ego.speed,
            ego_lane: self.ego.lane_id,
            obstacle: reading(&self.obstacle, self.config.obstacle_threshold),
            car_a: reading(&self.car_a, self.config.moving_threshold),
            car_b: reading(&self.car_b, self.config.moving_threshold),
        }
    }

    /// Nearest vehicle ahead (not fully behind) in the ego car's lane:
    /// `(chase distance, threshold, vehicle)`.
    pub fn front_vehicle(&self) -> Option<(f64, f64, &VehicleState)> {
        self.front_vehicle_in(self.ego.lane_id)
    }

    pub fn front_vehicle_in(&self, lane: u8) -> Option<(f64, f64, &VehicleState)> {
        let thresholds = self.thresholds().per_slot();
        self.others()
            .into_iter()
            .zip(thresholds)
            .filter(|(v, _)| v.lane_id == lane && v.front_x() >= self.ego.rear_x())
            .map(|(v, t)| (self.chase_distance(v), t, v))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }

    pub fn collision(&self) -> bool {
        let ego = self.ego.footprint();
        self.others().iter().any(|v| ego.overlaps(&v.footprint()))
    }

    /// Any ego footprint corner outside the boundaries of the lane holding
    /// the ego centre.
    pub fn outside_lane(&self) -> bool {
        let (right, left) = self.geometry.boundaries(self.ego.lane_id);
        self.ego
            .footprint()
            .corners()
            .iter()
            .any(|c| c.y < right || c.y > left)
    }

    pub fn detect_events(&self) -> Events {
        let collision = self.collision();
        Events {
            collision,
            lane_invasion: self.active_option == OptionId::LaneFollowWait && self.outside_lane(),
            success: !collision && self.ego.position.x >= self.config.goal_x,
            timeout: self.tick >= self.config.timeout_ticks,
        }
    }
}
