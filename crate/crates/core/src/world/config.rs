use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Scenario, vehicle and timing parameters. All lengths in metres, speeds in
/// m/s, accelerations in m/s^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    pub lane_width: f64,
    pub lane_length: f64,
    /// Longitudinal position the ego car must pass to succeed.
    pub goal_x: f64,
    pub vehicle_length: f64,
    pub vehicle_width: f64,
    pub wheelbase: f64,
    pub max_accel: f64,
    pub max_decel: f64,
    pub max_steer_deg: f64,
    pub fps: f64,
    pub timeout_ticks: u32,
    pub ego_start_x: f64,
    pub ego_start_speed: f64,
    /// Parked obstacle position used when the scenario is not randomised.
    pub obstacle_x: f64,
    pub obstacle_x_range: [f64; 2],
    /// Moving car `b` starts level with or just ahead of the ego car.
    pub car_b_x: f64,
    /// Moving car `a` leads `b` in the target lane.
    pub car_a_x: f64,
    pub car_a_speed: f64,
    pub car_b_speed: f64,
    /// Range for randomised target-lane speeds. The faster draw goes to `a`
    /// so the two cars never run into each other.
    pub car_speed_range: [f64; 2],
    pub obstacle_threshold: f64,
    pub moving_threshold: f64,
    /// Chase distance reported for vehicles entirely behind the ego car.
    pub sentinel_distance: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            lane_width: 3.5,
            lane_length: 200.0,
            goal_x: 150.0,
            vehicle_length: 4.5,
            vehicle_width: 2.0,
            wheelbase: 2.8,
            max_accel: 3.0,
            max_decel: 6.0,
            max_steer_deg: 35.0,
            fps: 30.0,
            timeout_ticks: 1800,
            ego_start_x: 10.0,
            ego_start_speed: 5.0,
            obstacle_x: 60.0,
            obstacle_x_range: [40.0, 80.0],
            car_b_x: 12.0,
            car_a_x: 30.0,
            car_a_speed: 6.5,
            car_b_speed: 6.0,
            car_speed_range: [5.0, 8.0],
            obstacle_threshold: 16.0,
            moving_threshold: 9.0,
            sentinel_distance: 1000.0,
        }
    }
}

impl WorldConfig {
    pub fn dt(&self) -> f64 {
        1.0 / self.fps
    }

    pub fn max_steer_rad(&self) -> f64 {
        self.max_steer_deg.to_radians()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let positive = [
            ("lane_width", self.lane_width),
            ("lane_length", self.lane_length),
            ("vehicle_length", self.vehicle_length),
            ("vehicle_width", self.vehicle_width),
            ("wheelbase", self.wheelbase),
            ("max_accel", self.max_accel),
            ("max_decel", self.max_decel),
            ("max_steer_deg", self.max_steer_deg),
            ("fps", self.fps),
            ("obstacle_threshold", self.obstacle_threshold),
            ("moving_threshold", self.moving_threshold),
            ("sentinel_distance", self.sentinel_distance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.timeout_ticks == 0 {
            return bad("timeout_ticks must be at least 1".into());
        }
        if self.max_steer_deg >= 90.0 {
            return bad("max_steer_deg must be below 90".into());
        }
        if !(self.goal_x > self.ego_start_x && self.goal_x <= self.lane_length) {
            return bad(format!(
                "goal_x {} must lie in (ego_start_x, lane_length]",
                self.goal_x
            ));
        }
        let [lo, hi] = self.obstacle_x_range;
        if lo > hi {
            return bad(format!("obstacle_x_range [{lo}, {hi}] is reversed"));
        }
        let min_clear = self.ego_start_x + self.vehicle_length;
        for (name, x) in [
            ("obstacle_x", self.obstacle_x),
            ("obstacle_x_range low", lo),
            ("obstacle_x_range high", hi),
        ] {
            if x < min_clear || x > self.lane_length {
                return bad(format!(
                    "{name} = {x} is outside [{min_clear}, {}]",
                    self.lane_length
                ));
            }
        }
        let [slo, shi] = self.car_speed_range;
        if slo < 0.0 || slo > shi {
            return bad(format!("car_speed_range [{slo}, {shi}] is invalid"));
        }
        if self.ego_start_speed < 0.0 || self.car_a_speed < 0.0 || self.car_b_speed < 0.0 {
            return bad("speeds must be non-negative".into());
        }
        if self.car_a_x < self.car_b_x + self.vehicle_length {
            return bad("car_a_x must be at least one car length ahead of car_b_x".into());
        }
        Ok(())
    }
}
