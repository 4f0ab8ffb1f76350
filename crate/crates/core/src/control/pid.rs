use serde::{Deserialize, Serialize};

use crate::world::geometry::{wrap_angle, Vec2};
use crate::world::{SpeedProfile, VehicleState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub integral_limit: f64,
    pub output_min: f64,
    pub output_max: f64,
}

impl PidGains {
    pub fn longitudinal() -> Self {
        PidGains {
            kp: 0.8,
            ki: 0.1,
            kd: 0.05,
            integral_limit: 2.0,
            output_min: -1.0,
            output_max: 1.0,
        }
    }

    pub fn lateral() -> Self {
        PidGains {
            kp: 1.2,
            ki: 0.0,
            kd: 0.2,
            integral_limit: 1.0,
            output_min: -1.0,
            output_max: 1.0,
        }
    }

    pub fn zero() -> Self {
        PidGains {
            kp: 0.0,
            ki: 0.0,
            kd: 0.0,
            ..PidGains::longitudinal()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.kp, self.ki, self.kd]
            .iter()
            .any(|g| !(*g >= 0.0 && g.is_finite()))
        {
            return Err(Error::Config(
                "PID gains must be finite and non-negative".into(),
            ));
        }
        if !(self.integral_limit >= 0.0) {
            return Err(Error::Config("integral_limit must be non-negative".into()));
        }
        if !(self.output_min <= 0.0 && 0.0 <= self.output_max) {
            return Err(Error::Config("PID output range must contain zero".into()));
        }
        Ok(())
    }
}

/// Discrete PID with a clamped integrator and conditional integration:
/// the integrator is frozen while the output is saturated in the direction
/// of the error.
#[derive(Debug, Clone)]
pub struct Pid {
    gains: PidGains,
    integral: f64,
    prev_error: Option<f64>,
}

impl Pid {
    pub fn new(gains: PidGains) -> Self {
        Pid {
            gains,
            integral: 0.0,
            prev_error: None,
        }
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.prev_error = None;
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn update(&mut self, error: f64, dt: f64) -> f64 {
        let g = &self.gains;
        let derivative = match self.prev_error {
            Some(prev) if dt > 0.0 => (error - prev) / dt,
            _ => 0.0,
        };
        self.prev_error = Some(error);

        let candidate = (self.integral + error * dt).clamp(-g.integral_limit, g.integral_limit);
        let raw = g.kp * error + g.ki * candidate + g.kd * derivative;
        let out = raw.clamp(g.output_min, g.output_max);
        let winding_up = (raw > g.output_max && error > 0.0) || (raw < g.output_min && error < 0.0);
        if !winding_up {
            self.integral = candidate;
        }
        out
    }
}

/// Top speed for each waypoint profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeedCeilings {
    pub follow_long: f64,
    pub follow_short: f64,
    pub crawl: f64,
    pub fast: f64,
    pub normal: f64,
    pub sharp: f64,
}

impl Default for SpeedCeilings {
    fn default() -> Self {
        SpeedCeilings {
            follow_long: 10.0,
            follow_short: 5.0,
            crawl: 2.0,
            fast: 10.0,
            normal: 7.0,
            sharp: 4.0,
        }
    }
}

impl SpeedCeilings {
    pub fn get(&self, profile: SpeedProfile) -> f64 {
        match profile {
            SpeedProfile::FollowLong => self.follow_long,
            SpeedProfile::FollowShort => self.follow_short,
            SpeedProfile::Crawl => self.crawl,
            SpeedProfile::Wait => 0.0,
            SpeedProfile::Fast => self.fast,
            SpeedProfile::Normal => self.normal,
            SpeedProfile::Sharp => self.sharp,
        }
    }
}

/// Speed reachable at a waypoint `distance` metres away under constant
/// `max_accel` (speeding up towards `ceiling`) or `max_decel` (slowing
/// towards it), never overshooting the ceiling.
pub fn reachable_speed(u: f64, distance: f64, ceiling: f64, max_accel: f64, max_decel: f64) -> f64 {
    let d = distance.max(0.0);
    if u <= ceiling {
        (u * u + 2.0 * max_accel * d).sqrt().min(ceiling)
    } else {
        (u * u - 2.0 * max_decel * d).max(0.0).sqrt().max(ceiling)
    }
}

/// Target speed for a waypoint with the given profile; the wait profile
/// always asks for a stop.
pub fn target_speed(
    u: f64,
    distance: f64,
    profile: SpeedProfile,
    ceilings: &SpeedCeilings,
    max_accel: f64,
    max_decel: f64,
) -> f64 {
    match profile {
        SpeedProfile::Wait => 0.0,
        p => reachable_speed(u, distance, ceilings.get(p), max_accel, max_decel),
    }
}

/// Throttle (positive) or brake (negative) from the speed error `v - u`.
pub fn longitudinal_control(pid: &mut Pid, u: f64, v: f64, dt: f64) -> f64 {
    pid.update(v - u, dt)
}

/// Signed angle from the vehicle heading to the bearing of `target`;
/// zero when the target coincides with the vehicle position.
pub fn bearing_error(pose: &VehicleState, target: Vec2) -> f64 {
    let to = target - pose.position;
    if to.norm() < 1e-9 {
        return 0.0;
    }
    wrap_angle(to.y.atan2(to.x) - pose.heading)
}

/// Steer command (left positive) from the heading-to-bearing error.
pub fn lateral_control(pid: &mut Pid, pose: &VehicleState, target: Vec2, dt: f64) -> f64 {
    pid.update(bearing_error(pose, target), dt)
}
