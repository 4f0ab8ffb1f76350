use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub const OBS_DIM: usize = 14;
pub const HISTORY_LEN: usize = 3;

/// What the ego car knows about one other vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleReading {
    pub speed: f64,
    /// Bumper-to-bumper chase distance along the road.
    pub distance: f64,
    /// `distance / safety threshold`.
    pub ratio: f64,
    pub lane_id: u8,
}

/// The 14-value state: ego speed and lane, then speed, chase distance,
/// distance ratio and lane for the obstacle `o` and moving cars `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub ego_speed: f64,
    pub ego_lane: u8,
    pub obstacle: VehicleReading,
    pub car_a: VehicleReading,
    pub car_b: VehicleReading,
}

impl Observation {
    pub fn readings(&self) -> [&VehicleReading; 3] {
        [&self.obstacle, &self.car_a, &self.car_b]
    }

    /// `[v_e, lane_ide, v_o, d_co, d_cor, lane_ido, v_a, d_ca, d_car, lane_ida, v_b, d_cb, d_cbr, lane_idb]`
    pub fn to_array(&self) -> [f64; OBS_DIM] {
        let mut out = [0.0; OBS_DIM];
        out[0] = self.ego_speed;
        out[1] = self.ego_lane as f64;
        for (k, r) in self.readings().into_iter().enumerate() {
            let base = 2 + 4 * k;
            out[base] = r.speed;
            out[base + 1] = r.distance;
            out[base + 2] = r.ratio;
            out[base + 3] = r.lane_id as f64;
        }
        out
    }

    /// Nearest vehicle ahead in the ego car's current lane, by ratio.
    pub fn nearest_in_lane(&self) -> Option<&VehicleReading> {
        self.readings()
            .into_iter()
            .filter(|r| r.lane_id == self.ego_lane)
            .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }

    /// Readings for the two moving cars whose lane is not the ego's.
    pub fn other_lane_cars(&self) -> impl Iterator<Item = &VehicleReading> {
        [&self.car_a, &self.car_b]
            .into_iter()
            .filter(move |r| r.lane_id != self.ego_lane)
    }
}

/// The last three observations, oldest first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryVector {
    steps: [Observation; HISTORY_LEN],
}

impl HistoryVector {
    /// Start-of-episode history: the initial observation repeated.
    pub fn new(initial: Observation) -> Self {
        HistoryVector {
            steps: [initial; HISTORY_LEN],
        }
    }

    pub fn from_steps(steps: [Observation; HISTORY_LEN]) -> Self {
        HistoryVector { steps }
    }

    /// Deque semantics: drop the oldest, append `obs`.
    pub fn push(&mut self, obs: Observation) {
        self.steps.rotate_left(1);
        self.steps[HISTORY_LEN - 1] = obs;
    }

    pub fn pushed(mut self, obs: Observation) -> Self {
        self.push(obs);
        self
    }

    pub fn steps(&self) -> &[Observation; HISTORY_LEN] {
        &self.steps
    }

    pub fn latest(&self) -> &Observation {
        &self.steps[HISTORY_LEN - 1]
    }
}

/// Standard deviations of the additive Gaussian perception noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseStd {
    pub speed: f64,
    pub distance: f64,
}

impl Default for NoiseStd {
    fn default() -> Self {
        NoiseStd {
            speed: 0.5,
            distance: 1.0,
        }
    }
}

impl NoiseStd {
    pub const ZERO: NoiseStd = NoiseStd {
        speed: 0.0,
        distance: 0.0,
    };
}

/// Safety thresholds used to turn chase distances into ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub obstacle: f64,
    pub moving: f64,
}

impl Thresholds {
    /// Threshold for each reading slot, in `[o, a, b]` order.
    pub fn per_slot(&self) -> [f64; 3] {
        [self.obstacle, self.moving, self.moving]
    }
}

/// Perturb speeds and chase distances with independent zero-mean Gaussian
/// noise. Lane ids are untouched, distances are clamped at zero and the
/// ratios are recomputed from the noisy distances.
///
/// Draws a fixed number of normals per call regardless of `std`, so the
/// random stream stays aligned between noisy and noise-free runs.
pub fn add_noise<R: Rng + ?Sized>(
    obs: &Observation,
    std: &NoiseStd,
    thresholds: &Thresholds,
    rng: &mut R,
) -> Observation {
    let mut draw = |s: f64| -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        s * z
    };
    let mut out = *obs;
    out.ego_speed = (obs.ego_speed + draw(std.speed)).max(0.0);
    let slots = [&mut out.obstacle, &mut out.car_a, &mut out.car_b];
    for ((dst, src), threshold) in slots
        .into_iter()
        .zip(obs.readings())
        .zip(thresholds.per_slot())
    {
        dst.speed = (src.speed + draw(std.speed)).max(0.0);
        dst.distance = (src.distance + draw(std.distance)).max(0.0);
        dst.ratio = dst.distance / threshold;
    }
    out
}
