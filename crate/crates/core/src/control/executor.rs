use serde::{Deserialize, Serialize};

use super::pid::{
    lateral_control, longitudinal_control, target_speed, Pid, PidGains, SpeedCeilings,
};
use crate::world::geometry::Vec2;
use crate::world::{
    compute_rewards, Events, RewardContext, RewardWeights, SpeedProfile, Waypoint, World,
};
use crate::{Error, Result};

/// Controller gains and sub-trajectory limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlConfig {
    pub longitudinal: PidGains,
    pub lateral: PidGains,
    pub ceilings: SpeedCeilings,
    /// Largest lateral miss at which a passed waypoint still counts as reached.
    pub arrival_radius: f64,
    pub tick_budget: u32,
    /// Budget for the wait/crawl choice, which may never reach its point.
    pub hold_ticks: u32,
    /// The safety follow point never asks for more than the front vehicle's
    /// speed once that vehicle is within this many safety thresholds.
    pub follow_cap_ratio: f64,
    /// Minimum look-ahead of the steering aim point. Inside this distance
    /// the aim slides past the waypoint along the road so the car arrives
    /// aligned with the lane instead of chasing the point.
    pub min_lookahead: f64,
    /// Gap kept to the front vehicle in the lane by the lane-follow choices.
    pub standoff: f64,
    /// Deceleration assumed when capping lane-follow speeds so the car can
    /// always stop at the standoff.
    pub comfort_decel: f64,
}

impl Default for ControlConfig {
    fn default() -> Self {
        ControlConfig {
            longitudinal: PidGains::longitudinal(),
            lateral: PidGains::lateral(),
            ceilings: SpeedCeilings::default(),
            arrival_radius: 1.0,
            tick_budget: 300,
            hold_ticks: 30,
            follow_cap_ratio: 2.0,
            min_lookahead: 6.0,
            standoff: 10.0,
            comfort_decel: 3.0,
        }
    }
}

impl ControlConfig {
    pub fn validate(&self) -> Result<()> {
        self.longitudinal.validate()?;
        self.lateral.validate()?;
        if !(self.arrival_radius > 0.0) {
            return Err(Error::Config("arrival_radius must be positive".into()));
        }
        if !(self.standoff >= 0.0 && self.comfort_decel > 0.0) {
            return Err(Error::Config(
                "standoff must be non-negative and comfort_decel positive".into(),
            ));
        }
        if !(self.min_lookahead >= 0.0) {
            return Err(Error::Config("min_lookahead must be non-negative".into()));
        }
        if self.tick_budget == 0 || self.hold_ticks == 0 {
            return Err(Error::Config("tick budgets must be at least 1".into()));
        }
        Ok(())
    }

    pub fn budget_for(&self, profile: SpeedProfile) -> u32 {
        match profile {
            SpeedProfile::Wait | SpeedProfile::Crawl => self.hold_ticks,
            _ => self.tick_budget,
        }
    }
}

/// Target speed for driving from the current ego state to `waypoint`.
///
/// Lane-follow profiles are also capped so that, at `comfort_decel`, the
/// car can still slow to the front vehicle's speed short of the standoff
/// after reaching the waypoint; a wait point stops when that room is gone.
pub fn waypoint_speed(world: &World, waypoint: &Waypoint, cfg: &ControlConfig) -> f64 {
    let wc = world.config();
    let d = world.ego.position.distance(waypoint.position);
    let v = target_speed(
        world.ego.speed,
        d,
        waypoint.profile,
        &cfg.ceilings,
        wc.max_accel,
        wc.max_decel,
    );
    let following = matches!(
        waypoint.profile,
        SpeedProfile::FollowLong
            | SpeedProfile::FollowShort
            | SpeedProfile::Crawl
            | SpeedProfile::Wait
    );
    let Some((gap, _, front)) = world.front_vehicle_in(waypoint.lane).filter(|_| following) else {
        return v;
    };
    let room = gap - cfg.standoff - (waypoint.position.x - world.ego.position.x).max(0.0);
    if waypoint.profile == SpeedProfile::Wait {
        return if room <= 0.0 {
            0.0
        } else {
            (2.0 * cfg.comfort_decel * room)
                .sqrt()
                .min(cfg.ceilings.crawl)
        };
    }
    let cap = (front.speed * front.speed + 2.0 * cfg.comfort_decel * room.max(0.0)).sqrt();
    v.min(if room <= 0.0 { front.speed.min(v) } else { cap })
}

/// Like [`waypoint_speed`], but no faster than a close front vehicle in the
/// waypoint's lane.
pub fn follow_point_speed(world: &World, waypoint: &Waypoint, cfg: &ControlConfig) -> f64 {
    let v = waypoint_speed(world, waypoint, cfg);
    match world.front_vehicle_in(waypoint.lane) {
        Some((d, threshold, front)) if d < cfg.follow_cap_ratio * threshold => v.min(front.speed),
        _ => v,
    }
}

/// Per-tick record of one executed control step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickRecord {
    pub tick: u32,
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub throttle: f64,
    pub steer: f64,
    pub accel: f64,
    pub jerk: f64,
    pub r_option: f64,
    pub r_planner: f64,
    pub events: Events,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalEvent {
    Collision,
    Success,
    Timeout,
}

impl TerminalEvent {
    pub fn from_events(e: &Events) -> Option<TerminalEvent> {
        if e.collision {
            Some(TerminalEvent::Collision)
        } else if e.success {
            Some(TerminalEvent::Success)
        } else if e.timeout {
            Some(TerminalEvent::Timeout)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubTrajectoryOutcome {
    pub ticks_used: u32,
    pub reached: bool,
    pub terminal_event: Option<TerminalEvent>,
    pub option_rewards: Vec<f64>,
    pub planner_rewards: Vec<f64>,
    pub trace: Vec<TickRecord>,
}

impl SubTrajectoryOutcome {
    pub fn option_reward(&self) -> f64 {
        self.option_rewards.iter().sum()
    }

    pub fn planner_reward(&self) -> f64 {
        self.planner_rewards.iter().sum()
    }

    /// Append a follow-on segment executed under the same decision.
    pub fn extend(&mut self, other: SubTrajectoryOutcome) {
        self.ticks_used += other.ticks_used;
        self.reached = other.reached;
        self.terminal_event = other.terminal_event;
        self.option_rewards.extend(other.option_rewards);
        self.planner_rewards.extend(other.planner_rewards);
        self.trace.extend(other.trace);
    }
}

/// Reward bookkeeping for a segment: the decision being executed and
/// whether its one-off penalties are still due.
#[derive(Debug, Clone, Copy)]
pub struct RewardSpec<'a> {
    pub context: RewardContext,
    pub weights: &'a RewardWeights,
}

/// What a low-level driver wants to do on one tick.
pub enum Command {
    Drive {
        throttle: f64,
        steer: f64,
    },
    /// Stop before stepping; the segment is over.
    Done,
}

/// Run `driver` for at most `budget` ticks (at least one), stopping early
/// on a terminal event or when `arrived` reports the goal reached (`Some`)
/// or abandoned.
pub fn run_segment<D, A>(
    world: &mut World,
    budget: u32,
    reward: RewardSpec<'_>,
    mut driver: D,
    mut arrived: A,
) -> SubTrajectoryOutcome
where
    D: FnMut(&World, u32) -> Command,
    A: FnMut(&World) -> Option<bool>,
{
    let mut out = SubTrajectoryOutcome {
        ticks_used: 0,
        reached: false,
        terminal_event: None,
        option_rewards: Vec::new(),
        planner_rewards: Vec::new(),
        trace: Vec::new(),
    };
    let budget = budget.max(1);
    let mut ctx = reward.context;
    while out.ticks_used < budget {
        let (throttle, steer) = match driver(world, out.ticks_used) {
            Command::Drive { throttle, steer } => (throttle, steer),
            Command::Done => break,
        };
        let prev = world.clone();
        world.step(throttle, steer);
        out.ticks_used += 1;
        let events = world.detect_events();
        let (ro, rp) = compute_rewards(&prev, world, &ctx, &events, reward.weights);
        ctx.decision_tick = false;
        out.option_rewards.push(ro);
        out.planner_rewards.push(rp);
        let k = world.kinematics();
        out.trace.push(TickRecord {
            tick: world.tick(),
            position: world.ego.position,
            heading: world.ego.heading,
            speed: world.ego.speed,
            throttle,
            steer,
            accel: k.accel_long,
            jerk: k.jerk,
            r_option: ro,
            r_planner: rp,
            events,
        });
        if let Some(t) = TerminalEvent::from_events(&events) {
            out.terminal_event = Some(t);
            break;
        }
        if let Some(reached) = arrived(world) {
            out.reached = reached;
            break;
        }
    }
    out
}

/// Track `waypoint` at a constant `speed` with fresh longitudinal and
/// lateral PIDs. Steering aims at the waypoint, or at a point
/// `min_lookahead` ahead along the road once the waypoint is closer.
///
/// The waypoint counts as reached once the ego centre has crossed the line
/// through it normal to the road and the whole footprint sits inside one
/// lane. A lateral miss wider than the arrival radius ends the segment
/// unreached.
pub fn execute_subtrajectory(
    world: &mut World,
    waypoint: Vec2,
    speed: f64,
    cfg: &ControlConfig,
    budget: u32,
    reward: RewardSpec<'_>,
) -> SubTrajectoryOutcome {
    let dt = world.config().dt();
    let mut lon = Pid::new(cfg.longitudinal);
    let mut lat = Pid::new(cfg.lateral);
    let radius = cfg.arrival_radius;
    let lookahead = cfg.min_lookahead;
    run_segment(
        world,
        budget,
        reward,
        |w, _| {
            let ahead = waypoint.x - w.ego.position.x;
            let aim = waypoint + Vec2::new((lookahead - ahead).max(0.0), 0.0);
            Command::Drive {
                throttle: longitudinal_control(&mut lon, w.ego.speed, speed, dt),
                steer: lateral_control(&mut lat, &w.ego, aim, dt),
            }
        },
        |w| {
            let gap = waypoint - w.ego.position;
            if gap.x > 0.0 {
                None
            } else if gap.y.abs() > radius {
                Some(false)
            } else {
                (!w.outside_lane()).then_some(true)
            }
        },
    )
}

/// RMS of a jerk series; zero for an empty series.
pub fn jerk_rms(jerks: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = jerks
        .into_iter()
        .fold((0.0, 0usize), |(s, n), j| (s + j * j, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::WorldConfig;
    use crate::{OptionId, PlannerChoice};

    fn spec(w: &RewardWeights) -> RewardSpec<'_> {
        RewardSpec {
            context: RewardContext {
                option: OptionId::LaneFollowWait,
                choice: PlannerChoice::Choice0,
                decision_tick: true,
            },
            weights: w,
        }
    }

    fn open_road() -> World {
        let mut w = World::reset(&WorldConfig::default(), 0, false).unwrap().0;
        for v in [&mut w.obstacle, &mut w.car_a, &mut w.car_b] {
            v.position.x = 190.0;
            v.speed = 0.0;
        }
        w
    }

    #[test]
    fn ten_metre_waypoint_at_cruise_speed() {
        let mut w = open_road();
        w.ego.speed = 8.0;
        let wp = w.ego.position + Vec2::new(10.0, 0.0);
        let weights = RewardWeights::default();
        let out = execute_subtrajectory(
            &mut w,
            wp,
            8.0,
            &ControlConfig::default(),
            300,
            spec(&weights),
        );
        assert!(out.reached);
        // 10 m at 8 m/s and 30 fps is 37.5 ticks.
        assert!(
            (37..=45).contains(&out.ticks_used),
            "ticks {}",
            out.ticks_used
        );
        assert_eq!(out.trace.len(), out.ticks_used as usize);
        assert_eq!(out.option_rewards.len(), out.ticks_used as usize);
    }

    #[test]
    fn obstacle_on_path_collides() {
        let mut w = open_road();
        w.ego.speed = 8.0;
        w.obstacle.position.x = w.ego.position.x + 12.0;
        let wp = w.ego.position + Vec2::new(30.0, 0.0);
        let weights = RewardWeights::default();
        let out = execute_subtrajectory(
            &mut w,
            wp,
            8.0,
            &ControlConfig::default(),
            300,
            spec(&weights),
        );
        assert_eq!(out.terminal_event, Some(TerminalEvent::Collision));
        assert!(!out.reached);
        assert!(out.option_reward() < -99.0);
    }

    #[test]
    fn one_tick_budget() {
        let mut w = open_road();
        w.ego.speed = 8.0;
        let wp = w.ego.position + Vec2::new(10.0, 0.0);
        let weights = RewardWeights::default();
        let out = execute_subtrajectory(
            &mut w,
            wp,
            8.0,
            &ControlConfig::default(),
            1,
            spec(&weights),
        );
        assert_eq!(out.ticks_used, 1);
        assert!(!out.reached);
        // Zero budget still runs one tick.
        let out = execute_subtrajectory(
            &mut w,
            wp,
            8.0,
            &ControlConfig::default(),
            0,
            spec(&weights),
        );
        assert_eq!(out.ticks_used, 1);
    }

    #[test]
    fn decision_penalty_only_on_first_tick() {
        let mut w = open_road();
        w.ego.speed = 5.0;
        let weights = RewardWeights::default();
        let wp = w.ego.position + Vec2::new(4.0, 0.0);
        let mut s = spec(&weights);
        s.context.choice = PlannerChoice::Choice2; // wait on a clear road
        let with = execute_subtrajectory(&mut w.clone(), wp, 0.0, &ControlConfig::default(), 10, s);
        s.context.decision_tick = false;
        let without = execute_subtrajectory(&mut w, wp, 0.0, &ControlConfig::default(), 10, s);
        assert!((with.planner_rewards[0] - without.planner_rewards[0] + 1.0).abs() < 1e-12);
        assert_eq!(with.planner_rewards[1..], without.planner_rewards[1..]);
        assert_eq!(with.option_rewards, without.option_rewards);
    }

    #[test]
    fn lane_change_waypoint_reached_and_follow_point_straightens() {
        let mut w = open_road();
        w.ego.speed = 6.0;
        w.set_active_option(OptionId::LaneChange);
        let cfg = ControlConfig::default();
        let weights = RewardWeights::default();
        let wp = Vec2::new(w.ego.position.x + 15.0, 3.5);
        let out = execute_subtrajectory(&mut w, wp, 6.0, &cfg, 300, spec(&weights));
        assert!(out.reached, "ended at {:?}", w.ego.position);
        assert_eq!(w.ego.lane_id, 1);
        let fp = crate::world::safety_follow_point(&w, 1, &crate::world::MenuConfig::default());
        let out = execute_subtrajectory(&mut w, fp.position, 6.0, &cfg, 300, spec(&weights));
        assert!(out.reached);
        assert!(w.ego.heading.abs() < 0.1, "heading {}", w.ego.heading);
        w.set_active_option(OptionId::LaneFollowWait);
        assert!(!w.outside_lane());
    }

    #[test]
    fn jerk_rms_reference() {
        assert_eq!(jerk_rms([]), 0.0);
        assert!((jerk_rms([3.0, 4.0]) - 12.5f64.sqrt()).abs() < 1e-12);
    }
}
