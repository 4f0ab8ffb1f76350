//! PID waypoint tracking: one executed sub-trajectory per macro decision.

mod executor;
mod pid;

pub use executor::{
    execute_subtrajectory, follow_point_speed, jerk_rms, run_segment, waypoint_speed, Command,
    ControlConfig, RewardSpec, SubTrajectoryOutcome, TerminalEvent, TickRecord,
};
pub use pid::{
    bearing_error, lateral_control, longitudinal_control, reachable_speed, target_speed, Pid,
    PidGains, SpeedCeilings,
};
