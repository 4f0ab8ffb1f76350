use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::replay::Transition;
use crate::baselines::DirectControlConfig;
use crate::control::{
    execute_subtrajectory, follow_point_speed, jerk_rms, run_segment, waypoint_speed, Command,
    ControlConfig, RewardSpec, SubTrajectoryOutcome, TerminalEvent,
};
use crate::world::{
    add_noise, safety_follow_point, waypoint_menu, HistoryVector, MenuConfig, NoiseStd,
    Observation, RewardContext, RewardWeights, TraceRow, World, WorldConfig,
};
use crate::{OptionId, PlannerChoice, Result};

/// Everything about the environment an agent is trained and judged in.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub world: WorldConfig,
    pub menu: MenuConfig,
    pub control: ControlConfig,
    pub rewards: RewardWeights,
    pub noise: NoiseStd,
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        self.world.validate()?;
        self.control.validate()?;
        self.rewards.validate()?;
        if !(self.noise.speed >= 0.0 && self.noise.distance >= 0.0) {
            return Err(crate::Error::Config(
                "noise standard deviations must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// How a planner decision becomes throttle and steer.
#[derive(Debug, Clone, PartialEq)]
pub enum Actuation {
    /// Track the chosen waypoint with the PID executor.
    Pid,
    /// Replay a fixed control primitive for a burst of ticks.
    Direct(DirectControlConfig),
}

/// Something that picks a decision from the perceived history. `truth` is
/// the noise-free latest observation, for rule-based policies that are
/// specified on clean inputs.
pub trait Policy {
    fn decide(
        &mut self,
        perceived: &HistoryVector,
        truth: &Observation,
    ) -> Result<(OptionId, PlannerChoice)>;
}

impl<F> Policy for F
where
    F: FnMut(&HistoryVector, &Observation) -> Result<(OptionId, PlannerChoice)>,
{
    fn decide(
        &mut self,
        perceived: &HistoryVector,
        truth: &Observation,
    ) -> Result<(OptionId, PlannerChoice)> {
        self(perceived, truth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Collision,
    Timeout,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Collision => "collision",
            Outcome::Timeout => "timeout",
        }
    }

    pub fn parse(s: &str) -> Option<Outcome> {
        match s {
            "success" => Some(Outcome::Success),
            "collision" => Some(Outcome::Collision),
            "timeout" => Some(Outcome::Timeout),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub outcome: Outcome,
    pub option_reward_total: f64,
    pub planner_reward_total: f64,
    /// Separate lane-boundary crossings while following the lane.
    pub lane_invasions: u32,
    pub macro_steps: u32,
    pub ticks: u32,
    pub jerk_rms: f64,
}

impl EpisodeResult {
    pub fn total_reward(&self) -> f64 {
        self.option_reward_total + self.planner_reward_total
    }
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub result: EpisodeResult,
    pub transitions: Vec<Transition>,
    pub trace: Vec<TraceRow>,
}

/// Which scenario to run and whether perception is noisy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeSpec {
    pub seed: u64,
    pub randomize: bool,
    pub noisy: bool,
    pub record_trace: bool,
    pub episode_id: u64,
}

const NOISE_STREAM: u64 = 0x6e6f_6973_655f_7331;

fn execute(
    world: &mut World,
    env: &EnvConfig,
    actuation: &Actuation,
    option: OptionId,
    choice: PlannerChoice,
) -> SubTrajectoryOutcome {
    let context = RewardContext {
        option,
        choice,
        decision_tick: true,
    };
    let spec = RewardSpec {
        context,
        weights: &env.rewards,
    };
    match actuation {
        Actuation::Pid => {
            let wp = waypoint_menu(world, option, &env.menu).get(choice);
            let speed = waypoint_speed(world, &wp, &env.control);
            let budget = env.control.budget_for(wp.profile);
            let mut out =
                execute_subtrajectory(world, wp.position, speed, &env.control, budget, spec);
            if option == OptionId::LaneChange && out.terminal_event.is_none() {
                let fp = safety_follow_point(world, wp.lane, &env.menu);
                let speed = follow_point_speed(world, &fp, &env.control);
                let spec = RewardSpec {
                    context: RewardContext {
                        decision_tick: false,
                        ..context
                    },
                    weights: &env.rewards,
                };
                let tail = execute_subtrajectory(
                    world,
                    fp.position,
                    speed,
                    &env.control,
                    env.control.tick_budget,
                    spec,
                );
                out.extend(tail);
            }
            out
        }
        Actuation::Direct(dc) => {
            let lane = world.ego.lane_id;
            run_segment(
                world,
                dc.burst_ticks,
                spec,
                |_, k| {
                    let (throttle, steer) = dc.primitive(option, choice, k, lane);
                    Command::Drive { throttle, steer }
                },
                |_| None,
            )
        }
    }
}

/// Roll out one episode: observe, decide, execute, repeat until a terminal
/// event. Returns the result, the macro transitions and (optionally) the
/// per-tick trace.
pub fn run_episode(
    env: &EnvConfig,
    spec: &EpisodeSpec,
    policy: &mut dyn Policy,
    actuation: &Actuation,
) -> Result<Episode> {
    let (mut world, truth0) = World::reset(&env.world, spec.seed, spec.randomize)?;
    let noise = if spec.noisy {
        env.noise
    } else {
        NoiseStd::ZERO
    };
    let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ NOISE_STREAM);
    let thresholds = world.thresholds();
    let mut perceive = |obs: &Observation| add_noise(obs, &noise, &thresholds, &mut noise_rng);

    let mut truth = truth0;
    let mut s = perceive(&truth);
    let mut h = HistoryVector::new(s);
    let mut transitions: Vec<Transition> = Vec::new();
    let mut trace = Vec::new();
    let (mut r_o_total, mut r_p_total) = (0.0, 0.0);
    let mut invasions = 0u32;
    let mut invading = false;
    let mut jerks = Vec::new();

    let outcome = loop {
        let (option, choice) = policy.decide(&h, &truth)?;
        if let Some(prev) = transitions.last_mut() {
            prev.option_continues = prev.option == option;
        }
        world.set_active_option(option);
        let out = execute(&mut world, env, actuation, option, choice);

        for t in &out.trace {
            if t.events.lane_invasion && !invading {
                invasions += 1;
            }
            invading = t.events.lane_invasion;
            jerks.push(t.jerk);
            if spec.record_trace {
                trace.push(TraceRow {
                    tick: t.tick,
                    x: t.position.x,
                    y: t.position.y,
                    heading: t.heading,
                    speed: t.speed,
                    option: option.to_string(),
                    planner_choice: choice.label(option).to_string(),
                    throttle: t.throttle,
                    steer: t.steer,
                    r_option: t.r_option,
                    r_planner: t.r_planner,
                    event: t.events.label().to_string(),
                });
            }
        }

        let (r_o, r_p) = (out.option_reward(), out.planner_reward());
        r_o_total += r_o;
        r_p_total += r_p;
        truth = world.observe();
        let s_next = perceive(&truth);
        let h_next = h.pushed(s_next);
        let terminal = out.terminal_event.is_some();
        transitions.push(Transition {
            s,
            h,
            option,
            choice,
            r_option: r_o,
            r_planner: r_p,
            s_next,
            h_next,
            terminal,
            option_continues: false,
            episode_id: spec.episode_id,
            step_index: transitions.len(),
        });
        s = s_next;
        h = h_next;

        if let Some(t) = out.terminal_event {
            break match t {
                TerminalEvent::Collision => Outcome::Collision,
                TerminalEvent::Success => Outcome::Success,
                TerminalEvent::Timeout => Outcome::Timeout,
            };
        }
    };

    let result = EpisodeResult {
        outcome,
        option_reward_total: r_o_total,
        planner_reward_total: r_p_total,
        lane_invasions: invasions,
        macro_steps: transitions.len() as u32,
        ticks: world.tick(),
        jerk_rms: jerk_rms(jerks),
    };
    Ok(Episode {
        result,
        transitions,
        trace,
    })
}
