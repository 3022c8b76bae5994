//! Lockstep match simulator.
//!
//! Two teams on one field: ours runs the coordination engine, one agent per
//! robot, and the opponents follow a script (nearest robot chases the ball,
//! the rest hold a formation). Every tick each agent senses, updates its own
//! model, replays received packets into its teammate models, fuses, assigns
//! roles, walks and possibly broadcasts. Packets cross a lossy, delayed
//! channel. All randomness comes from seeded ChaCha streams, so a config
//! fully determines the result.

mod agent;
mod channel;
mod metrics;
mod sense;
mod world;

use alloc::string::String;
use alloc::vec::Vec;

pub use agent::Agent;
pub use channel::{channel_deliver, Packet};
pub use metrics::{overlap_seconds, MatchMetrics, RoleSpan};
pub use sense::{sense, PerceptionParams};
pub use world::{step, BallState, Command, SimRobot, Team, WorldState};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::events::DetectorParams;
use crate::geometry::Field;
use crate::task_assignment::{
    default_catalog, default_contexts, Context, CoordinateOptions, Coordination, TaskError, TaskTemplate,
};
use crate::world_model::{WorldModelError, WorldModelParams};
use crate::RobotId;

/// Most robots per team.
pub const MAX_TEAM_SIZE: usize = 7;

/// Experiment arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Mode {
    /// Every robot broadcasts pose and ball alternately on a fixed period.
    FixedRate,
    /// Event-triggered messages, first `n` catalog roles.
    EventBased,
    /// Event-triggered messages with Voronoi task filtering and refinement.
    EventVoronoi,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::FixedRate, Mode::EventBased, Mode::EventVoronoi];

    pub fn name(self) -> &'static str {
        match self {
            Mode::FixedRate => "FixedRate",
            Mode::EventBased => "EventBased",
            Mode::EventVoronoi => "EventVoronoi",
        }
    }

    pub fn from_name(name: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(name))
    }

    pub fn uses_events(self) -> bool {
        self != Mode::FixedRate
    }
}

impl core::fmt::Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Physical constants of the simulated world.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PhysicsParams {
    /// Walking speed, m/s.
    pub robot_speed: f64,
    /// Turning speed, rad/s.
    pub turn_rate: f64,
    /// Rolling deceleration of the ball, m/s².
    pub ball_friction: f64,
    /// Ball speed right after a kick, m/s.
    pub kick_speed: f64,
    /// Standard deviation of the kick direction, rad.
    pub kick_spread: f64,
    /// A kicker must be this close to the ball, m.
    pub kick_range: f64,
    /// Nobody can kick again for this long after a kick, s.
    pub kick_recovery: f64,
    /// Robots are pushed apart to at least this distance, m.
    pub min_separation: f64,
    /// Goal mouth width, m.
    pub goal_width: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        PhysicsParams {
            robot_speed: 0.3,
            turn_rate: 2.0,
            ball_friction: 0.4,
            kick_speed: 2.0,
            kick_spread: 0.15,
            kick_range: 0.25,
            kick_recovery: 1.0,
            min_separation: 0.3,
            goal_width: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SimConfig {
    pub seed: u64,
    /// Seconds.
    pub match_len: f64,
    /// Seconds.
    pub tick: f64,
    pub team_size: usize,
    /// Packets per team per match.
    pub total_budget: u32,
    pub reserve_fraction: f64,
    pub packet_loss: f64,
    pub delay_ticks: u32,
    pub mode: Mode,
    pub field: Field,
    /// Opponent robots; defaults to the same as `team_size`.
    pub opponents: Option<usize>,
    pub perception: PerceptionParams,
    pub physics: PhysicsParams,
    pub world_model: WorldModelParams,
    pub detector: DetectorParams,
    pub contexts: Vec<Context>,
    pub catalog: Vec<TaskTemplate>,
    /// Offset fraction for Voronoi target refinement.
    pub alpha: f64,
    /// Probability that a robot hears the referee whistle.
    pub whistle_hearing: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            match_len: 600.0,
            tick: 0.05,
            team_size: 5,
            total_budget: 1200,
            reserve_fraction: 0.10,
            packet_loss: 0.0,
            delay_ticks: 0,
            mode: Mode::EventVoronoi,
            field: Field::default(),
            opponents: None,
            perception: PerceptionParams::default(),
            physics: PhysicsParams::default(),
            world_model: WorldModelParams::default(),
            detector: DetectorParams::default(),
            contexts: default_contexts(),
            catalog: default_catalog(),
            alpha: 0.5,
            whistle_hearing: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    WorldModel(#[from] WorldModelError),
    #[error(transparent)]
    Task(#[from] TaskError),
}

fn invalid(msg: &str) -> SimError {
    SimError::ConfigInvalid(String::from(msg))
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.tick > 0.0 && self.tick.is_finite()) {
            return Err(invalid("tick must be positive"));
        }
        if !(self.match_len >= 0.0 && self.match_len.is_finite()) {
            return Err(invalid("match_len must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.packet_loss) {
            return Err(invalid("packet_loss must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.whistle_hearing) {
            return Err(invalid("whistle_hearing must lie in [0, 1]"));
        }
        if !(0.0..1.0).contains(&self.reserve_fraction) {
            return Err(invalid("reserve_fraction must lie in [0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid("alpha must lie in [0, 1]"));
        }
        if self.team_size == 0 || self.team_size > MAX_TEAM_SIZE {
            return Err(invalid("team_size must be between 1 and 7"));
        }
        if self.opponent_count() > MAX_TEAM_SIZE {
            return Err(invalid("at most 7 opponents"));
        }
        if self.catalog.len() < self.team_size || self.catalog.len() > usize::from(u8::MAX) {
            return Err(invalid("the task catalog needs at least one task per robot"));
        }
        if self.catalog.iter().filter(|t| t.mandatory).count() > self.team_size {
            return Err(invalid("more mandatory tasks than robots"));
        }
        if !self.contexts.iter().any(|c| c.condition == crate::task_assignment::ContextCondition::Always) {
            return Err(invalid("one context must have the Always condition"));
        }
        if !(self.field.length > 0.0 && self.field.width > 0.0) {
            return Err(invalid("field dimensions must be positive"));
        }
        if !(self.physics.robot_speed >= 0.0 && self.physics.ball_friction >= 0.0) {
            return Err(invalid("speeds and friction must be non-negative"));
        }
        Ok(())
    }

    pub fn opponent_count(&self) -> usize {
        self.opponents.unwrap_or(self.team_size)
    }

    pub fn tick_count(&self) -> u64 {
        libm::round(self.match_len / self.tick) as u64
    }

    /// Seconds between a robot's packets in fixed-rate mode.
    pub fn fixed_rate_interval(&self) -> f64 {
        let per_robot = f64::from(self.total_budget) / self.team_size as f64;
        self.match_len / per_robot
    }

    /// Each robot's share of the team budget.
    pub fn robot_budget(&self) -> u32 {
        self.total_budget / self.team_size as u32
    }

    pub fn coordinate_options(&self) -> CoordinateOptions {
        CoordinateOptions {
            use_voronoi: self.mode == Mode::EventVoronoi,
            alpha: self.alpha,
            field: self.field,
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Independent random streams, so that e.g. the number of packets sent
/// does not shift the perception noise.
const STREAM_WORLD: u64 = 0;
const STREAM_SENSE: u64 = 1;
const STREAM_CHANNEL: u64 = 2;
const STREAM_WHISTLE: u64 = 3;

/// A match in progress.
pub struct Match {
    pub config: SimConfig,
    pub world: WorldState,
    pub agents: Vec<Agent>,
    pub metrics: MatchMetrics,
    queue: Vec<Packet>,
    tick_index: u64,
    world_rng: ChaCha8Rng,
    sense_rng: ChaCha8Rng,
    channel_rng: ChaCha8Rng,
    whistle_rng: ChaCha8Rng,
    whistle_pending: bool,
}

impl Match {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let world = WorldState::kickoff(&config);
        let agents = (0..config.team_size)
            .map(|i| Agent::new(RobotId(i as u8), &world, &config))
            .collect();
        let metrics = MatchMetrics::new(&config);
        Ok(Match {
            world_rng: config.rng(STREAM_WORLD),
            sense_rng: config.rng(STREAM_SENSE),
            channel_rng: config.rng(STREAM_CHANNEL),
            whistle_rng: config.rng(STREAM_WHISTLE),
            config,
            world,
            agents,
            metrics,
            queue: Vec::new(),
            tick_index: 0,
            whistle_pending: false,
        })
    }

    pub fn is_over(&self) -> bool {
        self.tick_index >= self.config.tick_count()
    }

    pub fn tick_index(&self) -> u64 {
        self.tick_index
    }

    /// Each agent's current plan, by robot id.
    pub fn coordinations(&self) -> Vec<Option<&Coordination>> {
        self.agents.iter().map(|a| a.coordination.as_ref()).collect()
    }

    /// Runs one tick.
    pub fn tick(&mut self) -> Result<(), SimError> {
        let cfg = &self.config;
        let k = self.tick_index;
        let now = k as f64 * cfg.tick;
        let dt = if k == 0 { 0.0 } else { cfg.tick };

        let heard: Vec<bool> = (0..cfg.team_size)
            .map(|_| self.whistle_pending && rand::Rng::random_bool(&mut self.whistle_rng, cfg.whistle_hearing))
            .collect();
        self.whistle_pending = false;

        let mut commands = Vec::with_capacity(self.world.robots.len());
        let mut roles = Vec::with_capacity(cfg.team_size);
        for (i, agent) in self.agents.iter_mut().enumerate() {
            let bundle = sense(&self.world, i, &cfg.perception, now, &mut self.sense_rng);
            agent.perceive(&bundle, heard[i], now, dt, cfg)?;
            agent.replay(k, dt, cfg)?;
            agent.plan(now, cfg)?;
            roles.push(agent.role());
            commands.push(agent.command(cfg));
        }
        self.metrics.record_tick(&roles, now);

        for agent in self.agents.iter_mut() {
            for bytes in agent.broadcast(k, now, cfg) {
                self.metrics.record_packet(&bytes);
                self.queue.push(Packet {
                    sent_tick: k,
                    sender: agent.id,
                    bytes,
                });
            }
        }
        let delivered = channel_deliver(
            &mut self.queue,
            k,
            cfg.packet_loss,
            cfg.delay_ticks,
            &mut self.channel_rng,
        );
        self.metrics.packets_delivered += delivered.len() as u32;
        for p in &delivered {
            for agent in self.agents.iter_mut().filter(|a| a.id != p.sender) {
                agent.receive(p);
            }
        }

        commands.extend(world::opponent_commands(&self.world, cfg));
        let outcome = step(&mut self.world, &commands, cfg, &mut self.world_rng);
        if outcome.goal.is_some() {
            self.metrics.record_goal(outcome.goal == Some(Team::Ours));
            self.whistle_pending = true;
        }
        self.tick_index += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<MatchMetrics, SimError> {
        while !self.is_over() {
            self.tick()?;
        }
        self.metrics.close(self.config.tick_count() as f64 * self.config.tick);
        Ok(self.metrics)
    }
}

/// Plays a whole match.
pub fn run_match(config: &SimConfig) -> Result<MatchMetrics, SimError> {
    Match::new(config.clone())?.finish()
}
