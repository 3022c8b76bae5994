use alloc::vec::Vec;

use nalgebra::Matrix3;

use super::channel::Packet;
use super::world::{Command, Look, WorldState};
use super::{Mode, SimConfig, SimError};
use crate::events::{budget_admit, clock_ms, decode_event, detect_events, encode_event, BallPayload, BudgetState};
use crate::events::{DetectorMemory, Event, Payload, PosePayload};
use crate::geometry::Point2;
use crate::task_assignment::{coordinate, Coordination, Role};
use crate::world_model::{delta_update, fuse, psi_update, BallEstimate, DistributedWorldModel, LocalModel};
use crate::world_model::{ObstacleModel, RobotPose, SensorBundle};
use crate::RobotId;

/// A striker chases its own sighting while it is younger than this, s.
const CHASE_OWN_SIGHTING: f64 = 1.0;
/// After this long without a sighting the robot turns on the spot, s.
const SCAN_AFTER: f64 = 3.0;
const SCAN_RATE: f64 = 1.0;

/// One robot's decision maker.
#[derive(Debug, Clone)]
pub struct Agent {
    pub id: RobotId,
    /// Own estimate of the world.
    pub lm: LocalModel,
    /// Reconstruction of every teammate's model, own included, driven only
    /// by broadcast events.
    pub olms: Vec<LocalModel>,
    pub dwm: Option<DistributedWorldModel>,
    pub coordination: Option<Coordination>,
    pub memory: DetectorMemory,
    pub budget: BudgetState,
    /// Decoded events waiting for the next replay, in arrival order.
    inbox: Vec<Event>,
    /// Own sent events and the tick at which teammates will apply them.
    loopback: Vec<(u64, Event)>,
    /// When to announce a whistle this robot heard, unless a teammate
    /// does first.
    whistle_due: Option<f64>,
    next_fixed: f64,
    fixed_sends_ball: bool,
}

/// The model everybody starts with for robot `id`: its lineup pose and the
/// ball on the center mark.
fn kickoff_model(id: RobotId, world: &WorldState, cfg: &SimConfig) -> LocalModel {
    let r = &world.robots[usize::from(id.0)];
    let v = cfg.world_model.kickoff_ball_variance;
    LocalModel {
        owner: id,
        ball: BallEstimate::at_rest(world.ball.position, v, v),
        obstacles: ObstacleModel::default(),
        pose: RobotPose::new(r.position, r.heading, Matrix3::identity() * 1e-4),
        timestamp: 0.0,
    }
}

impl Agent {
    pub fn new(id: RobotId, world: &WorldState, cfg: &SimConfig) -> Agent {
        let olms = (0..cfg.team_size)
            .map(|j| kickoff_model(RobotId(j as u8), world, cfg))
            .collect();
        // Fixed-rate traffic has no priority-1 events to hold a reserve for.
        let reserve = if cfg.mode.uses_events() { cfg.reserve_fraction } else { 0.0 };
        let interval = cfg.fixed_rate_interval();
        Agent {
            id,
            lm: kickoff_model(id, world, cfg),
            olms,
            dwm: None,
            coordination: None,
            memory: DetectorMemory::new(default_context_id(cfg)),
            budget: BudgetState::new(cfg.robot_budget(), reserve),
            inbox: Vec::new(),
            loopback: Vec::new(),
            whistle_due: None,
            next_fixed: interval * f64::from(id.0) / cfg.team_size as f64,
            fixed_sends_ball: id.0.is_multiple_of(2),
        }
    }

    /// Folds this tick's perception into the own model.
    pub fn perceive(&mut self, bundle: &SensorBundle, heard_whistle: bool, now: f64, dt: f64, cfg: &SimConfig) -> Result<(), SimError> {
        let mut bundle = bundle.clone();
        bundle.timestamp = self.lm.timestamp + dt;
        self.lm = psi_update(&self.lm, &bundle, dt, &cfg.world_model)?;
        if heard_whistle {
            let v = cfg.world_model.kickoff_ball_variance;
            self.lm.ball = BallEstimate::at_rest(Point2::ORIGIN, v, v);
            self.whistle_due = Some(now + cfg.detector.stagger * f64::from(self.id.0));
        }
        Ok(())
    }

    /// Advances every teammate model, applying queued events, then fuses.
    pub fn replay(&mut self, tick: u64, dt: f64, cfg: &SimConfig) -> Result<(), SimError> {
        let mut inbox = core::mem::take(&mut self.inbox);
        let due = self.loopback.iter().take_while(|(at, _)| *at <= tick).count();
        inbox.extend(self.loopback.drain(..due).map(|(_, e)| e));
        for olm in self.olms.iter_mut() {
            let owner = olm.owner;
            let mut step = dt;
            let mut applied = false;
            for e in inbox.iter().filter(|e| e.sender == owner) {
                *olm = delta_update(olm, Some(e), step, &cfg.world_model)?;
                step = 0.0;
                applied = true;
            }
            if !applied {
                *olm = delta_update(olm, None, dt, &cfg.world_model)?;
            }
        }
        self.dwm = Some(fuse(&self.olms, cfg.team_size, &cfg.world_model)?);
        Ok(())
    }

    /// Runs the local auction on the fused model.
    pub fn plan(&mut self, now: f64, cfg: &SimConfig) -> Result<(), SimError> {
        let dwm = self.dwm.as_ref().expect("replay runs before plan");
        let previous = self.coordination.as_ref().map(|c| &c.assignment);
        let next = coordinate(dwm, &cfg.contexts, &cfg.catalog, previous, &cfg.coordinate_options())?;
        self.memory.select(next.context, now);
        self.coordination = Some(next);
        Ok(())
    }

    pub fn role(&self) -> Option<Role> {
        self.coordination.as_ref()?.task_for(self.id).map(|t| t.role)
    }

    /// Where to walk and look.
    pub fn command(&self, _cfg: &SimConfig) -> Command {
        let task = self.coordination.as_ref().and_then(|c| c.task_for(self.id));
        let ball = &self.lm.ball;
        let striker = task.is_some_and(|t| t.role == Role::Striker);
        let target = match task {
            Some(_) if striker && ball.last_seen_age < CHASE_OWN_SIGHTING => ball.position,
            Some(t) => t.target,
            None => self.lm.pose.position,
        };
        let look = if ball.last_seen_age < SCAN_AFTER {
            Look::At(ball.position)
        } else {
            Look::Spin(SCAN_RATE)
        };
        Command {
            target,
            look,
            kicks: striker,
        }
    }

    /// Picks, admits and encodes this tick's packets. Each admitted event
    /// is also queued for the agent's own model of itself, to be applied on
    /// the same tick as teammates apply it when the channel keeps its
    /// nominal delay.
    pub fn broadcast(&mut self, tick: u64, now: f64, cfg: &SimConfig) -> Vec<Vec<u8>> {
        let whistle = self.whistle_due.is_some_and(|t| now + 1e-9 >= t);
        let candidates = match cfg.mode {
            Mode::FixedRate => self.fixed_rate_event(now, cfg).into_iter().collect(),
            Mode::EventBased | Mode::EventVoronoi => {
                let Some(dwm) = &self.dwm else {
                    return Vec::new();
                };
                detect_events(&self.lm, dwm, &self.memory, whistle, now, &cfg.detector)
            }
        };
        if whistle {
            self.whistle_due = None;
        }
        let mut out = Vec::new();
        for mut event in candidates {
            // Sequence numbers only advance for packets actually sent.
            event.seq = self.memory.next_seq;
            let (admit, budget) = budget_admit(self.budget, &event, now, cfg.match_len);
            if !admit {
                continue;
            }
            let Ok(bytes) = encode_event(&event) else {
                continue;
            };
            self.budget = budget;
            self.memory.commit(&event);
            if let Ok(own) = decode_event(&bytes) {
                self.loopback.push((tick + u64::from(cfg.delay_ticks) + 1, own));
            }
            out.push(bytes);
        }
        out
    }

    fn fixed_rate_event(&mut self, now: f64, cfg: &SimConfig) -> Option<Event> {
        if now + 1e-9 < self.next_fixed {
            return None;
        }
        self.next_fixed += cfg.fixed_rate_interval();
        let send_ball = self.fixed_sends_ball;
        self.fixed_sends_ball = !send_ball;
        let payload = if send_ball {
            let b = &self.lm.ball;
            Payload::BallUpdate(BallPayload::quantize(b.position, b.velocity, b.last_seen_age).ok()?)
        } else {
            Payload::PoseUpdate(PosePayload::quantize(self.lm.pose.position, self.lm.pose.heading).ok()?)
        };
        Some(Event::new(self.id, self.memory.next_seq, clock_ms(now), payload))
    }

    /// Queues a packet from a teammate for the next replay.
    pub fn receive(&mut self, packet: &Packet) {
        if let Ok(e) = decode_event(&packet.bytes) {
            self.memory.hear(&e);
            if e.payload == Payload::Whistle {
                self.whistle_due = None;
            }
            self.inbox.push(e);
        }
    }
}

fn default_context_id(cfg: &SimConfig) -> u8 {
    cfg.contexts
        .iter()
        .find(|c| c.condition == crate::task_assignment::ContextCondition::Always)
        .map_or(0, |c| c.id)
}
