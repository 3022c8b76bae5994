use alloc::vec::Vec;

use super::{clock_ms, BallPayload, Event, Payload, PosePayload, WirePoint, MAX_WIRE_OBSTACLES};
use crate::world_model::{normalize_angle, DistributedWorldModel, LocalModel};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct DetectorParams {
    /// Seconds without any team sighting after which the ball counts as lost.
    pub lost_after: f64,
    /// Ball drift from the teammate-visible estimate that triggers an update, m.
    pub ball_deviation: f64,
    /// Only sightings younger than this are worth broadcasting, s.
    pub fresh_ball_age: f64,
    /// A robot that sees the ball re-sends it once the whole team's
    /// freshest report is this old, s. Keeps a resting ball from going lost.
    pub ball_refresh_after: f64,
    /// Per robot id delay on team-wide news (ball found or refreshed, new
    /// context, whistle), so one robot speaks and the rest hear it before their own
    /// turn, s.
    pub stagger: f64,
    pub pose_distance: f64,
    pub pose_angle: f64,
    /// Own obstacle components lighter than this are not broadcast.
    pub obstacle_weight: f64,
    /// Obstacle drift that triggers an update, m.
    pub obstacle_deviation: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            lost_after: 5.0,
            ball_deviation: 0.5,
            fresh_ball_age: 1.0,
            ball_refresh_after: 3.0,
            stagger: 0.25,
            pose_distance: 0.5,
            pose_angle: 0.3,
            obstacle_weight: 0.2,
            obstacle_deviation: 1.0,
        }
    }
}

/// What a sender remembers about past broadcasts. Everything else ("what
/// do my teammates believe about me") is read from its own entry in the
/// distributed model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorMemory {
    pub next_seq: u16,
    /// Last context announced on the team channel, by anyone.
    pub last_context: u8,
    /// The locally selected context and since when, s.
    pub selected: (u8, f64),
}

impl DetectorMemory {
    pub fn new(initial_context: u8) -> Self {
        DetectorMemory {
            next_seq: 0,
            last_context: initial_context,
            selected: (initial_context, 0.0),
        }
    }

    /// Notes the context chosen at `now`.
    pub fn select(&mut self, context_id: u8, now: f64) {
        if self.selected.0 != context_id {
            self.selected = (context_id, now);
        }
    }

    /// Records that `event` was actually sent.
    pub fn commit(&mut self, event: &Event) {
        self.next_seq = event.seq.wrapping_add(1);
        self.hear(event);
    }

    /// Records a teammate's broadcast.
    pub fn hear(&mut self, event: &Event) {
        if let Payload::ContextChange(id) = event.payload {
            self.last_context = id;
        }
    }
}

/// Lists the events `lm` should broadcast at `now`, in kind-code order.
///
/// `dwm` must contain the teammate-visible reconstruction of `lm.owner`
/// (built from that robot's own sent events), which is what the ball and
/// pose triggers compare against. The context announced is the one last
/// passed to [`DetectorMemory::select`]; robot `i` waits `i * stagger`
/// before announcing it. Candidates carry consecutive sequence numbers;
/// call [`DetectorMemory::commit`] for each one actually sent.
pub fn detect_events(
    lm: &LocalModel,
    dwm: &DistributedWorldModel,
    memory: &DetectorMemory,
    whistle_heard: bool,
    now: f64,
    params: &DetectorParams,
) -> Vec<Event> {
    let mut payloads = Vec::new();
    let seen = dwm.model(lm.owner);
    let wait = params.stagger * f64::from(lm.owner.0);

    if whistle_heard {
        payloads.push(Payload::Whistle);
    }

    let ball = || BallPayload::quantize(lm.ball.position, lm.ball.velocity, lm.ball.last_seen_age).ok();
    let found = lm.ball.last_seen_age == 0.0 && dwm.min_ball_age() > params.lost_after + wait;
    if found {
        payloads.extend(ball().map(Payload::BallFound));
    } else if lm.ball.last_seen_age < params.fresh_ball_age {
        let drifted = seen.is_none_or(|s| s.ball.position.distance(lm.ball.position) > params.ball_deviation);
        let refresh_at = params.ball_refresh_after + wait;
        if drifted || dwm.min_ball_age() > refresh_at {
            payloads.extend(ball().map(Payload::BallUpdate));
        }
    }

    let pose_moved = seen.is_none_or(|s| {
        s.pose.position.distance(lm.pose.position) > params.pose_distance
            || libm::fabs(normalize_angle(s.pose.heading - lm.pose.heading)) > params.pose_angle
    });
    if pose_moved {
        payloads.extend(
            PosePayload::quantize(lm.pose.position, lm.pose.heading)
                .ok()
                .map(Payload::PoseUpdate),
        );
    }

    if let Some(points) = obstacle_update(lm, seen, params) {
        payloads.push(Payload::ObstacleUpdate(points));
    }

    let (context_id, since) = memory.selected;
    if context_id != memory.last_context && now - since >= wait - 1e-9 {
        payloads.push(Payload::ContextChange(context_id));
    }

    let t = clock_ms(now);
    payloads
        .into_iter()
        .enumerate()
        .map(|(i, p)| Event::new(lm.owner, memory.next_seq.wrapping_add(i as u16), t, p))
        .collect()
}

/// Own confident opponent sightings, if teammates' picture of them is off:
/// one is missing or misplaced, or teammates track one that is gone.
fn obstacle_update(lm: &LocalModel, seen: Option<&LocalModel>, params: &DetectorParams) -> Option<Vec<WirePoint>> {
    let mut mine: Vec<_> = lm
        .obstacles
        .opponents()
        .filter(|c| c.weight >= params.obstacle_weight)
        .collect();
    mine.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    mine.truncate(MAX_WIRE_OBSTACLES);
    let theirs: Vec<_> = seen.map_or_else(Vec::new, |s| s.obstacles.opponents().map(|c| c.mean).collect());

    let r = params.obstacle_deviation;
    let missing = mine.iter().any(|c| theirs.iter().all(|p| p.distance(c.mean) > r));
    let gone = theirs
        .iter()
        .any(|&p| lm.obstacles.components.iter().all(|c| c.mean.distance(p) > r));
    if !(missing || gone) {
        return None;
    }
    mine.iter().map(|c| WirePoint::quantize(c.mean).ok()).collect()
}
