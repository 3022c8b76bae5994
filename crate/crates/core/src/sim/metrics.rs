use alloc::vec::Vec;

use super::{Mode, SimConfig};
use crate::task_assignment::Role;
use crate::RobotId;

/// A stretch of time during which `robot` believed it held `role`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoleSpan {
    pub robot: RobotId,
    pub role: Role,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchMetrics {
    pub seed: u64,
    pub mode: Mode,
    pub match_len: f64,
    pub tick: f64,
    /// Ticks during which two or more robots held the role, by `Role::ALL` index.
    pub overlap_ticks: [u64; 7],
    /// Packets our team put on the air.
    pub packets_sent: u32,
    /// Packets sent, by event kind code.
    pub packets_by_kind: [u32; 6],
    /// Packets that survived the channel.
    pub packets_delivered: u32,
    pub max_packet_len: usize,
    pub goals_for: u32,
    pub goals_against: u32,
    /// Run-length encoded role beliefs, closed spans only.
    pub timeline: Vec<RoleSpan>,
    open: Vec<Option<(Role, f64)>>,
}

impl MatchMetrics {
    pub fn new(cfg: &SimConfig) -> Self {
        MatchMetrics {
            seed: cfg.seed,
            mode: cfg.mode,
            match_len: cfg.match_len,
            tick: cfg.tick,
            overlap_ticks: [0; 7],
            packets_sent: 0,
            packets_by_kind: [0; 6],
            packets_delivered: 0,
            max_packet_len: 0,
            goals_for: 0,
            goals_against: 0,
            timeline: Vec::new(),
            open: alloc::vec![None; cfg.team_size],
        }
    }

    /// Seconds during which two or more robots held `role`.
    pub fn overlap_s(&self, role: Role) -> f64 {
        self.overlap_ticks[role_index(role)] as f64 * self.tick
    }

    pub fn total_overlap_s(&self) -> f64 {
        self.overlap_ticks.iter().sum::<u64>() as f64 * self.tick
    }

    pub(crate) fn record_tick(&mut self, roles: &[Option<Role>], now: f64) {
        let mut holders = [0usize; 7];
        for role in roles.iter().flatten() {
            holders[role_index(*role)] += 1;
        }
        for (ticks, count) in self.overlap_ticks.iter_mut().zip(holders) {
            if count >= 2 {
                *ticks += 1;
            }
        }
        for (i, role) in roles.iter().enumerate() {
            let current = self.open[i].map(|(r, _)| r);
            if current == *role {
                continue;
            }
            if let Some((r, start)) = self.open[i].take() {
                self.timeline.push(RoleSpan {
                    robot: RobotId(i as u8),
                    role: r,
                    start,
                    end: now,
                });
            }
            self.open[i] = role.map(|r| (r, now));
        }
    }

    pub(crate) fn record_packet(&mut self, bytes: &[u8]) {
        self.packets_sent += 1;
        self.max_packet_len = self.max_packet_len.max(bytes.len());
        if let Some(count) = bytes.get(1).and_then(|&k| self.packets_by_kind.get_mut(usize::from(k))) {
            *count += 1;
        }
    }

    pub(crate) fn record_goal(&mut self, ours: bool) {
        if ours {
            self.goals_for += 1;
        } else {
            self.goals_against += 1;
        }
    }

    /// Closes every open span at `end`.
    pub(crate) fn close(&mut self, end: f64) {
        for (i, open) in self.open.iter_mut().enumerate() {
            if let Some((role, start)) = open.take() {
                self.timeline.push(RoleSpan {
                    robot: RobotId(i as u8),
                    role,
                    start,
                    end,
                });
            }
        }
        self.timeline
            .sort_by(|a, b| a.start.total_cmp(&b.start).then(a.robot.cmp(&b.robot)));
    }

    /// Spans of `role`, as `(start, end)`.
    pub fn spans(&self, role: Role) -> Vec<(f64, f64)> {
        self.timeline
            .iter()
            .filter(|s| s.role == role)
            .map(|s| (s.start, s.end))
            .collect()
    }
}

fn role_index(role: Role) -> usize {
    Role::ALL.iter().position(|&r| r == role).expect("every role is listed")
}

/// Total time covered by at least two of `spans`.
pub fn overlap_seconds(spans: &[(f64, f64)]) -> f64 {
    let mut edges: Vec<(f64, i32)> = spans
        .iter()
        .filter(|(s, e)| e > s)
        .flat_map(|&(s, e)| [(s, 1), (e, -1)])
        .collect();
    // Ends before starts at the same instant: touching spans do not overlap.
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut active = 0;
    let mut since = 0.0;
    let mut total = 0.0;
    for (t, d) in edges {
        if active >= 2 {
            total += t - since;
        }
        active += d;
        since = t;
    }
    total
}
