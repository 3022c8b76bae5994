//! Inter-robot messages.
//!
//! Messages are only sent when something worth telling happens (a whistle,
//! the ball reappearing, an estimate drifting away from what teammates
//! believe), each one is charged against a per-match packet budget, and each
//! one fits in 128 bytes on the wire.

mod budget;
mod detect;
mod wire;

use alloc::vec::Vec;

pub use budget::{budget_admit, BudgetState, PACING_FLOOR, PACING_HEADROOM};
pub use detect::{detect_events, DetectorMemory, DetectorParams};
pub use wire::{decode_event, encode_event, WireError, HEADER_LEN, MAX_PACKET_LEN};

use crate::geometry::Point2;
use crate::RobotId;

/// Most obstacles one packet may carry.
pub const MAX_WIRE_OBSTACLES: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EventKind {
    Whistle = 0,
    BallFound = 1,
    BallUpdate = 2,
    PoseUpdate = 3,
    ObstacleUpdate = 4,
    ContextChange = 5,
}

impl EventKind {
    pub const ALL: [EventKind; 6] = [
        EventKind::Whistle,
        EventKind::BallFound,
        EventKind::BallUpdate,
        EventKind::PoseUpdate,
        EventKind::ObstacleUpdate,
        EventKind::ContextChange,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<EventKind> {
        EventKind::ALL.get(usize::from(code)).copied()
    }

    /// Admission class: 1 may dip into the reserve, 2 and 3 are paced.
    pub fn priority(self) -> u8 {
        match self {
            EventKind::Whistle | EventKind::BallFound | EventKind::ContextChange => 1,
            EventKind::BallUpdate => 2,
            EventKind::PoseUpdate | EventKind::ObstacleUpdate => 3,
        }
    }
}

/// A position quantized to whole millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WirePoint {
    pub x_mm: i16,
    pub y_mm: i16,
}

impl WirePoint {
    pub fn quantize(p: Point2) -> Result<WirePoint, WireError> {
        Ok(WirePoint {
            x_mm: quantize_i16(p.x, 1000.0)?,
            y_mm: quantize_i16(p.y, 1000.0)?,
        })
    }

    pub fn to_point(self) -> Point2 {
        Point2::new(f64::from(self.x_mm) / 1000.0, f64::from(self.y_mm) / 1000.0)
    }
}

fn quantize_i16(value: f64, scale: f64) -> Result<i16, WireError> {
    let q = libm::round(value * scale);
    if !(f64::from(i16::MIN)..=f64::from(i16::MAX)).contains(&q) {
        return Err(WireError::ValueOutOfRange { value });
    }
    Ok(q as i16)
}

/// Ball position (mm), velocity (mm/s) and age since last sighting (cs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BallPayload {
    pub position: WirePoint,
    pub velocity: WirePoint,
    pub age_cs: u16,
}

impl BallPayload {
    /// Quantizes a ball estimate. Ages beyond the `u16` range saturate.
    pub fn quantize(position: Point2, velocity: Point2, age_s: f64) -> Result<Self, WireError> {
        let age = libm::round(age_s.max(0.0) * 100.0).min(f64::from(u16::MAX));
        Ok(BallPayload {
            position: WirePoint::quantize(position)?,
            velocity: WirePoint::quantize(velocity)?,
            age_cs: age as u16,
        })
    }

    pub fn age_seconds(&self) -> f64 {
        f64::from(self.age_cs) / 100.0
    }
}

/// Robot position (mm) and heading (mrad).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PosePayload {
    pub position: WirePoint,
    pub heading_mrad: i16,
}

impl PosePayload {
    pub fn quantize(position: Point2, heading: f64) -> Result<Self, WireError> {
        Ok(PosePayload {
            position: WirePoint::quantize(position)?,
            heading_mrad: quantize_i16(heading, 1000.0)?,
        })
    }

    pub fn heading_radians(&self) -> f64 {
        f64::from(self.heading_mrad) / 1000.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Whistle,
    BallFound(BallPayload),
    BallUpdate(BallPayload),
    PoseUpdate(PosePayload),
    ObstacleUpdate(Vec<WirePoint>),
    ContextChange(u8),
}

impl Payload {
    pub fn kind(&self) -> EventKind {
        match self {
            Payload::Whistle => EventKind::Whistle,
            Payload::BallFound(_) => EventKind::BallFound,
            Payload::BallUpdate(_) => EventKind::BallUpdate,
            Payload::PoseUpdate(_) => EventKind::PoseUpdate,
            Payload::ObstacleUpdate(_) => EventKind::ObstacleUpdate,
            Payload::ContextChange(_) => EventKind::ContextChange,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub sender: RobotId,
    pub seq: u16,
    /// Milliseconds since match start.
    pub timestamp_ms: u32,
    pub payload: Payload,
}

impl Event {
    pub fn new(sender: RobotId, seq: u16, timestamp_ms: u32, payload: Payload) -> Self {
        Event {
            sender,
            seq,
            timestamp_ms,
            payload,
        }
    }

    pub fn kind(&self) -> EventKind {
        self.payload.kind()
    }
}

/// Converts a match clock reading in seconds to wire milliseconds.
pub fn clock_ms(seconds: f64) -> u32 {
    libm::round(seconds.max(0.0) * 1000.0) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantization_rounds_to_millimeters() {
        let p = WirePoint::quantize(Point2::new(1.2344, -0.0005)).unwrap();
        assert_eq!(p, WirePoint { x_mm: 1234, y_mm: -1 });
        assert!(matches!(
            WirePoint::quantize(Point2::new(32.768, 0.0)),
            Err(WireError::ValueOutOfRange { .. })
        ));
        assert!(WirePoint::quantize(Point2::new(32.767, -32.768)).is_ok());
    }

    #[test]
    fn ball_age_saturates() {
        let b = BallPayload::quantize(Point2::ORIGIN, Point2::ORIGIN, 1e6).unwrap();
        assert_eq!(b.age_cs, u16::MAX);
    }

    #[test]
    fn priorities() {
        assert_eq!(EventKind::Whistle.priority(), 1);
        assert_eq!(EventKind::BallFound.priority(), 1);
        assert_eq!(EventKind::ContextChange.priority(), 1);
        assert_eq!(EventKind::BallUpdate.priority(), 2);
        assert_eq!(EventKind::PoseUpdate.priority(), 3);
        assert_eq!(EventKind::ObstacleUpdate.priority(), 3);
    }
}
