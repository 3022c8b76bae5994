//! Packet layout, little-endian throughout:
//!
//! ```text
//! 0      sender id
//! 1      kind code
//! 2..4   seq            u16
//! 4..8   timestamp_ms   u32
//! 8..    payload
//!        Whistle         (empty)
//!        BallFound/      x, y (i16 mm) vx, vy (i16 mm/s) age (u16 cs)   10 bytes
//!        BallUpdate
//!        PoseUpdate      x, y (i16 mm) heading (i16 mrad)                 6 bytes
//!        ObstacleUpdate  count (u8) then count × (x, y i16 mm)    1 + 4·count bytes
//!        ContextChange   context id (u8)                                  1 byte
//! ```

use alloc::vec::Vec;

use super::{BallPayload, Event, EventKind, Payload, PosePayload, WirePoint, MAX_WIRE_OBSTACLES};
use crate::RobotId;

pub const HEADER_LEN: usize = 8;
pub const MAX_PACKET_LEN: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum WireError {
    #[error("{count} obstacles do not fit in one packet (max {MAX_WIRE_OBSTACLES})")]
    PayloadOverflow { count: usize },
    #[error("value {value} does not fit the fixed-point range")]
    ValueOutOfRange { value: f64 },
    #[error("packet truncated: need {needed} bytes, got {got}")]
    TruncatedPacket { needed: usize, got: usize },
    #[error("unknown event kind {0}")]
    UnknownKind(u8),
    #[error("{0} unexpected bytes after the payload")]
    TrailingBytes(usize),
}

pub fn encode_event(event: &Event) -> Result<Vec<u8>, WireError> {
    let mut out = Vec::with_capacity(HEADER_LEN + 10);
    out.push(event.sender.0);
    out.push(event.kind().code());
    out.extend_from_slice(&event.seq.to_le_bytes());
    out.extend_from_slice(&event.timestamp_ms.to_le_bytes());
    match &event.payload {
        Payload::Whistle => {}
        Payload::BallFound(b) | Payload::BallUpdate(b) => {
            put_point(&mut out, b.position);
            put_point(&mut out, b.velocity);
            out.extend_from_slice(&b.age_cs.to_le_bytes());
        }
        Payload::PoseUpdate(p) => {
            put_point(&mut out, p.position);
            out.extend_from_slice(&p.heading_mrad.to_le_bytes());
        }
        Payload::ObstacleUpdate(points) => {
            if points.len() > MAX_WIRE_OBSTACLES {
                return Err(WireError::PayloadOverflow { count: points.len() });
            }
            out.push(points.len() as u8);
            for &p in points {
                put_point(&mut out, p);
            }
        }
        Payload::ContextChange(id) => out.push(*id),
    }
    debug_assert!(out.len() <= MAX_PACKET_LEN);
    Ok(out)
}

fn put_point(out: &mut Vec<u8>, p: WirePoint) {
    out.extend_from_slice(&p.x_mm.to_le_bytes());
    out.extend_from_slice(&p.y_mm.to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], WireError> {
        let end = self.pos + N;
        let slice = self.bytes.get(self.pos..end).ok_or(WireError::TruncatedPacket {
            needed: end,
            got: self.bytes.len(),
        })?;
        self.pos = end;
        let mut buf = [0u8; N];
        buf.copy_from_slice(slice);
        Ok(buf)
    }

    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_le_bytes(self.take()?))
    }

    fn i16(&mut self) -> Result<i16, WireError> {
        Ok(i16::from_le_bytes(self.take()?))
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn point(&mut self) -> Result<WirePoint, WireError> {
        Ok(WirePoint {
            x_mm: self.i16()?,
            y_mm: self.i16()?,
        })
    }

    fn ball(&mut self) -> Result<BallPayload, WireError> {
        Ok(BallPayload {
            position: self.point()?,
            velocity: self.point()?,
            age_cs: self.u16()?,
        })
    }
}

pub fn decode_event(bytes: &[u8]) -> Result<Event, WireError> {
    if bytes.len() < HEADER_LEN {
        return Err(WireError::TruncatedPacket {
            needed: HEADER_LEN,
            got: bytes.len(),
        });
    }
    let mut r = Reader { bytes, pos: 0 };
    let sender = RobotId(r.u8()?);
    let code = r.u8()?;
    let kind = EventKind::from_code(code).ok_or(WireError::UnknownKind(code))?;
    let seq = r.u16()?;
    let timestamp_ms = r.u32()?;
    let payload = match kind {
        EventKind::Whistle => Payload::Whistle,
        EventKind::BallFound => Payload::BallFound(r.ball()?),
        EventKind::BallUpdate => Payload::BallUpdate(r.ball()?),
        EventKind::PoseUpdate => Payload::PoseUpdate(PosePayload {
            position: r.point()?,
            heading_mrad: r.i16()?,
        }),
        EventKind::ObstacleUpdate => {
            let count = usize::from(r.u8()?);
            if count > MAX_WIRE_OBSTACLES {
                return Err(WireError::PayloadOverflow { count });
            }
            let points = (0..count).map(|_| r.point()).collect::<Result<Vec<_>, _>>()?;
            Payload::ObstacleUpdate(points)
        }
        EventKind::ContextChange => Payload::ContextChange(r.u8()?),
    };
    if r.pos != bytes.len() {
        return Err(WireError::TrailingBytes(bytes.len() - r.pos));
    }
    Ok(Event {
        sender,
        seq,
        timestamp_ms,
        payload,
    })
}
