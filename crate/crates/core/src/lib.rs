//! Distributed role assignment for a team of soccer robots that may only
//! talk through a small per-match packet budget.
//!
//! Every robot keeps its own world model, a predicted copy of each
//! teammate's model that is corrected only by received events, and fuses
//! them. Role assignment is a deterministic function of the fused model, so
//! robots that received the same events agree on who does what.
//!
//! The crate is `no_std` (with `alloc`); file formats and the command line
//! live in the `dta` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod events;
pub mod geometry;
pub mod sim;
pub mod task_assignment;
pub mod world_model;

/// Team-local robot number, 0-based. Robot 0 is the goalkeeper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RobotId(pub u8);

impl core::fmt::Display for RobotId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "robot {}", self.0)
    }
}
