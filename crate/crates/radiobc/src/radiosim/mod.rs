//! Slot-synchronous simulation of directed radio networks under the
//! collision rule: a node receives in a slot iff it listens and exactly one
//! of its in-neighbors transmits. Collisions and silence are
//! indistinguishable; there is no collision detection.

mod engine;
mod graph;
mod instance;
mod trace;

pub use engine::{run, step};
pub use graph::{GraphError, RadioGraph};
pub use instance::{BroadcastInstance, ChannelMode, InstanceMetrics, Message};
pub use trace::{SimTrace, SlotRecord, StopReason};

use crate::Label;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("bounded-bandwidth transmission must carry exactly one message (node {node}, slot {slot}, got {got})")]
    BandwidthViolation { node: Label, slot: u64, got: usize },
    #[error("node {node} acted after going inactive at slot {slot}")]
    InactiveReactivated { node: Label, slot: u64 },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
}

/// What a node does in one slot. Transmissions carry the payload along all
/// outgoing edges; payload sharing via `Arc` keeps long unbounded-bandwidth
/// traces cheap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Transmit(Arc<[Message]>),
    Receive,
    Inactive,
}

impl Action {
    pub fn transmit_one(m: Message) -> Self {
        Action::Transmit(Arc::from(vec![m]))
    }

    pub fn is_transmit(&self) -> bool {
        matches!(self, Action::Transmit(_))
    }
}

/// Default experiment horizon: comfortably above every implemented
/// protocol's bound at desk scale.
pub fn default_horizon(n: usize) -> u64 {
    let log = usize::BITS as u64 - (n.max(1) as u64).leading_zeros() as u64;
    let log = if n.is_power_of_two() && n > 1 {
        log - 1
    } else if n <= 1 {
        0
    } else {
        log
    };
    64 * n as u64 * (log + 1) * (log + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizon_formula() {
        // 64 · n · (ceil(log2 n) + 1)^2
        assert_eq!(default_horizon(1), 64);
        assert_eq!(default_horizon(2), 64 * 2 * 4);
        assert_eq!(default_horizon(3), 64 * 3 * 9);
        assert_eq!(default_horizon(4), 64 * 4 * 9);
        assert_eq!(default_horizon(64), 64 * 64 * 49);
    }
}
