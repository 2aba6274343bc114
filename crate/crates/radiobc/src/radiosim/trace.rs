//! Full per-slot record of a simulation run, plus the derived completion and
//! termination bookkeeping.

use super::instance::Message;
use super::Action;
use crate::Label;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Everything observable in one slot: who transmitted what, and which
/// receivers got a successful delivery. Nodes absent from `transmits` acted
/// as receivers unless already inactive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotRecord {
    /// Sorted by transmitter label.
    pub transmits: Vec<(Label, Arc<[Message]>)>,
    /// Sorted by receiver label.
    pub deliveries: Vec<(Label, Vec<Message>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Every node acted Inactive; nothing can change afterwards.
    AllInactive,
    /// The protocol reported it will never transmit again.
    Quiescent,
    /// The slot budget ran out.
    Horizon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    pub n: usize,
    pub slots: Vec<SlotRecord>,
    /// Per node (index label-1): first-reception slot of each message.
    pub first_rx: Vec<BTreeMap<Message, u64>>,
    /// Per node: first slot at which it acted Inactive.
    pub inactive_from: Vec<Option<u64>>,
    /// Max over (reachable node, message owed to it) of the first-reception
    /// slot; `Some(0)` when nothing is owed.
    pub completion_slot: Option<u64>,
    /// Last slot with any active node, known only when an all-inactive slot
    /// was observed.
    pub termination_slot: Option<u64>,
    pub stop: StopReason,
    pub horizon: u64,
}

impl SimTrace {
    /// The action node `u` took at `slot`, reconstructed from the record.
    pub fn action_at(&self, u: Label, slot: u64) -> Action {
        let rec = &self.slots[slot as usize];
        if let Ok(i) = rec.transmits.binary_search_by_key(&u, |&(l, _)| l) {
            return Action::Transmit(rec.transmits[i].1.clone());
        }
        match self.inactive_from[u - 1] {
            Some(s) if s <= slot => Action::Inactive,
            _ => Action::Receive,
        }
    }

    /// First slot at which `u` received `m` (not counting endowment).
    pub fn first_reception(&self, u: Label, m: Message) -> Option<u64> {
        self.first_rx[u - 1].get(&m).copied()
    }

    /// The run stopped at the horizon without completing.
    pub fn horizon_exceeded(&self) -> bool {
        matches!(self.stop, StopReason::Horizon) && self.completion_slot.is_none()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}
