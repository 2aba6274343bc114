//! Multi-broadcast protocols over strongly-selective families.
//!
//! Bounded bandwidth: each node keeps a priority queue keyed by message
//! identity (source, seq); at every phase start it extracts the highest
//! priority message and offers it at its scheduled slots. Unbounded
//! bandwidth: informed nodes transmit their whole known set when scheduled.

use super::{check_strong_claim, sorted_payload, ProtocolError, ProtocolSchedule};
use crate::radiosim::{Action, Message};
use crate::setfam::SetFamily;
use crate::Label;
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::sync::Arc;

pub struct MultiBb {
    name: String,
    fam: Arc<SetFamily>,
    set_count: u64,
    queues: Vec<BinaryHeap<Reverse<Message>>>,
    seen: Vec<BTreeSet<Message>>,
    held: Vec<Option<Message>>,
    extracted_phase: Vec<Option<u64>>,
    nonempty_queues: usize,
}

/// `fam` must be (n, Δ+1)-strongly-selective.
pub fn multi_bb_broad_a(
    n: usize,
    delta: usize,
    fam: Arc<SetFamily>,
) -> Result<MultiBb, ProtocolError> {
    check_strong_claim(&fam, n, delta + 1)?;
    Ok(MultiBb {
        name: format!("multi-bb-broad-a(n={n},delta={delta})"),
        set_count: fam.len() as u64,
        fam,
        queues: Vec::new(),
        seen: Vec::new(),
        held: Vec::new(),
        extracted_phase: Vec::new(),
        nonempty_queues: 0,
    })
}

impl MultiBb {
    fn extract_if_new_phase(&mut self, node: Label, phase: u64) {
        if self.extracted_phase[node - 1] != Some(phase) {
            self.extracted_phase[node - 1] = Some(phase);
            let was_nonempty = !self.queues[node - 1].is_empty();
            self.held[node - 1] = self.queues[node - 1].pop().map(|Reverse(m)| m);
            if was_nonempty && self.queues[node - 1].is_empty() {
                self.nonempty_queues -= 1;
            }
        }
    }
}

impl ProtocolSchedule for MultiBb {
    fn name(&self) -> &str {
        &self.name
    }

    fn begin(&mut self, n: usize, endowments: &[(Label, Vec<Message>)]) {
        self.queues = (0..n).map(|_| BinaryHeap::new()).collect();
        self.seen = vec![BTreeSet::new(); n];
        self.held = vec![None; n];
        self.extracted_phase = vec![None; n];
        for (label, msgs) in endowments {
            for &m in msgs {
                self.seen[label - 1].insert(m);
                self.queues[label - 1].push(Reverse(m));
            }
        }
        self.nonempty_queues = self.queues.iter().filter(|q| !q.is_empty()).count();
    }

    fn act(&mut self, node: Label, slot: u64) -> Action {
        let phase = slot / self.set_count;
        self.extract_if_new_phase(node, phase);
        let j = (slot % self.set_count) as usize;
        match self.held[node - 1] {
            Some(m) if self.fam.set(j).contains(node) => Action::transmit_one(m),
            _ => Action::Receive,
        }
    }

    fn observe(&mut self, node: Label, _slot: u64, delivered: &[Message]) {
        for &m in delivered {
            if self.seen[node - 1].insert(m) {
                if self.queues[node - 1].is_empty() {
                    self.nonempty_queues += 1;
                }
                self.queues[node - 1].push(Reverse(m));
            }
        }
    }

    /// At a phase boundary with every queue empty nothing is held next phase,
    /// so no transmission can ever happen again.
    fn is_quiescent(&self, next_slot: u64) -> bool {
        next_slot.is_multiple_of(self.set_count) && next_slot > 0 && self.nonempty_queues == 0
    }

    fn phase_of_slot(&self, slot: u64) -> Option<u64> {
        Some(slot / self.set_count)
    }
}

pub struct MultiUb {
    name: String,
    fam: Arc<SetFamily>,
    set_count: u64,
    known: Vec<BTreeSet<Message>>,
    payload: Vec<Option<Arc<[Message]>>>,
}

/// `fam` must be (n, Δ+1)-strongly-selective; unbounded-bandwidth channel.
pub fn multi_ub_broad(
    n: usize,
    delta: usize,
    fam: Arc<SetFamily>,
) -> Result<MultiUb, ProtocolError> {
    check_strong_claim(&fam, n, delta + 1)?;
    Ok(MultiUb {
        name: format!("multi-ub-broad(n={n},delta={delta})"),
        set_count: fam.len() as u64,
        fam,
        known: Vec::new(),
        payload: Vec::new(),
    })
}

impl ProtocolSchedule for MultiUb {
    fn name(&self) -> &str {
        &self.name
    }

    fn begin(&mut self, n: usize, endowments: &[(Label, Vec<Message>)]) {
        self.known = vec![BTreeSet::new(); n];
        self.payload = vec![None; n];
        for (label, msgs) in endowments {
            self.known[label - 1].extend(msgs.iter().copied());
        }
    }

    fn act(&mut self, node: Label, slot: u64) -> Action {
        let j = (slot % self.set_count) as usize;
        if !self.known[node - 1].is_empty() && self.fam.set(j).contains(node) {
            let payload = self.payload[node - 1]
                .get_or_insert_with(|| sorted_payload(&self.known[node - 1]))
                .clone();
            Action::Transmit(payload)
        } else {
            Action::Receive
        }
    }

    fn observe(&mut self, node: Label, _slot: u64, delivered: &[Message]) {
        let before = self.known[node - 1].len();
        self.known[node - 1].extend(delivered.iter().copied());
        if self.known[node - 1].len() != before {
            self.payload[node - 1] = None;
        }
    }

    fn phase_of_slot(&self, slot: u64) -> Option<u64> {
        Some(slot / self.set_count)
    }
}
