//! BROAD-A: selective-family phases with the informed-last-phase transmit
//! rule that keeps levels synchronized.
//!
//! Local timeline: slot 0 is the source transmission (phase 0); family phase
//! p >= 1 occupies slots [1+(p-1)|F|, p|F|], slot j of a phase using the j-th
//! set. A node transmits in phase p iff it is in the slot's set and first
//! received the message during phase p-1; after its transmit phase it goes
//! inactive.

use super::{check_selective_claim, sorted_payload, ProtocolError, ProtocolSchedule};
use crate::radiosim::{Action, Message};
use crate::setfam::SetFamily;
use crate::Label;
use std::collections::BTreeSet;
use std::sync::Arc;

/// One BROAD-A execution on its own local slot clock.
///
/// Shared by BROAD-A itself and by every execution embedded in BROAD-B and
/// the dovetail protocol: those route their own slots here, so "phase" below
/// is always a local phase of this execution.
pub(crate) struct BroadAExec {
    fam: Arc<SetFamily>,
    set_count: u64,
    /// Per node: the local phase during which its informed flag first became
    /// true (sources are handled separately).
    informed_phase: Vec<Option<u64>>,
    /// Per node: whether any family set schedules it at all. A node outside
    /// every set never transmits and is never deactivated here.
    covered: Vec<bool>,
    /// Local clock: last executed local slot.
    last_slot: Option<u64>,
}

impl BroadAExec {
    pub(crate) fn new(fam: Arc<SetFamily>, network_n: usize) -> Self {
        assert!(!fam.is_empty(), "family must have at least one set");
        let covered = (1..=network_n).map(|l| fam.covers(l)).collect();
        BroadAExec {
            set_count: fam.len() as u64,
            fam,
            informed_phase: vec![None; network_n],
            covered,
            last_slot: None,
        }
    }

    pub(crate) fn reset(&mut self) {
        self.informed_phase.iter_mut().for_each(|p| *p = None);
        self.last_slot = None;
    }

    pub(crate) fn phase_of(&self, slot: u64) -> u64 {
        if slot == 0 {
            0
        } else {
            1 + (slot - 1) / self.set_count
        }
    }

    /// Last local slot of phase `p`.
    fn phase_end(&self, p: u64) -> u64 {
        p * self.set_count
    }

    /// Record that this execution ran local slot `slot`.
    pub(crate) fn on_slot(&mut self, slot: u64) {
        self.last_slot = Some(slot);
    }

    /// The phase a delivery lands in right now: the phase of the most
    /// recently executed local slot (0 before the execution ever ran).
    fn current_phase(&self) -> u64 {
        self.last_slot.map_or(0, |s| self.phase_of(s))
    }

    pub(crate) fn mark_informed(&mut self, node: Label) {
        if self.informed_phase[node - 1].is_none() {
            self.informed_phase[node - 1] = Some(self.current_phase());
        }
    }

    pub(crate) fn is_informed(&self, node: Label) -> bool {
        self.informed_phase[node - 1].is_some()
    }

    pub(crate) fn wants_transmit(&self, node: Label, slot: u64, is_source: bool) -> bool {
        if slot == 0 {
            return is_source;
        }
        let p = self.phase_of(slot);
        let j = ((slot - 1) % self.set_count) as usize;
        self.fam.set(j).contains(node) && self.informed_phase[node - 1] == Some(p - 1)
    }

    /// Last local slot on which `node` still has duty; the execution turns it
    /// inactive right after. Sources transmit only at slot 0; an informed,
    /// covered node serves the phase after its informed phase.
    pub(crate) fn deactivation_slot(&self, node: Label, is_source: bool) -> Option<u64> {
        if is_source {
            return Some(0);
        }
        match self.informed_phase[node - 1] {
            Some(p) if self.covered[node - 1] => Some(self.phase_end(p + 1)),
            _ => None,
        }
    }
}

/// The BROAD-A schedule: knows n and Δ through its (n,Δ)-selective family.
pub struct BroadA {
    name: String,
    exec: BroadAExec,
    sources: BTreeSet<Label>,
    known: Vec<BTreeSet<Message>>,
    inactive_from: Vec<Option<u64>>,
}

pub fn broad_a(n: usize, delta: usize, fam: Arc<SetFamily>) -> Result<BroadA, ProtocolError> {
    check_selective_claim(&fam, n, delta)?;
    Ok(BroadA {
        name: format!("broad-a(n={n},delta={delta})"),
        exec: BroadAExec::new(fam, n),
        sources: BTreeSet::new(),
        known: vec![BTreeSet::new(); n],
        inactive_from: vec![None; n],
    })
}

impl ProtocolSchedule for BroadA {
    fn name(&self) -> &str {
        &self.name
    }

    fn begin(&mut self, n: usize, endowments: &[(Label, Vec<Message>)]) {
        assert_eq!(n, self.known.len(), "network size fixed at construction");
        self.exec.reset();
        self.sources.clear();
        self.known.iter_mut().for_each(|k| k.clear());
        self.inactive_from.iter_mut().for_each(|s| *s = None);
        for (label, msgs) in endowments {
            self.sources.insert(*label);
            self.known[label - 1].extend(msgs.iter().copied());
            // sources transmit at slot 0 and then leave
            self.inactive_from[label - 1] = Some(1);
        }
    }

    fn act(&mut self, node: Label, slot: u64) -> Action {
        if self.exec.last_slot != Some(slot) {
            self.exec.on_slot(slot);
        }
        if let Some(s) = self.inactive_from[node - 1] {
            if slot >= s {
                return Action::Inactive;
            }
        }
        let is_source = self.sources.contains(&node);
        if self.exec.wants_transmit(node, slot, is_source) {
            Action::Transmit(sorted_payload(&self.known[node - 1]))
        } else {
            Action::Receive
        }
    }

    fn observe(&mut self, node: Label, _slot: u64, delivered: &[Message]) {
        self.known[node - 1].extend(delivered.iter().copied());
        if !self.sources.contains(&node) && !self.exec.is_informed(node) {
            self.exec.mark_informed(node);
            self.inactive_from[node - 1] = self
                .exec
                .deactivation_slot(node, false)
                .map(|last| last + 1);
        }
    }

    fn phase_of_slot(&self, slot: u64) -> Option<u64> {
        Some(self.exec.phase_of(slot))
    }
}
