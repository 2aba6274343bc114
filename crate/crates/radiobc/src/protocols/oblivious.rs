//! Oblivious schedules: the transmit set of a slot depends only on the slot
//! index, so it can be exposed without simulation. When run, an informed
//! node transmits at its scheduled slots and never deactivates.

use super::{sorted_payload, ObliviousView, ProtocolSchedule};
use crate::radiosim::{Action, Message};
use crate::setfam::{LabelSet, SetFamily};
use crate::Label;
use std::collections::BTreeSet;
use std::sync::Arc;

enum ScheduleKind {
    /// node v transmits at slots t with t mod n = v-1
    RoundRobin,
    /// every informed node transmits every slot
    Always,
    /// cycle a set family: slot t schedules set t mod |F|
    FamilyCycle(Arc<SetFamily>),
}

pub struct ObliviousSchedule {
    name: String,
    n: usize,
    kind: ScheduleKind,
    known: Vec<BTreeSet<Message>>,
}

/// Baseline oblivious schedule and the canonical adversary target.
pub fn round_robin(n: usize) -> ObliviousSchedule {
    ObliviousSchedule {
        name: format!("round-robin(n={n})"),
        n,
        kind: ScheduleKind::RoundRobin,
        known: Vec::new(),
    }
}

/// Degenerate jammer: every informed node transmits in every slot.
pub fn always_transmit(n: usize) -> ObliviousSchedule {
    ObliviousSchedule {
        name: format!("always-transmit(n={n})"),
        n,
        kind: ScheduleKind::Always,
        known: Vec::new(),
    }
}

/// The straightforward family protocol: an informed node transmits at slot t
/// iff it belongs to set t mod |F|. This is also how BROAD-A exports its
/// family as an oblivious schedule.
pub fn oblivious_family_schedule(n: usize, fam: Arc<SetFamily>) -> ObliviousSchedule {
    assert_eq!(fam.ground_size(), n, "family ground must match network");
    assert!(!fam.is_empty());
    ObliviousSchedule {
        name: format!("family-cycle(n={n},size={})", fam.len()),
        n,
        kind: ScheduleKind::FamilyCycle(fam),
        known: Vec::new(),
    }
}

impl ObliviousSchedule {
    fn scheduled(&self, node: Label, slot: u64) -> bool {
        match &self.kind {
            ScheduleKind::RoundRobin => (slot % self.n as u64) as usize == node - 1,
            ScheduleKind::Always => true,
            ScheduleKind::FamilyCycle(fam) => {
                fam.set((slot % fam.len() as u64) as usize).contains(node)
            }
        }
    }
}

impl ProtocolSchedule for ObliviousSchedule {
    fn name(&self) -> &str {
        &self.name
    }

    fn begin(&mut self, n: usize, endowments: &[(Label, Vec<Message>)]) {
        assert_eq!(n, self.n, "network size fixed at construction");
        self.known = vec![BTreeSet::new(); n];
        for (label, msgs) in endowments {
            self.known[label - 1].extend(msgs.iter().copied());
        }
    }

    fn act(&mut self, node: Label, slot: u64) -> Action {
        if !self.known[node - 1].is_empty() && self.scheduled(node, slot) {
            Action::Transmit(sorted_payload(&self.known[node - 1]))
        } else {
            Action::Receive
        }
    }

    fn observe(&mut self, node: Label, _slot: u64, delivered: &[Message]) {
        self.known[node - 1].extend(delivered.iter().copied());
    }

    fn phase_of_slot(&self, slot: u64) -> Option<u64> {
        let len = match &self.kind {
            ScheduleKind::FamilyCycle(fam) => fam.len() as u64,
            _ => self.n as u64,
        };
        Some(slot / len)
    }

    fn oblivious(&self) -> Option<&dyn ObliviousView> {
        Some(self)
    }
}

impl ObliviousView for ObliviousSchedule {
    fn transmit_set(&self, slot: u64) -> LabelSet {
        match &self.kind {
            ScheduleKind::RoundRobin => {
                LabelSet::singleton(self.n, (slot % self.n as u64) as usize + 1)
            }
            ScheduleKind::Always => LabelSet::universe(self.n),
            ScheduleKind::FamilyCycle(fam) => {
                fam.set((slot % fam.len() as u64) as usize).clone()
            }
        }
    }
}

/// Export the transmit sets of a slot range as an (unclaimed) family, for
/// file interchange with the adversary and third-party tools.
pub fn transmit_sets_to_family(
    view: &dyn ObliviousView,
    n: usize,
    slots: std::ops::Range<u64>,
) -> SetFamily {
    let sets = slots.map(|t| view.transmit_set(t)).collect();
    SetFamily::new(n, sets).expect("transmit sets share the schedule ground")
}
