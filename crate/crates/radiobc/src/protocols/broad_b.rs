//! BROAD-B: phases of ceil(log2 n) slots; slot l of phase h runs slot h of
//! the embedded BROAD-A(n, 2^l). A node deactivated by any embedded
//! execution stays inactive for the rest of BROAD-B.

use super::broad_a::BroadAExec;
use super::{
    check_selective_claim, sorted_payload, FamilyCache, ProtocolError, ProtocolSchedule,
};
use crate::radiosim::{Action, Message};
use crate::setfam::SetFamily;
use crate::Label;
use std::collections::BTreeSet;
use std::sync::Arc;

pub(crate) fn log2_ceil(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// The interleaved executions of one BROAD-B(ground) run, on BROAD-B's own
/// local clock. The ground set may be smaller or larger than the network:
/// labels outside an execution's family ground never transmit there. This is
/// what the dovetail protocol relies on for its BROAD-B(2^l) embeddings.
pub(crate) struct BroadBExec {
    phase_len: u64,
    subs: Vec<BroadAExec>,
}

impl BroadBExec {
    /// `families[l-1]` must be (ground, 2^l)-selective for l = 1..=L where
    /// L = max(1, ceil(log2 ground)).
    pub(crate) fn new(
        ground: usize,
        network_n: usize,
        families: &[Arc<SetFamily>],
    ) -> Result<Self, ProtocolError> {
        let l_count = log2_ceil(ground).max(1);
        if families.len() != l_count {
            return Err(ProtocolError::FamilyCount {
                got: families.len(),
                want: l_count,
            });
        }
        for fam in families {
            if fam.ground_size() != ground {
                return Err(ProtocolError::GroundMismatch {
                    got: fam.ground_size(),
                    want: ground,
                });
            }
        }
        Ok(BroadBExec {
            phase_len: l_count as u64,
            subs: families
                .iter()
                .map(|f| BroadAExec::new(f.clone(), network_n))
                .collect(),
        })
    }

    /// Local BROAD-B slot -> (embedded execution index, its BROAD-A slot).
    fn route(&self, slot: u64) -> (usize, u64) {
        ((slot % self.phase_len) as usize, slot / self.phase_len)
    }

    pub(crate) fn on_slot(&mut self, slot: u64) {
        let (i, h) = self.route(slot);
        self.subs[i].on_slot(h);
    }

    pub(crate) fn wants_transmit(&self, node: Label, slot: u64, is_source: bool) -> bool {
        let (i, h) = self.route(slot);
        self.subs[i].wants_transmit(node, h, is_source)
    }

    /// Record the informed flag in every embedded execution, each at its own
    /// current local phase.
    pub(crate) fn mark_informed(&mut self, node: Label) {
        for sub in &mut self.subs {
            sub.mark_informed(node);
        }
    }

    /// Earliest local BROAD-B slot after which some embedded execution turns
    /// the node inactive (the node then stays inactive for the whole run).
    pub(crate) fn deactivation_slot(&self, node: Label, is_source: bool) -> Option<u64> {
        self.subs
            .iter()
            .enumerate()
            .filter_map(|(i, sub)| {
                sub.deactivation_slot(node, is_source)
                    .map(|h| h * self.phase_len + i as u64)
            })
            .min()
    }
}

/// The BROAD-B schedule over a ground set of `ground` labels; can run on any
/// network size (labels beyond the ground never transmit).
pub struct BroadB {
    name: String,
    ground: usize,
    families: Vec<Arc<SetFamily>>,
    exec: Option<BroadBExec>,
    last_slot: Option<u64>,
    sources: BTreeSet<Label>,
    known: Vec<BTreeSet<Message>>,
    informed: Vec<bool>,
    inactive_from: Vec<Option<u64>>,
}

/// `families[l-1]` must be (ground, 2^l)-selective for l = 1..=ceil(log2 ground).
pub fn broad_b(ground: usize, families: Vec<Arc<SetFamily>>) -> Result<BroadB, ProtocolError> {
    for (i, fam) in families.iter().enumerate() {
        check_selective_claim(fam, ground, (1usize << (i + 1)).min(ground))?;
    }
    // validate counts now so begin() cannot fail
    BroadBExec::new(ground, ground, &families)?;
    Ok(BroadB {
        name: format!("broad-b(n={ground})"),
        ground,
        families,
        exec: None,
        last_slot: None,
        sources: BTreeSet::new(),
        known: Vec::new(),
        informed: Vec::new(),
        inactive_from: Vec::new(),
    })
}

pub fn broad_b_from_cache(ground: usize, cache: &FamilyCache) -> Result<BroadB, ProtocolError> {
    let l_count = log2_ceil(ground).max(1);
    let families = (1..=l_count)
        .map(|l| cache.selective(ground, (1usize << l).min(ground)))
        .collect::<Result<Vec<_>, _>>()?;
    broad_b(ground, families)
}

impl ProtocolSchedule for BroadB {
    fn name(&self) -> &str {
        &self.name
    }

    fn begin(&mut self, n: usize, endowments: &[(Label, Vec<Message>)]) {
        let exec = BroadBExec::new(self.ground, n, &self.families).expect("validated");
        self.exec = Some(exec);
        self.last_slot = None;
        self.sources.clear();
        self.known = vec![BTreeSet::new(); n];
        self.informed = vec![false; n];
        self.inactive_from = vec![None; n];
        for (label, msgs) in endowments {
            self.sources.insert(*label);
            self.known[label - 1].extend(msgs.iter().copied());
            // the first embedded execution retires the source after its slot 0
            let last = self
                .exec
                .as_ref()
                .unwrap()
                .deactivation_slot(*label, true)
                .expect("sources always have a transmit duty");
            self.inactive_from[label - 1] = Some(last + 1);
        }
    }

    fn act(&mut self, node: Label, slot: u64) -> Action {
        let exec = self.exec.as_mut().expect("begin not called");
        if self.last_slot != Some(slot) {
            self.last_slot = Some(slot);
            exec.on_slot(slot);
        }
        if let Some(s) = self.inactive_from[node - 1] {
            if slot >= s {
                return Action::Inactive;
            }
        }
        let is_source = self.sources.contains(&node);
        if exec.wants_transmit(node, slot, is_source) {
            Action::Transmit(sorted_payload(&self.known[node - 1]))
        } else {
            Action::Receive
        }
    }

    fn observe(&mut self, node: Label, _slot: u64, delivered: &[Message]) {
        self.known[node - 1].extend(delivered.iter().copied());
        if !self.sources.contains(&node) && !self.informed[node - 1] {
            self.informed[node - 1] = true;
            let exec = self.exec.as_mut().expect("begin not called");
            // the informed flag is global; each execution records its own phase
            exec.mark_informed(node);
            self.inactive_from[node - 1] = exec.deactivation_slot(node, false).map(|s| s + 1);
        }
    }

    fn phase_of_slot(&self, slot: u64) -> Option<u64> {
        Some(slot / log2_ceil(self.ground).max(1) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiosim::{run, BroadcastInstance, ChannelMode, RadioGraph};

    #[test]
    fn two_node_edge_completes_in_phase_zero() {
        let cache = FamilyCache::new(11);
        let g = RadioGraph::from_edges(2, &[(1, 2)]).unwrap();
        let inst = BroadcastInstance::single(g, 1, ChannelMode::Bounded).unwrap();
        let mut proto = broad_b_from_cache(2, &cache).unwrap();
        let trace = run(&inst, &mut proto, 1000).unwrap();
        assert_eq!(trace.completion_slot, Some(0));
    }

    #[test]
    fn wrong_family_count_rejected() {
        assert!(broad_b(8, vec![]).is_err());
    }

    #[test]
    fn random_dags_complete_and_terminate() {
        let cache = FamilyCache::new(5);
        for seed in 0..10 {
            let g = crate::gen::random_digraph(32, 4, seed, true).unwrap();
            let inst = BroadcastInstance::single(g, 1, ChannelMode::Bounded).unwrap();
            let mut proto = broad_b_from_cache(32, &cache).unwrap();
            let trace = run(&inst, &mut proto, crate::radiosim::default_horizon(32)).unwrap();
            assert!(trace.completion_slot.is_some(), "seed {seed} did not complete");
            assert!(
                trace.termination_slot.is_some(),
                "seed {seed} did not terminate"
            );
        }
    }
}
