//! Broadcast protocols behind one schedule contract.
//!
//! A schedule instance owns per-node mutable state for a single simulation
//! run; `begin` fully resets it. Decisions may depend only on the node's
//! label, the slot number, and what that node has received — the engine
//! enforces this by construction, feeding each callback nothing else.

mod broad_a;
mod broad_b;
mod dovetail;
mod multi;
mod oblivious;

pub use broad_a::{broad_a, BroadA};
pub use broad_b::{broad_b, broad_b_from_cache, BroadB};
pub use dovetail::{prot_alpha, Dovetail, ProtAlpha};
pub use multi::{multi_bb_broad_a, multi_ub_broad, MultiBb, MultiUb};
pub use oblivious::{
    always_transmit, oblivious_family_schedule, round_robin, transmit_sets_to_family,
    ObliviousSchedule,
};

use crate::radiosim::{Action, Message};
use crate::setfam::{
    build_selective, ConstructionParams, FamilyKind, SetFamError, SetFamily,
};
use crate::Label;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("family ground size {got} does not match network size {want}")]
    GroundMismatch { got: usize, want: usize },
    #[error("family claims k = {got}, protocol needs k >= {want}")]
    ClaimTooWeak { got: usize, want: usize },
    #[error("family must claim strong selectivity for this protocol")]
    NotStronglySelective,
    #[error("expected {want} families, got {got}")]
    FamilyCount { got: usize, want: usize },
    #[error("alpha must be positive, got {0}")]
    BadAlpha(f64),
    #[error(transparent)]
    SetFam(#[from] SetFamError),
}

/// The decision contract every protocol implements.
///
/// `act` is called for every node in every slot in ascending slot order;
/// `observe` only on successful deliveries (collision and silence are
/// indistinguishable, so the protocol hears nothing about either). Once a
/// node answers `Inactive` it must answer `Inactive` forever.
pub trait ProtocolSchedule {
    fn name(&self) -> &str;

    /// Reset all per-run state. `endowments` lists each node's own initial
    /// messages (a node sees only its own entry).
    fn begin(&mut self, n: usize, endowments: &[(Label, Vec<Message>)]);

    fn act(&mut self, node: Label, slot: u64) -> Action;

    fn observe(&mut self, node: Label, slot: u64, delivered: &[Message]);

    /// True when the protocol can never transmit again regardless of input;
    /// consulted before simulating `next_slot`.
    fn is_quiescent(&self, _next_slot: u64) -> bool {
        false
    }

    /// The protocol's own phase index for a global slot, if it has phases.
    fn phase_of_slot(&self, _slot: u64) -> Option<u64> {
        None
    }

    /// Oblivious schedules expose their transmit sets without simulation.
    fn oblivious(&self) -> Option<&dyn ObliviousView> {
        None
    }
}

/// Slot-indexed transmit sets of an oblivious schedule: the labels that
/// would transmit at `slot` if informed and active.
pub trait ObliviousView {
    fn transmit_set(&self, slot: u64) -> crate::setfam::LabelSet;
}

/// Deterministic provider of (n,k)-selective families keyed by (n, k), so
/// construction cost never pollutes protocol timing. Auto mode: exhaustively
/// verified at small scale, probabilistic beyond.
pub struct FamilyCache {
    seed: u64,
    map: Mutex<HashMap<(usize, usize), Arc<SetFamily>>>,
}

impl FamilyCache {
    pub fn new(seed: u64) -> Arc<Self> {
        Arc::new(FamilyCache {
            seed,
            map: Mutex::new(HashMap::new()),
        })
    }

    fn derived_seed(&self, n: usize, k: usize) -> u64 {
        let mut x = self
            .seed
            .wrapping_add((n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
            .wrapping_add((k as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9));
        x ^= x >> 30;
        x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x ^= x >> 27;
        x
    }

    pub fn selective(&self, n: usize, k: usize) -> Result<Arc<SetFamily>, SetFamError> {
        if let Some(f) = self.map.lock().unwrap().get(&(n, k)) {
            return Ok(f.clone());
        }
        let params = ConstructionParams::seeded(self.derived_seed(n, k));
        let built = build_selective(n, k, &params)?;
        let fam = Arc::new(built.family);
        self.map.lock().unwrap().insert((n, k), fam.clone());
        Ok(fam)
    }
}

fn check_selective_claim(
    fam: &SetFamily,
    n: usize,
    needed_k: usize,
) -> Result<(), ProtocolError> {
    if fam.ground_size() != n {
        return Err(ProtocolError::GroundMismatch {
            got: fam.ground_size(),
            want: n,
        });
    }
    if let Some(claim) = fam.claim() {
        if claim.k < needed_k.min(n) {
            return Err(ProtocolError::ClaimTooWeak {
                got: claim.k,
                want: needed_k.min(n),
            });
        }
    }
    Ok(())
}

fn check_strong_claim(fam: &SetFamily, n: usize, needed_k: usize) -> Result<(), ProtocolError> {
    if fam.ground_size() != n {
        return Err(ProtocolError::GroundMismatch {
            got: fam.ground_size(),
            want: n,
        });
    }
    match fam.claim() {
        Some(claim) if claim.kind == FamilyKind::StronglySelective => {
            if claim.k < needed_k.min(n) {
                Err(ProtocolError::ClaimTooWeak {
                    got: claim.k,
                    want: needed_k.min(n),
                })
            } else {
                Ok(())
            }
        }
        Some(_) => Err(ProtocolError::NotStronglySelective),
        None => Ok(()),
    }
}

pub(crate) fn sorted_payload(msgs: &std::collections::BTreeSet<Message>) -> Arc<[Message]> {
    msgs.iter().copied().collect::<Vec<_>>().into()
}
