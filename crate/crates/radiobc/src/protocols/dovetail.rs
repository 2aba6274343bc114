//! The dovetail protocol: interleave BROAD-B(2^l) executions for l = 0, 1, ...
//! so that nodes need no knowledge of n at all.
//!
//! Phase k consists of stages l = 0..k-1; stage (k, l) runs local slots
//! f_{k-1}(l)..f_k(l)-1 (0-based) of BROAD-B(2^l), with the stage function
//! f_k(z) = 2^ceil(k^(2/alpha)) (k - z). A node informed during any execution
//! acts as informed in all of them; a node deactivated by any execution is
//! inactive for the rest of the protocol.

use super::broad_b::{log2_ceil, BroadBExec};
use super::{sorted_payload, FamilyCache, ProtocolError, ProtocolSchedule};
use crate::radiosim::{Action, Message};
use crate::Label;
use std::collections::BTreeSet;
use std::sync::Arc;

/// The stage function and the slot accounting it induces. All arithmetic is
/// u128 and saturating: phases beyond any simulable horizon saturate instead
/// of overflowing.
#[derive(Debug, Clone, Copy)]
pub struct Dovetail {
    alpha: f64,
}

impl Dovetail {
    pub fn new(alpha: f64) -> Result<Self, ProtocolError> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(ProtocolError::BadAlpha(alpha));
        }
        Ok(Dovetail { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// ceil(k^(2/alpha)), with snapping so that integral powers computed in
    /// floating point are not bumped up by representation dust.
    pub fn exponent(&self, k: u64) -> u32 {
        if k == 0 {
            return 0;
        }
        let x = (k as f64).powf(2.0 / self.alpha);
        let snapped = if (x - x.round()).abs() < 1e-9 {
            x.round()
        } else {
            x.ceil()
        };
        snapped as u32
    }

    /// f_k(z) = 2^ceil(k^(2/alpha)) (k - z); zero for k = 0 and z >= k.
    pub fn f(&self, k: u64, z: u64) -> u128 {
        if k == 0 || z >= k {
            return 0;
        }
        let e = self.exponent(k);
        if e >= 127 {
            return u128::MAX;
        }
        (1u128 << e).saturating_mul((k - z) as u128)
    }

    /// Slots stage (k, l) contributes: f_k(l) - f_{k-1}(l).
    pub fn stage_len(&self, k: u64, l: u64) -> u128 {
        self.f(k, l).saturating_sub(self.f(k - 1, l))
    }

    /// Slots in phase k (its k stages together).
    pub fn phase_len(&self, k: u64) -> u128 {
        (0..k).fold(0u128, |acc, l| acc.saturating_add(self.stage_len(k, l)))
    }

    /// Global slot count after phases 1..=k; telescopes to Σ_l f_k(l).
    pub fn phase_end(&self, k: u64) -> u128 {
        (1..=k).fold(0u128, |acc, kk| acc.saturating_add(self.phase_len(kk)))
    }

    /// 1-based phase index containing a global slot.
    pub fn phase_of_global(&self, slot: u128) -> u64 {
        let mut k = 1;
        while self.phase_end(k) <= slot {
            k += 1;
        }
        k
    }
}

/// Walks the (phase, stage, position) structure one global slot at a time.
struct Cursor {
    k: u64,
    l: u64,
    pos: u128,
    stage_len: u128,
    /// First local BROAD-B slot of the current stage: f_{k-1}(l).
    b_base: u128,
    global: u128,
}

impl Cursor {
    fn new(dt: &Dovetail) -> Self {
        Cursor {
            k: 1,
            l: 0,
            pos: 0,
            stage_len: dt.stage_len(1, 0),
            b_base: 0,
            global: 0,
        }
    }

    fn b_slot(&self) -> u128 {
        self.b_base + self.pos
    }

    fn advance(&mut self, dt: &Dovetail) {
        self.global += 1;
        self.pos += 1;
        while self.pos >= self.stage_len {
            self.pos = 0;
            self.l += 1;
            if self.l >= self.k {
                self.k += 1;
                self.l = 0;
            }
            self.stage_len = dt.stage_len(self.k, self.l);
            self.b_base = dt.f(self.k - 1, self.l);
        }
    }
}

/// The dovetail schedule. Nodes know only their labels; families for the
/// embedded executions come from the (seeded, deterministic) cache.
pub struct ProtAlpha {
    name: String,
    dovetail: Dovetail,
    cache: Arc<FamilyCache>,
    execs: Vec<BroadBExec>,
    cursor: Cursor,
    last_slot: Option<u64>,
    n: usize,
    sources: BTreeSet<Label>,
    known: Vec<BTreeSet<Message>>,
    informed: Vec<bool>,
    inactive_from: Vec<Option<u128>>,
}

pub fn prot_alpha(alpha: f64, cache: Arc<FamilyCache>) -> Result<ProtAlpha, ProtocolError> {
    let dovetail = Dovetail::new(alpha)?;
    Ok(ProtAlpha {
        name: format!("prot-alpha({alpha})"),
        dovetail,
        cache,
        execs: Vec::new(),
        cursor: Cursor::new(&dovetail),
        last_slot: None,
        n: 0,
        sources: BTreeSet::new(),
        known: Vec::new(),
        informed: Vec::new(),
        inactive_from: Vec::new(),
    })
}

impl ProtAlpha {
    pub fn dovetail(&self) -> &Dovetail {
        &self.dovetail
    }

    /// (phase, stage, local BROAD-B slot) at the cursor; for accounting
    /// cross-checks against the arithmetic.
    pub fn cursor_position(&self) -> (u64, u64, u128) {
        (self.cursor.k, self.cursor.l, self.cursor.b_slot())
    }

    fn ensure_exec(&mut self, l: u64) {
        while self.execs.len() <= l as usize {
            let ground = 1usize << self.execs.len();
            let l_count = log2_ceil(ground).max(1);
            let families = (1..=l_count)
                .map(|ll| {
                    self.cache
                        .selective(ground, (1usize << ll).min(ground).max(1))
                        .expect("family construction is deterministic and total here")
                })
                .collect::<Vec<_>>();
            let mut exec =
                BroadBExec::new(ground, self.n, &families).expect("family counts match");
            // nodes informed before this execution exists record phase 0
            for node in 1..=self.n {
                if self.informed[node - 1] {
                    exec.mark_informed(node);
                }
            }
            self.execs.push(exec);
            // a new execution can move a node's first deactivation earlier
            for node in 1..=self.n {
                if self.informed[node - 1] || self.sources.contains(&node) {
                    self.recompute_deactivation(node);
                }
            }
        }
    }

    /// Global slot at which execution `l` runs its local BROAD-B slot `b`.
    fn local_to_global(&self, l: u64, b: u128) -> u128 {
        if b == u128::MAX {
            return u128::MAX;
        }
        // stage (k, l) covers local slots f_{k-1}(l)..f_k(l)-1
        let mut k = l + 1;
        while self.dovetail.f(k, l) <= b {
            k += 1;
        }
        let mut global = self.dovetail.phase_end(k - 1);
        for ll in 0..l {
            global = global.saturating_add(self.dovetail.stage_len(k, ll));
        }
        global.saturating_add(b - self.dovetail.f(k - 1, l))
    }

    fn recompute_deactivation(&mut self, node: Label) {
        let is_source = self.sources.contains(&node);
        let mut best: Option<u128> = None;
        for (l, exec) in self.execs.iter().enumerate() {
            if let Some(b) = exec.deactivation_slot(node, is_source) {
                let g = self.local_to_global(l as u64, b as u128);
                best = Some(match best {
                    Some(cur) => cur.min(g),
                    None => g,
                });
            }
        }
        self.inactive_from[node - 1] = best.map(|g| g.saturating_add(1));
    }
}

impl ProtocolSchedule for ProtAlpha {
    fn name(&self) -> &str {
        &self.name
    }

    fn begin(&mut self, n: usize, endowments: &[(Label, Vec<Message>)]) {
        self.execs.clear();
        self.cursor = Cursor::new(&self.dovetail);
        self.last_slot = None;
        self.n = n;
        self.sources.clear();
        self.known = vec![BTreeSet::new(); n];
        self.informed = vec![false; n];
        self.inactive_from = vec![None; n];
        for (label, msgs) in endowments {
            self.sources.insert(*label);
            self.known[label - 1].extend(msgs.iter().copied());
        }
    }

    fn act(&mut self, node: Label, slot: u64) -> Action {
        if self.last_slot != Some(slot) {
            self.last_slot = Some(slot);
            while self.cursor.global < slot as u128 {
                self.cursor.advance(&self.dovetail);
            }
            let l = self.cursor.l;
            let b = self.cursor.b_slot();
            debug_assert!(b < u64::MAX as u128, "executed local slots fit u64");
            self.ensure_exec(l);
            self.execs[l as usize].on_slot(b as u64);
        }
        let l = self.cursor.l;
        let b = self.cursor.b_slot();
        if let Some(s) = self.inactive_from[node - 1] {
            if slot as u128 >= s {
                return Action::Inactive;
            }
        }
        let is_source = self.sources.contains(&node);
        if self.execs[l as usize].wants_transmit(node, b as u64, is_source) {
            Action::Transmit(sorted_payload(&self.known[node - 1]))
        } else {
            Action::Receive
        }
    }

    fn observe(&mut self, node: Label, _slot: u64, delivered: &[Message]) {
        self.known[node - 1].extend(delivered.iter().copied());
        if !self.sources.contains(&node) && !self.informed[node - 1] {
            self.informed[node - 1] = true;
            for exec in &mut self.execs {
                exec.mark_informed(node);
            }
            self.recompute_deactivation(node);
        }
    }

    fn phase_of_slot(&self, slot: u64) -> Option<u64> {
        Some(self.dovetail.phase_of_global(slot as u128))
    }
}
