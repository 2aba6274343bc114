//! Slot-synchronous radio-network simulation and the combinatorial set
//! families that drive deterministic broadcast on unknown topologies.
//!
//! The crate is organized around five pieces:
//!
//! * [`setfam`] — selective / strongly-selective families, r-different
//!   sequence sets, their constructions, verifiers and brute-force oracles;
//! * [`radiosim`] — the collision-channel simulator (bounded and unbounded
//!   bandwidth), traces and instance metrics;
//! * [`protocols`] — the broadcast protocols behind one schedule contract;
//! * [`adversary`] — layered worst-case instance construction against
//!   oblivious schedules, with checkable delay certificates;
//! * [`io`] — the text formats for families, sequence sets and adversarial
//!   graphs.

pub mod adversary;
pub mod gen;
pub mod io;
pub mod protocols;
pub mod radiosim;
pub mod setfam;

/// Node label. Labels are 1-based: a graph on `n` nodes uses `1..=n`.
pub type Label = usize;
