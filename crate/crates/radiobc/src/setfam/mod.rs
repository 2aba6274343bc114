//! Set families over a ground set `[n] = {1, ..., n}` and sequence sets over
//! `{0, ..., r}`: the combinatorial substrate of every schedule in this crate.
//!
//! Families are kept as ordered lists of bitsets; the order is significant
//! because protocols index sets by position within a phase.

mod bruteforce;
mod build;
mod rdiff;
mod verify;

pub use bruteforce::min_selective_size_bruteforce;
pub use build::{
    build_r_different, build_selective, build_strongly_selective, default_stratum_sizes,
    BuiltFamily, ConstructionParams, GuaranteeMode,
};
pub use rdiff::{verify_r_different, RDiffVerdict};
pub use verify::{
    verify_selective_exact, verify_selective_sampled, verify_strongly_selective_exact,
    SampledVerdict, SelectiveVerdict, StrongVerdict,
};

use crate::Label;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetFamError {
    #[error("label {label} out of range 1..={n}")]
    LabelOutOfRange { label: Label, n: usize },
    #[error("ground size must be >= 1")]
    EmptyGround,
    #[error("work budget exceeded after {visited} subsets")]
    BudgetExceeded { visited: u64 },
    #[error("construction failed exact verification after {attempts} attempts")]
    ConstructionFailure { attempts: u32 },
    #[error("stratum sizes below the proof's success condition: l_{index} = {got} < {required}")]
    StratumTooSmall {
        index: usize,
        got: usize,
        required: usize,
    },
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
}

/// A subset of `[n]`, stored as a bitset. Labels are 1-based.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabelSet {
    n: usize,
    words: Vec<u64>,
}

impl LabelSet {
    pub fn empty(n: usize) -> Self {
        LabelSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    /// The full ground set `{1, ..., n}`.
    pub fn universe(n: usize) -> Self {
        let mut s = Self::empty(n);
        for l in 1..=n {
            s.insert(l);
        }
        s
    }

    pub fn singleton(n: usize, label: Label) -> Self {
        let mut s = Self::empty(n);
        s.insert(label);
        s
    }

    pub fn from_labels(n: usize, labels: &[Label]) -> Result<Self, SetFamError> {
        let mut s = Self::empty(n);
        for &l in labels {
            if l == 0 || l > n {
                return Err(SetFamError::LabelOutOfRange { label: l, n });
            }
            s.insert(l);
        }
        Ok(s)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    /// Panics if `label` is outside `1..=n`.
    pub fn insert(&mut self, label: Label) {
        assert!(label >= 1 && label <= self.n, "label out of range");
        self.words[(label - 1) / 64] |= 1 << ((label - 1) % 64);
    }

    pub fn remove(&mut self, label: Label) {
        assert!(label >= 1 && label <= self.n, "label out of range");
        self.words[(label - 1) / 64] &= !(1 << ((label - 1) % 64));
    }

    pub fn contains(&self, label: Label) -> bool {
        if label == 0 || label > self.n {
            return false;
        }
        self.words[(label - 1) / 64] >> ((label - 1) % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersection_size(&self, other: &LabelSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Labels in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = Label> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b + 1)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Label> {
        self.iter().collect()
    }
}

impl std::fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Selective,
    StronglySelective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Guarantee {
    /// Passed an exhaustive verifier.
    Verified,
    /// Construction succeeds with probability bounded away from zero; not
    /// exhaustively checked.
    Probabilistic,
    /// Backed by a construction-time proof (no verification run needed).
    Certified,
}

impl Guarantee {
    pub fn as_str(self) -> &'static str {
        match self {
            Guarantee::Verified => "verified",
            Guarantee::Probabilistic => "probabilistic",
            Guarantee::Certified => "certified",
        }
    }
}

/// What a family claims to be. Only attached after a verifier pass or by a
/// construction that carries a proof-backed guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KindClaim {
    pub kind: FamilyKind,
    pub k: usize,
    pub guarantee: Guarantee,
}

/// An ordered family of subsets of `[n]`. Position in the list is the slot
/// index protocols schedule by, so order is part of the value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    ground: usize,
    sets: Vec<LabelSet>,
    claim: Option<KindClaim>,
}

impl SetFamily {
    pub fn new(ground: usize, sets: Vec<LabelSet>) -> Result<Self, SetFamError> {
        if ground == 0 {
            return Err(SetFamError::EmptyGround);
        }
        for s in &sets {
            if s.ground_size() != ground {
                return Err(SetFamError::Unsupported(
                    "set ground size differs from family ground size".into(),
                ));
            }
        }
        Ok(SetFamily {
            ground,
            sets,
            claim: None,
        })
    }

    pub fn with_claim(mut self, claim: KindClaim) -> Self {
        self.claim = Some(claim);
        self
    }

    /// The singleton family `{{1}, ..., {n}}`, which is
    /// (n,n)-strongly-selective.
    pub fn singletons(n: usize, claimed_k: usize) -> Self {
        let sets = (1..=n).map(|l| LabelSet::singleton(n, l)).collect();
        SetFamily {
            ground: n,
            sets,
            claim: Some(KindClaim {
                kind: FamilyKind::StronglySelective,
                k: claimed_k.min(n),
                guarantee: Guarantee::Certified,
            }),
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, index: usize) -> &LabelSet {
        &self.sets[index]
    }

    pub fn sets(&self) -> &[LabelSet] {
        &self.sets
    }

    pub fn claim(&self) -> Option<KindClaim> {
        self.claim
    }

    /// True if some set of the family contains `label`.
    pub fn covers(&self, label: Label) -> bool {
        self.sets.iter().any(|s| s.contains(label))
    }
}

/// `n` sequences of equal length over the alphabet `{0, ..., r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSet {
    alphabet_max: u32,
    length: usize,
    rows: Vec<Vec<u32>>,
}

impl SequenceSet {
    pub fn new(alphabet_max: u32, rows: Vec<Vec<u32>>) -> Result<Self, SetFamError> {
        let length = rows.first().map_or(0, |r| r.len());
        for row in &rows {
            if row.len() != length {
                return Err(SetFamError::Unsupported("rows of unequal length".into()));
            }
            if let Some(&bad) = row.iter().find(|&&s| s > alphabet_max) {
                return Err(SetFamError::Unsupported(format!(
                    "symbol {bad} exceeds alphabet max {alphabet_max}"
                )));
            }
        }
        Ok(SequenceSet {
            alphabet_max,
            length,
            rows,
        })
    }

    pub fn count(&self) -> usize {
        self.rows.len()
    }

    pub fn alphabet_max(&self) -> u32 {
        self.alphabet_max
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn row(&self, index: usize) -> &[u32] {
        &self.rows[index]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }
}
