//! Exhaustive and sampled selectivity verifiers.
//!
//! The exhaustive verifiers walk all nonempty subsets `Z` with `|Z| <= k` in
//! lexicographic order (depth-first over sorted prefixes), maintaining per-set
//! intersection counts incrementally so each subset costs amortized
//! O(sets containing the touched label).

use super::{LabelSet, SetFamError, SetFamily};
use crate::Label;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectiveVerdict {
    Pass,
    /// Lexicographically least subset no set selects.
    Fail { witness: Vec<Label> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrongVerdict {
    Pass,
    /// Lexicographically least subset with an unisolated element, and its
    /// smallest such element.
    Fail { witness: Vec<Label>, element: Label },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampledVerdict {
    /// Explicitly weaker than a pass: the sampler found nothing.
    NoViolationFound,
    Fail { witness: Vec<Label> },
}

/// DFS over nonempty subsets of `[n]` with size <= k in lexicographic order.
/// `check` runs at every node; returning `Some(v)` aborts with that verdict.
fn subset_dfs<V>(
    fam: &SetFamily,
    k: usize,
    max_subsets: Option<u64>,
    mut check: impl FnMut(&[Label], &Tracker) -> Option<V>,
) -> Result<Option<V>, SetFamError> {
    let n = fam.ground_size();
    let k = k.min(n);
    let mut tracker = Tracker::new(fam);
    let mut stack: Vec<Label> = Vec::with_capacity(k);
    let mut visited: u64 = 0;
    let budget = max_subsets.unwrap_or(u64::MAX);

    // iterative DFS: state = next label to try at each depth
    let mut next: Vec<Label> = vec![1];
    loop {
        let depth = next.len() - 1;
        let candidate = next[depth];
        if candidate > n || stack.len() >= k {
            // exhausted extensions at this depth: pop
            if let Some(l) = stack.pop() {
                tracker.pop(&stack, l);
                next.pop();
                let d = next.len() - 1;
                next[d] = l + 1;
                continue;
            }
            return Ok(None);
        }
        if stack.len() < k {
            // descend into stack ∪ {candidate}
            tracker.push(candidate);
            stack.push(candidate);
            visited += 1;
            if visited > budget {
                return Err(SetFamError::BudgetExceeded { visited });
            }
            if let Some(v) = check(&stack, &tracker) {
                return Ok(Some(v));
            }
            next.push(candidate + 1);
        }
    }
}

/// Incremental |Z ∩ F| bookkeeping along the subset DFS.
///
/// `isolating[l]` counts the sets whose intersection with the current Z is
/// exactly {l}; `isolated_sets` counts sets with |Z ∩ F| = 1. Pops use the
/// explicit DFS stack to restore the surviving solo member on 2 -> 1
/// transitions.
pub(super) struct Tracker<'f> {
    membership: Vec<Vec<u32>>,
    count: Vec<u32>,
    solo: Vec<Label>,
    isolating: Vec<u32>,
    isolated_sets: usize,
    fam: &'f SetFamily,
}

impl<'f> Tracker<'f> {
    fn new(fam: &'f SetFamily) -> Self {
        let n = fam.ground_size();
        let mut membership = vec![Vec::new(); n + 1];
        for (fi, set) in fam.sets().iter().enumerate() {
            for label in set.iter() {
                membership[label].push(fi as u32);
            }
        }
        Tracker {
            membership,
            count: vec![0; fam.len()],
            solo: vec![0; fam.len()],
            isolating: vec![0; n + 1],
            isolated_sets: 0,
            fam,
        }
    }

    fn push(&mut self, label: Label) {
        for i in 0..self.membership[label].len() {
            let fi = self.membership[label][i] as usize;
            match self.count[fi] {
                0 => {
                    self.count[fi] = 1;
                    self.solo[fi] = label;
                    self.isolating[label] += 1;
                    self.isolated_sets += 1;
                }
                1 => {
                    self.count[fi] = 2;
                    self.isolating[self.solo[fi]] -= 1;
                    self.isolated_sets -= 1;
                }
                c => self.count[fi] = c + 1,
            }
        }
    }

    fn pop(&mut self, remaining_stack: &[Label], label: Label) {
        for i in 0..self.membership[label].len() {
            let fi = self.membership[label][i] as usize;
            match self.count[fi] {
                1 => {
                    self.count[fi] = 0;
                    self.isolating[label] -= 1;
                    self.isolated_sets -= 1;
                }
                2 => {
                    self.count[fi] = 1;
                    let set = self.fam.set(fi);
                    let other = remaining_stack
                        .iter()
                        .copied()
                        .find(|&l| set.contains(l))
                        .expect("count 2 implies a remaining member");
                    self.solo[fi] = other;
                    self.isolating[other] += 1;
                    self.isolated_sets += 1;
                }
                c => self.count[fi] = c - 1,
            }
        }
    }

    fn any_isolated(&self) -> bool {
        self.isolated_sets > 0
    }

    fn unisolated_member(&self, stack: &[Label]) -> Option<Label> {
        stack.iter().copied().find(|&l| self.isolating[l] == 0)
    }
}

/// Pass iff every nonempty `Z ⊆ [n]` with `|Z| <= k` has a set `F` with
/// `|Z ∩ F| = 1`. On failure returns the lexicographically least witness.
pub fn verify_selective_exact(
    fam: &SetFamily,
    k: usize,
    max_subsets: Option<u64>,
) -> Result<SelectiveVerdict, SetFamError> {
    let hit = subset_dfs(fam, k, max_subsets, |stack, tracker| {
        if tracker.any_isolated() {
            None
        } else {
            Some(stack.to_vec())
        }
    })?;
    Ok(match hit {
        Some(witness) => SelectiveVerdict::Fail { witness },
        None => SelectiveVerdict::Pass,
    })
}

/// Pass iff every element of every `Z` with `|Z| <= k` is isolated by some
/// set (`Z ∩ F = {z}`).
pub fn verify_strongly_selective_exact(
    fam: &SetFamily,
    k: usize,
    max_subsets: Option<u64>,
) -> Result<StrongVerdict, SetFamError> {
    let hit = subset_dfs(fam, k, max_subsets, |stack, tracker| {
        tracker
            .unisolated_member(stack)
            .map(|element| (stack.to_vec(), element))
    })?;
    Ok(match hit {
        Some((witness, element)) => StrongVerdict::Fail { witness, element },
        None => StrongVerdict::Pass,
    })
}

/// Monte Carlo stand-in where exhaustive checking is infeasible. Samples
/// `trials` random nonempty subsets of size <= k (size uniform, then a
/// uniform subset of that size); a clean sweep is explicitly *not* a pass.
pub fn verify_selective_sampled(
    fam: &SetFamily,
    k: usize,
    trials: u64,
    seed: u64,
) -> SampledVerdict {
    let n = fam.ground_size();
    let k = k.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch: Vec<Label> = Vec::with_capacity(k);
    for _ in 0..trials {
        let size = rng.random_range(1..=k);
        scratch.clear();
        // Floyd's algorithm for a uniform size-subset of 1..=n
        for j in (n - size + 1)..=n {
            let t = rng.random_range(1..=j);
            if scratch.contains(&t) {
                scratch.push(j);
            } else {
                scratch.push(t);
            }
        }
        scratch.sort_unstable();
        let z = LabelSet::from_labels(n, &scratch).expect("sampled labels in range");
        let selected = fam.sets().iter().any(|f| f.intersection_size(&z) == 1);
        if !selected {
            return SampledVerdict::Fail {
                witness: scratch.clone(),
            };
        }
    }
    SampledVerdict::NoViolationFound
}
