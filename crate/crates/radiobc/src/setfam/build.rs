//! Constructions: probabilistic selective families (stratified random sets
//! with an optional verify-and-retry loop), strongly-selective families from
//! polynomial codes over GF(q), and r-different sequence sets from binary
//! codewords.

use super::verify::{verify_selective_exact, SelectiveVerdict};
use super::{
    FamilyKind, Guarantee, KindClaim, LabelSet, SequenceSet, SetFamError, SetFamily,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exact-verification is the default below this cutoff (~200k subsets);
/// beyond it the caller opts in explicitly or accepts the probabilistic flag.
const AUTO_VERIFY_MAX_N: usize = 24;
const AUTO_VERIFY_MAX_K: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuaranteeMode {
    /// Verified for small instances (n ≤ 24, k ≤ 6), probabilistic beyond.
    Auto,
    /// Never run the exhaustive verifier; result carries the probabilistic flag.
    Probabilistic,
    /// Always verify exhaustively, with an explicit subset budget.
    Verified { max_subsets: u64 },
}

/// Parameters of the stratified random construction.
#[derive(Debug, Clone)]
pub struct ConstructionParams {
    pub seed: u64,
    pub retry_limit: u32,
    pub mode: GuaranteeMode,
    /// Per-stratum set counts; `None` uses the proof's budget
    /// `l_i = ceil(8 ln(C(n, 2^(i-1)) 2^i)) + 1`.
    pub stratum_sizes: Option<Vec<usize>>,
}

impl ConstructionParams {
    pub fn seeded(seed: u64) -> Self {
        ConstructionParams {
            seed,
            retry_limit: 64,
            mode: GuaranteeMode::Auto,
            stratum_sizes: None,
        }
    }

    pub fn with_mode(mut self, mode: GuaranteeMode) -> Self {
        self.mode = mode;
        self
    }
}

/// A constructed family plus construction metadata.
#[derive(Debug, Clone)]
pub struct BuiltFamily {
    pub family: SetFamily,
    /// `k` exceeded `n` and was clamped.
    pub clamped: bool,
    /// Stratum redraws performed before the exhaustive check passed.
    pub attempts: u32,
}

/// ln C(n, t) via the sum of log ratios; exact enough for ceiling budgets.
fn ln_binomial(n: usize, t: usize) -> f64 {
    let t = t.min(n - t.min(n));
    (1..=t)
        .map(|j| (((n - t + j) as f64) / (j as f64)).ln())
        .sum()
}

/// The proof's per-stratum budget: `l_i = ceil(8 ln(C(n, 2^(i-1)) 2^i)) + 1`
/// for `i = 1..=ceil(log2 k)`.
pub fn default_stratum_sizes(n: usize, k: usize) -> Vec<usize> {
    let strata = (k.max(2) as f64).log2().ceil() as usize;
    (1..=strata)
        .map(|i| {
            let t = 1usize << (i - 1);
            let ln_total = ln_binomial(n, t.min(n)) + (i as f64) * std::f64::consts::LN_2;
            (8.0 * ln_total).ceil() as usize + 1
        })
        .collect()
}

fn draw_stratum(n: usize, count: usize, inv_prob_log2: usize, rng: &mut ChaCha8Rng) -> Vec<LabelSet> {
    // membership probability 2^-i, tested as "low i bits all zero"
    let mask: u64 = (1u64 << inv_prob_log2) - 1;
    (0..count)
        .map(|_| {
            let mut s = LabelSet::empty(n);
            for label in 1..=n {
                if rng.random::<u64>() & mask == 0 {
                    s.insert(label);
                }
            }
            s
        })
        .collect()
}

/// Build an (n,k)-selective family as the union of `ceil(log2 k)` strata;
/// stratum `i` holds `l_i` sets with per-label inclusion probability `2^-i`.
///
/// In verified mode the whole family is checked exhaustively; a failure
/// redraws only the stratum responsible for the witness size, up to the
/// retry limit.
pub fn build_selective(
    n: usize,
    k: usize,
    params: &ConstructionParams,
) -> Result<BuiltFamily, SetFamError> {
    if n == 0 {
        return Err(SetFamError::EmptyGround);
    }
    let clamped = k > n;
    let k = k.min(n);
    if k <= 1 {
        // any singleton Z has |Z ∩ [n]| = 1
        let family = SetFamily::new(n, vec![LabelSet::universe(n)])?.with_claim(KindClaim {
            kind: FamilyKind::Selective,
            k: 1,
            guarantee: Guarantee::Certified,
        });
        return Ok(BuiltFamily {
            family,
            clamped,
            attempts: 0,
        });
    }

    let defaults = default_stratum_sizes(n, k);
    let sizes = match &params.stratum_sizes {
        Some(sizes) => {
            if sizes.len() != defaults.len() {
                return Err(SetFamError::Unsupported(format!(
                    "expected {} strata, got {}",
                    defaults.len(),
                    sizes.len()
                )));
            }
            for (i, (&got, &req)) in sizes.iter().zip(&defaults).enumerate() {
                if got < req {
                    return Err(SetFamError::StratumTooSmall {
                        index: i + 1,
                        got,
                        required: req,
                    });
                }
            }
            sizes.clone()
        }
        None => defaults,
    };

    let verify_budget = match params.mode {
        GuaranteeMode::Probabilistic => None,
        GuaranteeMode::Verified { max_subsets } => Some(max_subsets),
        GuaranteeMode::Auto => {
            if n <= AUTO_VERIFY_MAX_N && k <= AUTO_VERIFY_MAX_K {
                Some(u64::MAX)
            } else {
                None
            }
        }
    };

    let mut stratum_nonce: Vec<u64> = vec![0; sizes.len()];
    let draw_all = |nonces: &[u64]| -> Vec<Vec<LabelSet>> {
        sizes
            .iter()
            .enumerate()
            .map(|(idx, &count)| {
                let i = idx + 1;
                let mut rng = ChaCha8Rng::seed_from_u64(
                    params
                        .seed
                        .wrapping_add((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
                        .wrapping_add(nonces[idx].wrapping_mul(0x2545_f491_4f6c_dd1d)),
                );
                draw_stratum(n, count, i, &mut rng)
            })
            .collect()
    };

    let assemble = |strata: &[Vec<LabelSet>]| -> Result<SetFamily, SetFamError> {
        SetFamily::new(n, strata.iter().flatten().cloned().collect())
    };

    let mut strata = draw_all(&stratum_nonce);
    let Some(budget) = verify_budget else {
        let family = assemble(&strata)?.with_claim(KindClaim {
            kind: FamilyKind::Selective,
            k,
            guarantee: Guarantee::Probabilistic,
        });
        return Ok(BuiltFamily {
            family,
            clamped,
            attempts: 0,
        });
    };

    let mut attempts: u32 = 0;
    loop {
        let family = assemble(&strata)?;
        match verify_selective_exact(&family, k, Some(budget))? {
            SelectiveVerdict::Pass => {
                let family = family.with_claim(KindClaim {
                    kind: FamilyKind::Selective,
                    k,
                    guarantee: Guarantee::Verified,
                });
                return Ok(BuiltFamily {
                    family,
                    clamped,
                    attempts,
                });
            }
            SelectiveVerdict::Fail { witness } => {
                if attempts >= params.retry_limit {
                    return Err(SetFamError::ConstructionFailure { attempts });
                }
                attempts += 1;
                // stratum i is responsible for witness sizes in (2^(i-1), 2^i]
                let size = witness.len().max(1);
                let idx = if size <= 2 {
                    0
                } else {
                    (usize::BITS - (size - 1).leading_zeros()) as usize - 1
                };
                let idx = idx.min(sizes.len() - 1);
                stratum_nonce[idx] += 1;
                strata[idx] = draw_all(&stratum_nonce)[idx].clone();
            }
        }
    }
}

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest m with q^m >= n.
fn digits_needed(n: usize, q: usize) -> usize {
    let mut m = 1;
    let mut pow = q as u128;
    while pow < n as u128 {
        pow *= q as u128;
        m += 1;
    }
    m
}

/// Build an (n,k)-strongly-selective family from polynomial evaluation codes
/// over GF(q), q the smallest prime with `q >= k(m-1)+1` for `m = ceil(log_q n)`.
///
/// Labels map to polynomials of degree < m (coefficients are the base-q digits
/// of `label-1`, little-endian); the family has one set per (position, symbol)
/// pair. Any two distinct polynomials agree on at most m-1 positions, so each
/// member of a k-subset keeps a private evaluation position — that set isolates
/// it. Falls back to the singleton family whenever q² >= n.
pub fn build_strongly_selective(n: usize, k: usize) -> Result<BuiltFamily, SetFamError> {
    if n == 0 {
        return Err(SetFamError::EmptyGround);
    }
    let clamped = k > n;
    let k = k.min(n).max(1);
    if k == 1 {
        let family = SetFamily::new(n, vec![LabelSet::universe(n)])?.with_claim(KindClaim {
            kind: FamilyKind::StronglySelective,
            k: 1,
            guarantee: Guarantee::Certified,
        });
        return Ok(BuiltFamily {
            family,
            clamped,
            attempts: 0,
        });
    }

    let mut q = 2;
    let (q, m) = loop {
        if is_prime(q) {
            let m = digits_needed(n, q);
            if q > k * (m - 1) {
                break (q, m);
            }
        }
        q += 1;
    };

    if q * q >= n {
        return Ok(BuiltFamily {
            family: SetFamily::singletons(n, k),
            clamped,
            attempts: 0,
        });
    }

    // coefficient rows: label-1 in base q, little-endian
    let mut coeffs = vec![vec![0usize; m]; n];
    for label in 1..=n {
        let mut v = label - 1;
        for c in coeffs[label - 1].iter_mut() {
            *c = v % q;
            v /= q;
        }
    }

    let mut sets = vec![LabelSet::empty(n); q * q];
    for pos in 0..q {
        for label in 1..=n {
            // Horner evaluation at x = pos over Z_q
            let mut acc = 0usize;
            for &c in coeffs[label - 1].iter().rev() {
                acc = (acc * pos + c) % q;
            }
            sets[pos * q + acc].insert(label);
        }
    }

    let family = SetFamily::new(n, sets)?.with_claim(KindClaim {
        kind: FamilyKind::StronglySelective,
        k,
        guarantee: Guarantee::Certified,
    });
    Ok(BuiltFamily {
        family,
        clamped,
        attempts: 0,
    })
}

/// Number of bits in the codewords assigned by [`build_r_different`].
pub fn codeword_bits(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Build `n` pairwise r-different sequences of length `2 * ceil(log2 n) * r`.
///
/// Slots form `2 ceil(log2 n)` blocks of `r`, one block per (bit position,
/// bit value). In block (b, β) a label whose bit b equals β emits symbol `z`
/// at the z-th slot of the block; everyone else stays at 0. Two distinct
/// labels differ at some bit b, so one of the blocks (b,0), (b,1) pairs every
/// symbol of one row with a 0 of the other.
pub fn build_r_different(n: usize, r: u32) -> SequenceSet {
    let bits = codeword_bits(n);
    let m = 2 * bits * r as usize;
    let rows = (1..=n)
        .map(|label| {
            let mut row = vec![0u32; m];
            for b in 0..bits {
                let beta = (label - 1) >> b & 1;
                let block = 2 * b + beta;
                for z in 1..=r {
                    row[block * r as usize + (z - 1) as usize] = z;
                }
            }
            row
        })
        .collect();
    SequenceSet::new(r, rows).expect("construction emits well-formed rows")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfam::verify::{
        verify_selective_exact, verify_strongly_selective_exact, SelectiveVerdict, StrongVerdict,
    };
    use crate::setfam::{verify_r_different, RDiffVerdict};

    #[test]
    fn stratum_budget_matches_spec_example() {
        // l_1 for (n=16, k=2): ceil(8 ln(16·2)) + 1 = 29
        assert_eq!(default_stratum_sizes(16, 2), vec![29]);
    }

    #[test]
    fn selective_k1_is_universe() {
        let built = build_selective(3, 1, &ConstructionParams::seeded(0)).unwrap();
        assert_eq!(built.family.len(), 1);
        assert_eq!(built.family.set(0).to_vec(), vec![1, 2, 3]);
        assert!(!built.clamped);
    }

    #[test]
    fn selective_verified_16_2() {
        let built = build_selective(16, 2, &ConstructionParams::seeded(1)).unwrap();
        assert_eq!(built.family.len(), 29);
        let claim = built.family.claim().unwrap();
        assert_eq!(claim.guarantee, Guarantee::Verified);
        assert_eq!(
            verify_selective_exact(&built.family, 2, None).unwrap(),
            SelectiveVerdict::Pass
        );
    }

    #[test]
    fn selective_verified_12_4_two_strata() {
        let built = build_selective(12, 4, &ConstructionParams::seeded(7)).unwrap();
        let sizes = default_stratum_sizes(12, 4);
        assert_eq!(sizes.len(), 2);
        assert_eq!(built.family.len(), sizes.iter().sum::<usize>());
        assert_eq!(
            verify_selective_exact(&built.family, 4, None).unwrap(),
            SelectiveVerdict::Pass
        );
    }

    #[test]
    fn selective_clamps_k_above_n() {
        let built = build_selective(4, 9, &ConstructionParams::seeded(3)).unwrap();
        assert!(built.clamped);
        assert_eq!(built.family.claim().unwrap().k, 4);
    }

    #[test]
    fn stratum_override_below_budget_rejected() {
        let mut p = ConstructionParams::seeded(0);
        p.stratum_sizes = Some(vec![5]);
        assert!(matches!(
            build_selective(16, 2, &p),
            Err(SetFamError::StratumTooSmall { .. })
        ));
    }

    #[test]
    fn strongly_selective_small_falls_back_to_singletons() {
        let built = build_strongly_selective(4, 4).unwrap();
        assert_eq!(built.family.len(), 4);
        for (i, s) in built.family.sets().iter().enumerate() {
            assert_eq!(s.to_vec(), vec![i + 1]);
        }
    }

    #[test]
    fn strongly_selective_64_3_uses_gf7() {
        let built = build_strongly_selective(64, 3).unwrap();
        assert_eq!(built.family.len(), 49);
        assert_eq!(
            verify_strongly_selective_exact(&built.family, 3, None).unwrap(),
            StrongVerdict::Pass
        );
    }

    #[test]
    fn strongly_selective_9_2_equality_falls_back() {
        // q = 3 gives q² = 9 = n; the fallback rule is q² >= n.
        let built = build_strongly_selective(9, 2).unwrap();
        assert_eq!(built.family.len(), 9);
        assert_eq!(
            verify_strongly_selective_exact(&built.family, 2, None).unwrap(),
            StrongVerdict::Pass
        );
    }

    #[test]
    fn r_different_n2_r1_matches_hand_value() {
        let s = build_r_different(2, 1);
        assert_eq!(s.length(), 2);
        assert_eq!(s.row(0), &[1, 0]);
        assert_eq!(s.row(1), &[0, 1]);
    }

    #[test]
    fn r_different_lengths_and_checker() {
        for (n, r) in [(4usize, 2u32), (64, 8), (5, 3)] {
            let s = build_r_different(n, r);
            assert_eq!(s.length(), 2 * codeword_bits(n) * r as usize);
            assert_eq!(verify_r_different(&s), RDiffVerdict::Pass);
        }
    }
}
