//! Module-level invariants from the combinatorial side: implications between
//! family kinds, construction size budgets, oracle dominance, and format
//! round-trips under random values.

mod common;

use common::verified_selective;
use proptest::prelude::*;
use radiobc::io::{format_seqset, format_setfam, parse_seqset, parse_setfam};
use radiobc::setfam::{
    build_r_different, build_strongly_selective, default_stratum_sizes,
    min_selective_size_bruteforce, verify_r_different, verify_selective_exact,
    verify_strongly_selective_exact, FamilyKind, Guarantee, KindClaim, LabelSet, RDiffVerdict,
    SelectiveVerdict, SequenceSet, SetFamily, StrongVerdict,
};

#[test]
fn strong_selectivity_implies_selectivity() {
    for (n, k) in [(6usize, 2usize), (9, 2), (12, 3), (16, 2), (10, 4)] {
        let fam = build_strongly_selective(n, k).unwrap().family;
        assert_eq!(
            verify_strongly_selective_exact(&fam, k, None).unwrap(),
            StrongVerdict::Pass
        );
        assert_eq!(
            verify_selective_exact(&fam, k, None).unwrap(),
            SelectiveVerdict::Pass,
            "strong family (n={n},k={k}) must also be selective"
        );
    }
}

#[test]
fn strongly_selective_size_bound() {
    // size <= min(n, 4 k^2 (ceil(log2 n)+1)^2); Bertrand's postulate bounds
    // the prime search, so this is a construction identity
    for &n in &[16usize, 64, 256, 1024, 4096] {
        for &k in &[1usize, 2, 3, 5, 8, 16] {
            let fam = build_strongly_selective(n, k).unwrap().family;
            let log = (usize::BITS - (n - 1).leading_zeros()) as usize;
            let bound = (4 * k * k * (log + 1) * (log + 1)).min(n);
            assert!(
                fam.len() <= bound,
                "(n={n},k={k}): size {} > bound {bound}",
                fam.len()
            );
        }
    }
}

#[test]
fn selective_verified_size_matches_stratum_budget() {
    for (n, k) in [(12usize, 4usize), (16, 4), (24, 6), (20, 3)] {
        let fam = verified_selective(n, k, 42);
        let budget: usize = default_stratum_sizes(n, k).iter().sum();
        assert_eq!(fam.len(), budget, "construction emits exactly the budget");
    }
}

#[test]
fn bruteforce_oracle_dominates_constructions() {
    for n in 2..=6usize {
        for k in 1..=3.min(n) {
            let oracle = min_selective_size_bruteforce(n, k, false).unwrap();
            let constructed = verified_selective(n, k, 5);
            assert!(
                oracle <= constructed.len(),
                "(n={n},k={k}): oracle {oracle} > constructed {}",
                constructed.len()
            );
            let strong_oracle = min_selective_size_bruteforce(n, k, true).unwrap();
            let strong = build_strongly_selective(n, k).unwrap().family;
            assert!(strong_oracle <= strong.len());
            assert!(oracle <= strong_oracle, "selective never needs more sets");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn r_different_construction_always_verifies(n in 2usize..80, r in 1u32..9) {
        let seqs = build_r_different(n, r);
        let bits = (usize::BITS - (n - 1).leading_zeros()) as usize;
        prop_assert_eq!(seqs.length(), 2 * bits * r as usize);
        prop_assert_eq!(verify_r_different(&seqs), RDiffVerdict::Pass);
    }

    #[test]
    fn setfam_roundtrip_random(n in 1usize..40, picks in prop::collection::vec(prop::collection::vec(any::<u16>(), 0..12), 0..12)) {
        let sets: Vec<LabelSet> = picks
            .iter()
            .map(|labels| {
                let mut s = LabelSet::empty(n);
                for &raw in labels {
                    s.insert((raw as usize % n) + 1);
                }
                s
            })
            .collect();
        let fam = SetFamily::new(n, sets).unwrap().with_claim(KindClaim {
            kind: FamilyKind::Selective,
            k: 1,
            guarantee: Guarantee::Probabilistic,
        });
        let text = format_setfam(&fam);
        let back = parse_setfam(&text).unwrap();
        prop_assert_eq!(&back, &fam);
        prop_assert_eq!(format_setfam(&back), text);
    }

    #[test]
    fn seqset_roundtrip_random(r in 1u32..6, rows in prop::collection::vec(prop::collection::vec(any::<u32>(), 0..10), 1..8)) {
        let m = rows[0].len();
        let rows: Vec<Vec<u32>> = rows
            .into_iter()
            .map(|mut row| {
                row.resize(m, 0);
                row.iter_mut().for_each(|v| *v %= r + 1);
                row
            })
            .collect();
        let seqs = SequenceSet::new(r, rows).unwrap();
        let text = format_seqset(&seqs);
        let back = parse_seqset(&text).unwrap();
        prop_assert_eq!(&back, &seqs);
        prop_assert_eq!(format_seqset(&back), text);
    }

    #[test]
    fn parsers_never_panic_on_noise(input in "\\PC*") {
        let _ = parse_setfam(&input);
        let _ = parse_seqset(&input);
        let _ = radiobc::io::parse_advgraph(&input);
    }
}
