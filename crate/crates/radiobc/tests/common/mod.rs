//! Shared corpus and family helpers for the integration suites.

use radiobc::gen;
use radiobc::radiosim::RadioGraph;
use radiobc::setfam::{
    build_selective, verify_selective_exact, ConstructionParams, GuaranteeMode, SelectiveVerdict,
    SetFamily,
};
use std::sync::Arc;

/// Build an (n,k)-selective family in verified mode (unbounded check budget)
/// and double-check the claim with the exhaustive verifier.
pub fn verified_selective(n: usize, k: usize, seed: u64) -> Arc<SetFamily> {
    let params = ConstructionParams::seeded(seed).with_mode(GuaranteeMode::Verified {
        max_subsets: u64::MAX,
    });
    let built = build_selective(n, k, &params).expect("construction with retries succeeds");
    assert_eq!(
        verify_selective_exact(&built.family, k, None).unwrap(),
        SelectiveVerdict::Pass
    );
    Arc::new(built.family)
}

/// (n, max in-degree) pairs whose (n, Δ)-selectivity is exhaustively
/// checkable at desk scale; Δ reaches 8 at small n, n reaches 128 at small Δ.
pub const CORPUS_PAIRS: &[(usize, usize)] = &[
    (16, 8),
    (16, 6),
    (24, 6),
    (24, 4),
    (32, 6),
    (32, 4),
    (48, 4),
    (64, 4),
    (64, 3),
    (96, 3),
    (128, 3),
    (128, 2),
];

/// Seeded random digraphs over the corpus pairs, everything reachable from
/// node 1.
pub fn corpus_graphs(count: usize) -> Vec<(RadioGraph, usize)> {
    (0..count)
        .map(|i| {
            let (n, delta) = CORPUS_PAIRS[i % CORPUS_PAIRS.len()];
            let g = gen::random_digraph(n, delta, i as u64, true).expect("generator succeeds");
            (g, delta)
        })
        .collect()
}
