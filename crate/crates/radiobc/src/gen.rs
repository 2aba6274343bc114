//! Graph generators covering the topologies the protocols and bounds are
//! phrased in, plus seeded random baselines.

use crate::radiosim::{GraphError, RadioGraph};
use crate::Label;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Directed path 1 -> 2 -> ... -> n.
pub fn path(n: usize) -> Result<RadioGraph, GraphError> {
    RadioGraph::from_edges(n, &(1..n).map(|i| (i, i + 1)).collect::<Vec<_>>())
}

/// Star: 1 -> i for all i.
pub fn star(n: usize) -> Result<RadioGraph, GraphError> {
    RadioGraph::from_edges(n, &(2..=n).map(|i| (1, i)).collect::<Vec<_>>())
}

/// Layered graph with the given level sizes (level 0 first), full bipartite
/// between consecutive levels. Labels are assigned level by level.
pub fn layered_full(level_sizes: &[usize]) -> Result<RadioGraph, GraphError> {
    let n: usize = level_sizes.iter().sum();
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut edges = Vec::new();
    let mut start = 1;
    for w in level_sizes.windows(2) {
        let (a, b) = (w[0], w[1]);
        for u in start..start + a {
            for v in start + a..start + a + b {
                edges.push((u, v));
            }
        }
        start += a;
    }
    RadioGraph::from_edges(n, &edges)
}

/// Layered graph where each non-top node draws 1..=max_in random in-neighbors
/// from the previous level: distances stay equal to level indices.
pub fn layered_random(
    level_sizes: &[usize],
    max_in: usize,
    seed: u64,
) -> Result<RadioGraph, GraphError> {
    let n: usize = level_sizes.iter().sum();
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut start = 1;
    for w in level_sizes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let prev: Vec<Label> = (start..start + a).collect();
        for v in start + a..start + a + b {
            let d = rng.random_range(1..=max_in.min(prev.len()));
            let mut picks = prev.clone();
            picks.shuffle(&mut rng);
            for &u in picks.iter().take(d) {
                edges.push((u, v));
            }
        }
        start += a;
    }
    RadioGraph::from_edges(n, &edges)
}

/// Random digraph with max in-degree <= delta, in-neighbors drawn without
/// replacement. With `ensure_reach`, every node keeps one in-edge from a
/// lower label so everything is reachable from node 1.
pub fn random_digraph(
    n: usize,
    delta: usize,
    seed: u64,
    ensure_reach: bool,
) -> Result<RadioGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 2..=n {
        let cap = delta.min(n - 1).max(1);
        let d = rng.random_range(1..=cap);
        let mut ins: Vec<Label> = Vec::with_capacity(d);
        if ensure_reach {
            ins.push(rng.random_range(1..v));
        }
        let mut guard = 0;
        while ins.len() < d && guard < 100 * n {
            guard += 1;
            let u = rng.random_range(1..=n);
            if u != v && !ins.contains(&u) {
                ins.push(u);
            }
        }
        edges.extend(ins.into_iter().map(|u| (u, v)));
    }
    RadioGraph::from_edges(n, &edges)
}

/// The three-level instance family graph: source 1 feeds every second-level
/// node 2..=n-1; the sink n hears exactly `u` and `v` from the second level.
pub fn guv_graph(n: usize, u: Label, v: Label) -> Result<RadioGraph, GraphError> {
    assert!(n >= 4, "guv graphs need n >= 4");
    assert!(u != v && u >= 2 && v < n && u < n && v >= 2);
    let mut edges: Vec<(Label, Label)> = (2..=n - 1).map(|i| (1, i)).collect();
    edges.push((u, n));
    edges.push((v, n));
    RadioGraph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layered_distances_equal_levels() {
        let g = layered_full(&[1, 2, 2]).unwrap();
        let d = g.distances(1);
        assert_eq!(d[2], Some(1));
        assert_eq!(d[3], Some(1));
        assert_eq!(d[4], Some(2));
        assert_eq!(d[5], Some(2));
    }

    #[test]
    fn layered_random_respects_cap_and_levels() {
        for seed in 0..5 {
            let sizes = [1usize, 3, 4, 2];
            let g = layered_random(&sizes, 2, seed).unwrap();
            assert!(g.max_in_degree() <= 2);
            let d = g.distances(1);
            let mut start = 1;
            for (level, &sz) in sizes.iter().enumerate() {
                for u in start..start + sz {
                    assert_eq!(d[u], Some(level as u32), "node {u}");
                }
                start += sz;
            }
        }
    }

    #[test]
    fn random_digraph_reachable_and_capped() {
        for seed in 0..10 {
            let g = random_digraph(24, 3, seed, true).unwrap();
            assert!(g.max_in_degree() <= 3);
            let d = g.distances(1);
            assert!((2..=24).all(|u| d[u].is_some()), "seed {seed}");
        }
    }

    #[test]
    fn guv_shape() {
        let g = guv_graph(6, 3, 5).unwrap();
        assert_eq!(g.in_neighbors(6), &[3, 5]);
        assert_eq!(g.in_degree(2), 1);
        assert_eq!(g.max_in_degree(), 2);
    }
}
