//! Directed graphs on labels 1..=n with mutually consistent in/out adjacency.

use crate::Label;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node count must be >= 1")]
    Empty,
    #[error("label {label} out of range 1..={n}")]
    LabelOutOfRange { label: Label, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(Label),
    #[error("parallel edge {0} -> {1}")]
    ParallelEdge(Label, Label),
}

/// A directed radio network. Symmetric links are explicit antiparallel edge
/// pairs; self-loops and parallel edges are rejected outright.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadioGraph {
    n: usize,
    out_adj: Vec<Vec<Label>>,
    in_adj: Vec<Vec<Label>>,
}

impl RadioGraph {
    pub fn from_edges(n: usize, edges: &[(Label, Label)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut out_adj = vec![Vec::new(); n + 1];
        let mut in_adj = vec![Vec::new(); n + 1];
        for &(u, v) in edges {
            for l in [u, v] {
                if l == 0 || l > n {
                    return Err(GraphError::LabelOutOfRange { label: l, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        for u in 1..=n {
            out_adj[u].sort_unstable();
            in_adj[u].sort_unstable();
            if out_adj[u].windows(2).any(|w| w[0] == w[1]) {
                let v = out_adj[u].windows(2).find(|w| w[0] == w[1]).unwrap()[0];
                return Err(GraphError::ParallelEdge(u, v));
            }
        }
        Ok(RadioGraph { n, out_adj, in_adj })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn out_neighbors(&self, u: Label) -> &[Label] {
        &self.out_adj[u]
    }

    pub fn in_neighbors(&self, u: Label) -> &[Label] {
        &self.in_adj[u]
    }

    pub fn in_degree(&self, u: Label) -> usize {
        self.in_adj[u].len()
    }

    pub fn max_in_degree(&self) -> usize {
        (1..=self.n).map(|u| self.in_adj[u].len()).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        (1..=self.n).map(|u| self.out_adj[u].len()).sum()
    }

    /// Edges in (source, target) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Label, Label)> + '_ {
        (1..=self.n).flat_map(move |u| self.out_adj[u].iter().map(move |&v| (u, v)))
    }

    /// BFS distances from `src`; `None` for unreachable nodes.
    pub fn distances(&self, src: Label) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n + 1];
        dist[src] = Some(0);
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.out_adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Max finite distance from `src` (0 when nothing is reachable).
    pub fn eccentricity(&self, src: Label) -> u32 {
        self.distances(src).iter().flatten().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_is_consistent_and_sorted() {
        let g = RadioGraph::from_edges(4, &[(1, 3), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(g.out_neighbors(1), &[2, 3]);
        assert_eq!(g.in_neighbors(3), &[1, 2]);
        assert_eq!(g.max_in_degree(), 2);
    }

    #[test]
    fn rejects_self_loop_and_parallel() {
        assert_eq!(
            RadioGraph::from_edges(2, &[(1, 1)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            RadioGraph::from_edges(2, &[(1, 2), (1, 2)]),
            Err(GraphError::ParallelEdge(1, 2))
        );
    }

    #[test]
    fn distances_on_path() {
        let g = RadioGraph::from_edges(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(g.distances(1), vec![None, Some(0), Some(1), Some(2), Some(3)]);
        assert_eq!(g.eccentricity(1), 3);
        assert_eq!(g.eccentricity(4), 0);
    }
}
