//! Broadcast instances: a graph, a multiset of sources with message counts,
//! and a channel mode. Message identity is the pair (source label, sequence
//! number) under lexicographic priority order.

use super::graph::{GraphError, RadioGraph};
use crate::Label;

/// Bounded bandwidth (one message per transmission) vs unbounded bandwidth
/// (arbitrary message sets per transmission).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelMode {
    Bounded,
    Unbounded,
}

/// A broadcast message, identified by its source label and per-source
/// sequence number. The derived order is the protocol priority order:
/// (l,h) < (l',h') iff l < l' or (l = l' and h < h').
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Message {
    pub source: Label,
    pub seq: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastInstance {
    graph: RadioGraph,
    /// Normalized: sorted by label, counts merged, every count >= 1.
    sources: Vec<(Label, u32)>,
    mode: ChannelMode,
}

impl BroadcastInstance {
    pub fn new(
        graph: RadioGraph,
        sources: &[(Label, u32)],
        mode: ChannelMode,
    ) -> Result<Self, GraphError> {
        let n = graph.node_count();
        let mut merged: Vec<(Label, u32)> = Vec::new();
        for &(l, c) in sources {
            if l == 0 || l > n {
                return Err(GraphError::LabelOutOfRange { label: l, n });
            }
            if c == 0 {
                continue;
            }
            match merged.iter_mut().find(|(ml, _)| *ml == l) {
                Some((_, mc)) => *mc += c,
                None => merged.push((l, c)),
            }
        }
        merged.sort_unstable();
        assert!(
            merged.iter().map(|&(_, c)| c as u64).sum::<u64>() >= 1,
            "instance needs at least one message"
        );
        Ok(BroadcastInstance {
            graph,
            sources: merged,
            mode,
        })
    }

    /// Single broadcast: one message at one source.
    pub fn single(graph: RadioGraph, source: Label, mode: ChannelMode) -> Result<Self, GraphError> {
        Self::new(graph, &[(source, 1)], mode)
    }

    pub fn graph(&self) -> &RadioGraph {
        &self.graph
    }

    pub fn sources(&self) -> &[(Label, u32)] {
        &self.sources
    }

    pub fn mode(&self) -> ChannelMode {
        self.mode
    }

    pub fn message_count(&self) -> usize {
        self.sources.iter().map(|&(_, c)| c as usize).sum()
    }

    /// All messages in priority order.
    pub fn messages(&self) -> Vec<Message> {
        self.sources
            .iter()
            .flat_map(|&(l, c)| (1..=c).map(move |h| Message { source: l, seq: h }))
            .collect()
    }

    /// Per-node initial endowment, in node order.
    pub fn endowments(&self) -> Vec<(Label, Vec<Message>)> {
        self.sources
            .iter()
            .map(|&(l, c)| (l, (1..=c).map(|h| Message { source: l, seq: h }).collect()))
            .collect()
    }

    pub fn metrics(&self) -> InstanceMetrics {
        let n = self.graph.node_count();
        let mut d = 0;
        let mut reach_count = vec![0u32; n + 1];
        for &(l, c) in &self.sources {
            let dist = self.graph.distances(l);
            d = d.max(dist.iter().flatten().copied().max().unwrap_or(0));
            for u in 1..=n {
                if dist[u].is_some() {
                    reach_count[u] += c;
                }
            }
        }
        InstanceMetrics {
            n,
            r: self.message_count(),
            d,
            delta: self.graph.max_in_degree(),
            congestion: reach_count.iter().copied().max().unwrap_or(0) as usize,
        }
    }
}

/// The parameters every bound in this crate is phrased in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceMetrics {
    pub n: usize,
    pub r: usize,
    /// Max eccentricity over the instance's sources (hops).
    pub d: u32,
    /// Max in-degree.
    pub delta: usize,
    /// Max over nodes of the number of messages whose source reaches it.
    pub congestion: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> RadioGraph {
        RadioGraph::from_edges(n, &(1..n).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn priority_order_is_lexicographic() {
        let a = Message { source: 1, seq: 2 };
        let b = Message { source: 2, seq: 1 };
        let c = Message { source: 1, seq: 1 };
        assert!(c < a && a < b);
    }

    #[test]
    fn single_broadcast_congestion_is_one() {
        let inst = BroadcastInstance::single(path(5), 1, ChannelMode::Bounded).unwrap();
        let m = inst.metrics();
        assert_eq!(m.congestion, 1);
        assert_eq!(m.d, 4);
        assert_eq!(m.r, 1);
    }

    #[test]
    fn congestion_one_even_without_edges() {
        let g = RadioGraph::from_edges(2, &[]).unwrap();
        let inst = BroadcastInstance::single(g, 1, ChannelMode::Unbounded).unwrap();
        assert_eq!(inst.metrics().congestion, 1);
        assert_eq!(inst.metrics().d, 0);
    }

    #[test]
    fn disjoint_sources_keep_congestion_one() {
        // 1 -> 2, 3 -> 4: reachable sets of the two sources are disjoint
        let g = RadioGraph::from_edges(4, &[(1, 2), (3, 4)]).unwrap();
        let inst = BroadcastInstance::new(g, &[(1, 1), (3, 1)], ChannelMode::Bounded).unwrap();
        assert_eq!(inst.metrics().congestion, 1);
    }

    #[test]
    fn sources_merge_counts() {
        let inst =
            BroadcastInstance::new(path(3), &[(1, 2), (1, 1)], ChannelMode::Bounded).unwrap();
        assert_eq!(inst.sources(), &[(1, 3)]);
        assert_eq!(inst.message_count(), 3);
        assert_eq!(
            inst.messages(),
            vec![
                Message { source: 1, seq: 1 },
                Message { source: 1, seq: 2 },
                Message { source: 1, seq: 3 }
            ]
        );
    }
}
