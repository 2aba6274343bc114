//! The three-level congestion family: a source holding r messages feeds a
//! large second level; a sink hears exactly two second-level nodes. Any
//! schedule completing on every member of the family must make the second
//! level's transmission rows pairwise r-different — extract_sequences turns
//! traces into exactly those rows.

use super::AdversaryError;
use crate::gen::guv_graph;
use crate::radiosim::{BroadcastInstance, ChannelMode, Message, RadioGraph, SimTrace};
use crate::setfam::SequenceSet;
use crate::Label;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuvInstance {
    pub u: Label,
    pub v: Label,
    pub instance: BroadcastInstance,
}

impl GuvInstance {
    pub fn second_level(&self) -> Vec<Label> {
        let n = self.instance.graph().node_count();
        (2..=n - 1).collect()
    }

    pub fn sink(&self) -> Label {
        self.instance.graph().node_count()
    }
}

/// All C(n-2, 2) instances G_{u,v} for {u,v} ⊆ {2..n-1}, each with r
/// messages at the source and congestion r at the sink.
pub fn build_guv_family(
    n: usize,
    r: u32,
) -> Result<impl Iterator<Item = GuvInstance>, AdversaryError> {
    if n < 4 {
        return Err(AdversaryError::BadParams(format!(
            "guv family needs n >= 4, got {n}"
        )));
    }
    if r == 0 {
        return Err(AdversaryError::BadParams("need r >= 1 messages".into()));
    }
    let pairs: Vec<(Label, Label)> = (2..=n - 1)
        .flat_map(|u| ((u + 1)..=n - 1).map(move |v| (u, v)))
        .collect();
    Ok(pairs.into_iter().map(move |(u, v)| {
        let graph = guv_graph(n, u, v).expect("parameters validated");
        let instance =
            BroadcastInstance::new(graph, &[(1, r)], ChannelMode::Bounded).expect("source valid");
        GuvInstance { u, v, instance }
    }))
}

/// Multi-source variant: the r sources are the leaves of a binary directed
/// tree whose root takes the flat family's source role. Eccentricity grows
/// by log2(r) over the flat instances.
pub fn build_tree_multisource(
    r: u32,
    extra_second_level: usize,
) -> Result<BroadcastInstance, AdversaryError> {
    if r < 2 || !r.is_power_of_two() {
        return Err(AdversaryError::BadParams(format!(
            "r must be a power of two >= 2 (pad the message multiset with copies to round up), got {r}"
        )));
    }
    if extra_second_level < 2 {
        return Err(AdversaryError::BadParams(
            "the sink needs two second-level in-neighbors".into(),
        ));
    }
    let r = r as usize;
    // labels: leaves 1..=r, then internal tree levels toward the root,
    // then the second level, then the sink
    let tree_nodes = 2 * r - 1;
    let n = tree_nodes + extra_second_level + 1;
    let mut edges: Vec<(Label, Label)> = Vec::new();
    // level by level: nodes c..c+w pair up into parents starting at c+w
    let mut child_start = 1;
    let mut width = r;
    while width > 1 {
        let parent_start = child_start + width;
        for i in 0..width / 2 {
            edges.push((child_start + 2 * i, parent_start + i));
            edges.push((child_start + 2 * i + 1, parent_start + i));
        }
        child_start = parent_start;
        width /= 2;
    }
    let root = child_start;
    debug_assert_eq!(root, tree_nodes);
    let second_start = tree_nodes + 1;
    for i in 0..extra_second_level {
        edges.push((root, second_start + i));
    }
    let sink = n;
    edges.push((second_start, sink));
    edges.push((second_start + 1, sink));
    let graph = RadioGraph::from_edges(n, &edges)?;
    let sources: Vec<(Label, u32)> = (1..=r).map(|l| (l, 1)).collect();
    Ok(BroadcastInstance::new(graph, &sources, ChannelMode::Bounded)?)
}

/// One row per second-level node over the trace's slots: entry z > 0 where
/// the node transmitted the z-th message of the priority enumeration, 0
/// where it listened or the payload identifies no single message.
pub fn extract_sequences(
    trace: &SimTrace,
    second_level: &[Label],
    messages: &[Message],
) -> Result<SequenceSet, AdversaryError> {
    for &l in second_level {
        if l == 0 || l > trace.n {
            return Err(AdversaryError::LabelOutsideTrace(l));
        }
    }
    let mut nodes: Vec<Label> = second_level.to_vec();
    nodes.sort_unstable();
    let t_len = trace.slots.len();
    let mut rows = vec![vec![0u32; t_len]; nodes.len()];
    for (t, rec) in trace.slots.iter().enumerate() {
        for &(sender, ref payload) in &rec.transmits {
            if let Ok(row) = nodes.binary_search(&sender) {
                if payload.len() == 1 {
                    if let Some(z) = messages.iter().position(|&m| m == payload[0]) {
                        rows[row][t] = z as u32 + 1;
                    }
                }
            }
        }
    }
    Ok(SequenceSet::new(messages.len() as u32, rows).expect("rows are well-formed"))
}
