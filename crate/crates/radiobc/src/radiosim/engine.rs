//! The slot loop: query every node's action, apply the collision rule,
//! deliver, and keep the books.

use super::graph::RadioGraph;
use super::instance::{BroadcastInstance, ChannelMode, Message};
use super::trace::{SimTrace, SlotRecord, StopReason};
use super::{Action, SimError};
use crate::protocols::ProtocolSchedule;
use crate::Label;
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// One synchronous slot. A node receives iff it listens and exactly one of
/// its in-neighbors transmits; two or more transmitting in-neighbors collide
/// and deliver nothing, indistinguishable from silence.
///
/// `actions[i]` is the action of node `i+1`. In bounded-bandwidth mode every
/// transmission must carry exactly one message.
pub fn step(
    graph: &RadioGraph,
    actions: &[Action],
    mode: ChannelMode,
) -> Result<Vec<(Label, Vec<Message>)>, SimError> {
    let n = graph.node_count();
    debug_assert_eq!(actions.len(), n);
    for (i, a) in actions.iter().enumerate() {
        if let Action::Transmit(payload) = a {
            if mode == ChannelMode::Bounded && payload.len() != 1 {
                return Err(SimError::BandwidthViolation {
                    node: i + 1,
                    slot: 0,
                    got: payload.len(),
                });
            }
        }
    }
    let mut deliveries = Vec::new();
    for u in 1..=n {
        if !matches!(actions[u - 1], Action::Receive) {
            continue;
        }
        let mut sole: Option<Label> = None;
        let mut collided = false;
        for &v in graph.in_neighbors(u) {
            if actions[v - 1].is_transmit() {
                if sole.is_some() {
                    collided = true;
                    break;
                }
                sole = Some(v);
            }
        }
        if collided {
            continue;
        }
        if let Some(v) = sole {
            if let Action::Transmit(payload) = &actions[v - 1] {
                deliveries.push((u, payload.to_vec()));
            }
        }
    }
    Ok(deliveries)
}

/// Drive `protocol` on `instance` for at most `max_slots` slots.
///
/// The protocol callback sees only (label, slot, its own deliveries); the
/// run stops early once every node is inactive or the protocol reports
/// quiescence. Monotone inactivity is enforced: a node acting again after
/// an Inactive action is a contract violation.
pub fn run(
    instance: &BroadcastInstance,
    protocol: &mut dyn ProtocolSchedule,
    max_slots: u64,
) -> Result<SimTrace, SimError> {
    if max_slots == 0 {
        return Err(SimError::ZeroHorizon);
    }
    let graph = instance.graph();
    let n = graph.node_count();
    let mode = instance.mode();
    protocol.begin(n, &instance.endowments());

    // (node, message) pairs the run owes: reachable at distance >= 1
    let mut owed: Vec<BTreeSet<Message>> = vec![BTreeSet::new(); n + 1];
    let mut owed_remaining: u64 = 0;
    for &(src, count) in instance.sources() {
        let dist = graph.distances(src);
        for u in 1..=n {
            if u != src && dist[u].is_some() {
                for h in 1..=count {
                    if owed[u].insert(Message { source: src, seq: h }) {
                        owed_remaining += 1;
                    }
                }
            }
        }
    }

    let mut slots: Vec<SlotRecord> = Vec::new();
    let mut first_rx: Vec<BTreeMap<Message, u64>> = vec![BTreeMap::new(); n];
    let mut inactive_from: Vec<Option<u64>> = vec![None; n];
    let mut completion_slot: Option<u64> = if owed_remaining == 0 { Some(0) } else { None };
    let mut last_active: Option<u64> = None;
    let mut stop = StopReason::Horizon;
    let mut termination_slot = None;

    let mut actions: Vec<Action> = Vec::with_capacity(n);
    for slot in 0..max_slots {
        if protocol.is_quiescent(slot) {
            stop = StopReason::Quiescent;
            break;
        }
        actions.clear();
        for u in 1..=n {
            actions.push(protocol.act(u, slot));
        }
        let mut all_inactive = true;
        for u in 1..=n {
            match &actions[u - 1] {
                Action::Inactive => {
                    if inactive_from[u - 1].is_none() {
                        inactive_from[u - 1] = Some(slot);
                    }
                }
                _ => {
                    all_inactive = false;
                    if let Some(s) = inactive_from[u - 1] {
                        return Err(SimError::InactiveReactivated { node: u, slot: s });
                    }
                }
            }
        }
        if all_inactive {
            stop = StopReason::AllInactive;
            termination_slot = last_active;
            break;
        }
        last_active = Some(slot);

        let deliveries = step(graph, &actions, mode).map_err(|e| match e {
            SimError::BandwidthViolation { node, got, .. } => {
                SimError::BandwidthViolation { node, slot, got }
            }
            other => other,
        })?;

        let transmits: Vec<(Label, std::sync::Arc<[Message]>)> = actions
            .iter()
            .enumerate()
            .filter_map(|(i, a)| match a {
                Action::Transmit(p) => Some((i + 1, p.clone())),
                _ => None,
            })
            .collect();

        for (u, msgs) in &deliveries {
            protocol.observe(*u, slot, msgs);
            for &m in msgs {
                first_rx[*u - 1].entry(m).or_insert(slot);
                if owed[*u].remove(&m) {
                    owed_remaining -= 1;
                    if owed_remaining == 0 && completion_slot.is_none() {
                        completion_slot = Some(slot);
                    }
                }
            }
        }
        slots.push(SlotRecord {
            transmits,
            deliveries,
        });
    }

    Ok(SimTrace {
        n,
        slots,
        first_rx,
        inactive_from,
        completion_slot,
        termination_slot,
        stop,
        horizon: max_slots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn msg(l: Label) -> Message {
        Message { source: l, seq: 1 }
    }

    fn tx(l: Label) -> Action {
        Action::Transmit(Arc::from(vec![msg(l)]))
    }

    #[test]
    fn collision_delivers_nothing() {
        // u = 3 listens; both in-neighbors 1, 2 transmit
        let g = RadioGraph::from_edges(3, &[(1, 3), (2, 3)]).unwrap();
        let actions = vec![tx(1), tx(2), Action::Receive];
        let d = step(&g, &actions, ChannelMode::Bounded).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn sole_transmitter_delivers() {
        let g = RadioGraph::from_edges(3, &[(1, 3), (2, 3)]).unwrap();
        let actions = vec![tx(1), Action::Receive, Action::Receive];
        let d = step(&g, &actions, ChannelMode::Bounded).unwrap();
        assert_eq!(d, vec![(3, vec![msg(1)])]);
    }

    #[test]
    fn silence_delivers_nothing() {
        let g = RadioGraph::from_edges(2, &[(1, 2)]).unwrap();
        let actions = vec![Action::Receive, Action::Receive];
        assert!(step(&g, &actions, ChannelMode::Bounded)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn transmitter_cannot_receive() {
        let g = RadioGraph::from_edges(2, &[(1, 2), (2, 1)]).unwrap();
        let actions = vec![tx(1), tx(2)];
        assert!(step(&g, &actions, ChannelMode::Bounded)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn bounded_mode_rejects_multipayload() {
        let g = RadioGraph::from_edges(2, &[(1, 2)]).unwrap();
        let actions = vec![
            Action::Transmit(Arc::from(vec![msg(1), Message { source: 1, seq: 2 }])),
            Action::Receive,
        ];
        assert!(matches!(
            step(&g, &actions, ChannelMode::Bounded),
            Err(SimError::BandwidthViolation { node: 1, got: 2, .. })
        ));
        assert!(step(&g, &actions, ChannelMode::Unbounded).is_ok());
    }

    #[test]
    fn inactive_nodes_do_not_receive() {
        let g = RadioGraph::from_edges(2, &[(1, 2)]).unwrap();
        let actions = vec![tx(1), Action::Inactive];
        assert!(step(&g, &actions, ChannelMode::Bounded)
            .unwrap()
            .is_empty());
    }
}
