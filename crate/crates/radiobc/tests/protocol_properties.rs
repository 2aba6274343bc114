//! Protocol- and simulator-level properties on seeded corpora: level
//! synchrony, trace soundness, mode agreement, determinism, quiescence.

mod common;

use common::{corpus_graphs, verified_selective};
use radiobc::protocols::{
    broad_a, broad_b, multi_bb_broad_a, oblivious_family_schedule, prot_alpha, round_robin,
    FamilyCache, ProtocolSchedule,
};
use radiobc::radiosim::{
    default_horizon, run, Action, BroadcastInstance, ChannelMode, Message, SimTrace,
};
use radiobc::setfam::build_strongly_selective;
use radiobc::{gen, Label};
use std::collections::BTreeSet;
use std::sync::Arc;

/// No creation: every transmitted message was endowed or delivered to the
/// transmitter in an earlier slot.
fn audit_no_creation(instance: &BroadcastInstance, trace: &SimTrace) {
    let n = instance.graph().node_count();
    let mut known: Vec<BTreeSet<Message>> = vec![BTreeSet::new(); n + 1];
    for (label, msgs) in instance.endowments() {
        known[label].extend(msgs);
    }
    for (t, rec) in trace.slots.iter().enumerate() {
        for (sender, payload) in &rec.transmits {
            for m in payload.iter() {
                assert!(
                    known[*sender].contains(m),
                    "slot {t}: node {sender} transmitted unknown {m:?}"
                );
            }
        }
        for (receiver, msgs) in &rec.deliveries {
            known[*receiver].extend(msgs.iter().copied());
        }
    }
}

#[test]
fn broad_a_level_synchrony_small_corpus() {
    for (i, (graph, delta)) in corpus_graphs(12).into_iter().enumerate() {
        let n = graph.node_count();
        let fam = verified_selective(n, delta, 1000 + i as u64);
        let dist = graph.distances(1);
        let inst = BroadcastInstance::single(graph, 1, ChannelMode::Bounded).unwrap();
        let mut proto = broad_a(n, delta, fam.clone()).unwrap();
        let trace = run(&inst, &mut proto, default_horizon(n)).unwrap();
        let m = inst.messages()[0];
        for u in 2..=n {
            let Some(d) = dist[u] else { continue };
            let slot = trace
                .first_reception(u, m)
                .unwrap_or_else(|| panic!("graph {i}: node {u} never informed"));
            let phase = proto.phase_of_slot(slot).unwrap();
            assert_eq!(phase, d as u64 - 1, "graph {i}: node {u} at distance {d}");
        }
        audit_no_creation(&inst, &trace);
        // completion <= termination when both exist
        if let (Some(c), Some(t)) = (trace.completion_slot, trace.termination_slot) {
            assert!(c <= t);
        }
    }
}

#[test]
fn broad_a_nodes_transmit_in_at_most_one_phase() {
    for (i, (graph, delta)) in corpus_graphs(6).into_iter().enumerate() {
        let n = graph.node_count();
        let fam = verified_selective(n, delta, 7 + i as u64);
        let inst = BroadcastInstance::single(graph, 1, ChannelMode::Bounded).unwrap();
        let mut proto = broad_a(n, delta, fam).unwrap();
        let trace = run(&inst, &mut proto, default_horizon(n)).unwrap();
        let mut phases: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); n + 1];
        for (t, rec) in trace.slots.iter().enumerate() {
            for &(sender, _) in &rec.transmits {
                phases[sender].insert(proto.phase_of_slot(t as u64).unwrap());
            }
        }
        for u in 1..=n {
            assert!(phases[u].len() <= 1, "graph {i}: node {u} used {phases:?}");
        }
        // termination by phase D+1
        let d = inst.metrics().d as u64;
        let term = trace.termination_slot.expect("reachable graphs terminate");
        assert!(proto.phase_of_slot(term).unwrap() <= d + 1);
    }
}

#[test]
fn bb_and_ub_agree_on_single_broadcast() {
    for seed in 0..6u64 {
        let graph = gen::random_digraph(24, 3, seed, true).unwrap();
        let fam = verified_selective(24, 3, seed);
        let bb = BroadcastInstance::single(graph.clone(), 1, ChannelMode::Bounded).unwrap();
        let ub = BroadcastInstance::single(graph, 1, ChannelMode::Unbounded).unwrap();
        let mut p1 = broad_a(24, 3, fam.clone()).unwrap();
        let mut p2 = broad_a(24, 3, fam).unwrap();
        let t1 = run(&bb, &mut p1, 50_000).unwrap();
        let t2 = run(&ub, &mut p2, 50_000).unwrap();
        assert_eq!(t1.slots, t2.slots);
        assert_eq!(t1.completion_slot, t2.completion_slot);
        assert_eq!(t1.termination_slot, t2.termination_slot);
    }
}

#[test]
fn identical_runs_produce_identical_traces() {
    let graph = gen::random_digraph(32, 4, 3, true).unwrap();
    let fam = verified_selective(32, 4, 3);
    let inst = BroadcastInstance::single(graph, 1, ChannelMode::Bounded).unwrap();
    let mut p1 = broad_a(32, 4, fam.clone()).unwrap();
    let mut p2 = broad_a(32, 4, fam).unwrap();
    let t1 = run(&inst, &mut p1, 100_000).unwrap();
    let t2 = run(&inst, &mut p2, 100_000).unwrap();
    assert_eq!(t1, t2);
}

/// Families for a BROAD-B(ground) run: exhaustively verified up to the
/// claim-bearing level, probabilistic beyond (where only termination safety,
/// not the completion bound, is at stake).
fn broad_b_families(n: usize, l_delta: usize, seed: u64) -> Vec<Arc<radiobc::setfam::SetFamily>> {
    use radiobc::setfam::{build_selective, ConstructionParams, GuaranteeMode};
    let l_count = (usize::BITS - (n - 1).leading_zeros()) as usize;
    (1..=l_count)
        .map(|l| {
            let k = (1usize << l).min(n);
            if l <= l_delta {
                verified_selective(n, k, seed + l as u64)
            } else {
                let params = ConstructionParams::seeded(seed + l as u64)
                    .with_mode(GuaranteeMode::Probabilistic);
                Arc::new(build_selective(n, k, &params).unwrap().family)
            }
        })
        .collect()
}

#[test]
fn broad_b_completes_within_its_bound_small() {
    let n = 24usize;
    let delta = 3usize;
    let l_delta = delta.next_power_of_two().trailing_zeros().max(1) as usize; // 2^l >= delta
    let families = broad_b_families(n, l_delta, 77);
    let claim_fam = families[l_delta - 1].clone();
    let l_count = families.len() as u64;
    for seed in 0..6u64 {
        let graph = gen::random_digraph(n, delta, seed, true).unwrap();
        let inst = BroadcastInstance::single(graph, 1, ChannelMode::Bounded).unwrap();
        let d = inst.metrics().d as u64;
        let mut proto = broad_b(n, families.clone()).unwrap();
        let trace = run(&inst, &mut proto, default_horizon(n)).unwrap();
        let completion = trace.completion_slot.expect("completes");
        let bound = l_count * d * claim_fam.len() as u64;
        assert!(completion <= bound, "seed {seed}: {completion} > {bound}");
    }
}

#[test]
fn prot_alpha_completes_on_small_paths() {
    for (alpha, n) in [(2.0, 8usize), (1.0, 4), (2.0, 16)] {
        let cache = FamilyCache::new(12);
        let graph = gen::path(n).unwrap();
        let inst = BroadcastInstance::single(graph, 1, ChannelMode::Bounded).unwrap();
        let mut proto = prot_alpha(alpha, cache).unwrap();
        let trace = run(&inst, &mut proto, 3_000_000).unwrap();
        assert!(
            trace.completion_slot.is_some(),
            "alpha={alpha} n={n} never completed"
        );
        assert!(
            trace.termination_slot.is_some(),
            "alpha={alpha} n={n} never terminated"
        );
    }
}

#[test]
fn multi_bb_guv_sink_gets_both_messages() {
    for g in radiobc::adversary::build_guv_family(6, 2).unwrap() {
        let n = 6;
        let fam = Arc::new(build_strongly_selective(n, 3).unwrap().family);
        let mut proto = multi_bb_broad_a(n, 2, fam.clone()).unwrap();
        let trace = run(&g.instance, &mut proto, 100_000).unwrap();
        let completion = trace.completion_slot.expect("completes");
        let metrics = g.instance.metrics();
        let bound_phases = metrics.d as u64 + metrics.congestion as u64 - 1;
        let used = proto.phase_of_slot(completion).unwrap() + 1;
        assert!(used <= bound_phases, "G_{{{},{}}}: {used} > {bound_phases}", g.u, g.v);
        audit_no_creation(&g.instance, &trace);
    }
}

#[test]
fn oblivious_accessor_matches_simulation_family_cycle() {
    let n = 10;
    let fam = verified_selective(n, 2, 4);
    // everyone a source: all informed and active from slot 0
    let sources: Vec<(Label, u32)> = (1..=n).map(|l| (l, 1)).collect();
    let graph = gen::path(n).unwrap();
    let inst = BroadcastInstance::new(graph, &sources, ChannelMode::Unbounded).unwrap();
    let mut proto = oblivious_family_schedule(n, fam.clone());
    let trace = run(&inst, &mut proto, 3 * fam.len() as u64).unwrap();
    let view = oblivious_family_schedule(n, fam);
    let view = view.oblivious().unwrap();
    for (t, rec) in trace.slots.iter().enumerate() {
        let expected = view.transmit_set(t as u64).to_vec();
        let actual: Vec<Label> = rec.transmits.iter().map(|&(l, _)| l).collect();
        assert_eq!(actual, expected, "slot {t}");
    }
}

#[test]
fn round_robin_never_deactivates_and_completes() {
    let n = 12;
    let graph = gen::random_digraph(n, 3, 9, true).unwrap();
    let inst = BroadcastInstance::single(graph, 1, ChannelMode::Bounded).unwrap();
    let mut proto = round_robin(n);
    let trace = run(&inst, &mut proto, (n * n * n) as u64).unwrap();
    assert!(trace.completion_slot.is_some());
    assert_eq!(trace.termination_slot, None);
    assert!(trace.inactive_from.iter().all(|s| s.is_none()));
}

#[test]
fn multi_bb_duplicate_deliveries_are_discarded() {
    // two sources share a message-rich neighborhood; queues must never
    // re-enqueue an already-seen identity, so quiescence is reached
    let graph = gen::layered_full(&[1, 2, 2]).unwrap();
    let inst = BroadcastInstance::new(graph, &[(1, 3)], ChannelMode::Bounded).unwrap();
    let n = 5;
    let fam = Arc::new(build_strongly_selective(n, 3).unwrap().family);
    let mut proto = multi_bb_broad_a(n, 2, fam).unwrap();
    let trace = run(&inst, &mut proto, 100_000).unwrap();
    assert!(trace.completion_slot.is_some());
    assert!(matches!(
        trace.stop,
        radiobc::radiosim::StopReason::Quiescent
    ));
}

#[test]
fn vacuous_reachability_completes_at_slot_zero() {
    // two nodes, no edges: nothing is owed, so completion is slot 0
    let graph = radiobc::radiosim::RadioGraph::from_edges(2, &[]).unwrap();
    let inst = BroadcastInstance::single(graph, 1, ChannelMode::Bounded).unwrap();
    let fam = verified_selective(2, 1, 0);
    let mut proto = broad_a(2, 1, fam).unwrap();
    let trace = run(&inst, &mut proto, 100).unwrap();
    assert_eq!(trace.completion_slot, Some(0));
}

#[test]
fn layered_1_2_2_every_level_synchronous() {
    // three levels, sizes 1/2/2, full bipartite, delta = 2
    let graph = gen::layered_full(&[1, 2, 2]).unwrap();
    let fam = verified_selective(5, 2, 21);
    let inst = BroadcastInstance::single(graph, 1, ChannelMode::Bounded).unwrap();
    let mut proto = broad_a(5, 2, fam).unwrap();
    let trace = run(&inst, &mut proto, 1000).unwrap();
    let m = inst.messages()[0];
    for u in [2usize, 3] {
        assert_eq!(
            proto.phase_of_slot(trace.first_reception(u, m).unwrap()),
            Some(0)
        );
    }
    for u in [4usize, 5] {
        assert_eq!(
            proto.phase_of_slot(trace.first_reception(u, m).unwrap()),
            Some(1)
        );
    }
}

#[test]
fn engine_flags_bandwidth_violation() {
    struct TwoAtOnce;
    impl ProtocolSchedule for TwoAtOnce {
        fn name(&self) -> &str {
            "two-at-once"
        }
        fn begin(&mut self, _n: usize, _e: &[(Label, Vec<Message>)]) {}
        fn act(&mut self, node: Label, _slot: u64) -> Action {
            if node == 1 {
                Action::Transmit(Arc::from(vec![
                    Message { source: 1, seq: 1 },
                    Message { source: 1, seq: 2 },
                ]))
            } else {
                Action::Receive
            }
        }
        fn observe(&mut self, _n: Label, _s: u64, _d: &[Message]) {}
    }
    let graph = gen::path(3).unwrap();
    let inst = BroadcastInstance::new(graph, &[(1, 2)], ChannelMode::Bounded).unwrap();
    assert!(run(&inst, &mut TwoAtOnce, 10).is_err());
}
