//! Instance construction, protocol wiring and the simulate/bench drivers.

use crate::row::ResultRow;
use crate::CliError;
use radiobc::adversary::build_tree_multisource;
use radiobc::gen;
use radiobc::protocols::{
    broad_a, broad_b_from_cache, multi_bb_broad_a, multi_ub_broad, oblivious_family_schedule,
    prot_alpha, always_transmit, round_robin, FamilyCache, ProtocolSchedule,
};
use radiobc::radiosim::{
    default_horizon, run, BroadcastInstance, ChannelMode, RadioGraph,
};
use radiobc::setfam::{
    build_selective, build_strongly_selective, ConstructionParams, FamilyKind, SetFamily,
};
use std::sync::Arc;
use std::time::Instant;

/// Everything that determines one experiment; same spec, same bytes out.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub graph: String,
    pub n: usize,
    pub d: usize,
    pub delta: usize,
    pub r: u32,
    pub protocol: String,
    pub alpha: f64,
    pub family_path: Option<String>,
    pub seed: u64,
    pub horizon: Option<u64>,
}

pub fn build_graph(spec: &ExperimentSpec) -> Result<(RadioGraph, Vec<(usize, u32)>), CliError> {
    let n = spec.n;
    let cfg = |what: &str| CliError::Config(what.to_string());
    let (graph, sources) = match spec.graph.split(':').next().unwrap_or("") {
        "path" => (gen::path(n)?, vec![(1, spec.r)]),
        "star" => (gen::star(n)?, vec![(1, spec.r)]),
        "layered" => {
            let sizes = parse_sizes(&spec.graph, spec.n, spec.d)?;
            (gen::layered_full(&sizes)?, vec![(1, spec.r)])
        }
        "layered-rand" => {
            let sizes = parse_sizes(&spec.graph, spec.n, spec.d)?;
            (
                gen::layered_random(&sizes, spec.delta.max(1), spec.seed)?,
                vec![(1, spec.r)],
            )
        }
        "rand" => (
            gen::random_digraph(n, spec.delta.max(1), spec.seed, true)?,
            vec![(1, spec.r)],
        ),
        "guv" => {
            let args: Vec<usize> = spec
                .graph
                .strip_prefix("guv:")
                .ok_or_else(|| cfg("guv needs guv:U,V"))?
                .split(',')
                .map(|t| t.parse().map_err(|_| cfg("guv:U,V wants numbers")))
                .collect::<Result<_, _>>()?;
            if args.len() != 2 {
                return Err(cfg("guv needs exactly two labels"));
            }
            (gen::guv_graph(n, args[0], args[1])?, vec![(1, spec.r)])
        }
        "tree" => {
            let extra: usize = spec
                .graph
                .strip_prefix("tree:")
                .ok_or_else(|| cfg("tree needs tree:EXTRA"))?
                .parse()
                .map_err(|_| cfg("tree:EXTRA wants a number"))?;
            let inst = build_tree_multisource(spec.r, extra)?;
            return Ok((
                inst.graph().clone(),
                inst.sources().to_vec(),
            ));
        }
        "file" => {
            let path = spec
                .graph
                .strip_prefix("file:")
                .ok_or_else(|| cfg("file needs file:PATH"))?;
            let text = std::fs::read_to_string(path)?;
            let adv = radiobc::io::parse_advgraph(&text)?;
            return Ok((adv.graph.clone(), vec![(adv.source(), spec.r)]));
        }
        other => return Err(cfg(&format!("unknown graph spec {other:?}"))),
    };
    Ok((graph, sources))
}

/// Explicit sizes after the colon, or n-1 nodes spread over d levels.
fn parse_sizes(spec: &str, n: usize, d: usize) -> Result<Vec<usize>, CliError> {
    match spec.split_once(':') {
        Some((_, body)) => body
            .split(',')
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| CliError::Config("level sizes must be numbers".into()))
            })
            .collect(),
        None => {
            if d == 0 || n < d + 1 {
                return Err(CliError::Config(format!(
                    "layered graphs need n >= d+1, got n={n}, d={d}"
                )));
            }
            Ok(bench_level_sizes(n, d))
        }
    }
}

fn load_family(path: &str) -> Result<Arc<SetFamily>, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(Arc::new(radiobc::io::parse_setfam(&text)?))
}

/// Wire up the protocol named in the spec, enforcing family/protocol pairing
/// before anything is simulated.
pub fn build_protocol(
    spec: &ExperimentSpec,
    n: usize,
    delta: usize,
) -> Result<(Box<dyn ProtocolSchedule>, ChannelMode, usize), CliError> {
    let seed = spec.seed;
    let strong_family = |k: usize| -> Result<Arc<SetFamily>, CliError> {
        match &spec.family_path {
            Some(path) => {
                let fam = load_family(path)?;
                match fam.claim() {
                    Some(c) if c.kind == FamilyKind::StronglySelective && c.k >= k.min(n) => {
                        Ok(fam)
                    }
                    _ => Err(CliError::Config(format!(
                        "protocol {} needs a strongly-selective family claiming k >= {}",
                        spec.protocol, k
                    ))),
                }
            }
            None => Ok(Arc::new(build_strongly_selective(n, k)?.family)),
        }
    };
    let selective_family = |k: usize| -> Result<Arc<SetFamily>, CliError> {
        match &spec.family_path {
            Some(path) => {
                let fam = load_family(path)?;
                match fam.claim() {
                    Some(c) if c.k >= k.min(n) => Ok(fam),
                    _ => Err(CliError::Config(format!(
                        "protocol {} needs a family claiming selectivity k >= {}",
                        spec.protocol, k
                    ))),
                }
            }
            None => Ok(Arc::new(
                build_selective(n, k, &ConstructionParams::seeded(seed))?.family,
            )),
        }
    };

    let (proto, mode, fam_size): (Box<dyn ProtocolSchedule>, ChannelMode, usize) =
        match spec.protocol.as_str() {
            "broad-a" => {
                let fam = selective_family(delta)?;
                let size = fam.len();
                (Box::new(broad_a(n, delta, fam)?), ChannelMode::Bounded, size)
            }
            "broad-b" => {
                if spec.family_path.is_some() {
                    return Err(CliError::Config(
                        "broad-b builds its own per-level families from the seed".into(),
                    ));
                }
                let cache = FamilyCache::new(seed);
                let proto = broad_b_from_cache(n, &cache)?;
                // report the claim-bearing family's size for the Δ at hand
                let l_delta = delta.next_power_of_two().max(2).trailing_zeros() as usize;
                let size = cache
                    .selective(n, (1 << l_delta.max(1)).min(n))
                    .map(|f| f.len())
                    .unwrap_or(0);
                (Box::new(proto), ChannelMode::Bounded, size)
            }
            "prot-alpha" => {
                let cache = FamilyCache::new(seed);
                (
                    Box::new(prot_alpha(spec.alpha, cache)?),
                    ChannelMode::Bounded,
                    0,
                )
            }
            "multi-bb" => {
                let fam = strong_family(delta + 1)?;
                let size = fam.len();
                (
                    Box::new(multi_bb_broad_a(n, delta, fam)?),
                    ChannelMode::Bounded,
                    size,
                )
            }
            "multi-ub" => {
                let fam = strong_family(delta + 1)?;
                let size = fam.len();
                (
                    Box::new(multi_ub_broad(n, delta, fam)?),
                    ChannelMode::Unbounded,
                    size,
                )
            }
            "round-robin" => (Box::new(round_robin(n)), ChannelMode::Bounded, 0),
            "always" => (Box::new(always_transmit(n)), ChannelMode::Bounded, 0),
            "family-cycle" => {
                let fam = selective_family(delta)?;
                let size = fam.len();
                (
                    Box::new(oblivious_family_schedule(n, fam)),
                    ChannelMode::Bounded,
                    size,
                )
            }
            other => {
                return Err(CliError::Config(format!("unknown protocol {other:?}")));
            }
        };
    Ok((proto, mode, fam_size))
}

/// Run one experiment and produce its row. `Ok(row)` with a `None`
/// completion means the horizon was exceeded; hard errors bubble up.
pub fn simulate_one(spec: &ExperimentSpec) -> Result<ResultRow, CliError> {
    let (graph, sources) = build_graph(spec)?;
    let n = graph.node_count();
    let (mut proto, mode, family_size) = build_protocol(spec, n, spec.delta.max(1))?;
    // multi-source specs (tree) override the per-source counts
    let instance = BroadcastInstance::new(graph, &sources, mode)?;
    let metrics = instance.metrics();
    let horizon = spec.horizon.unwrap_or_else(|| default_horizon(n));
    let started = Instant::now();
    let trace = run(&instance, proto.as_mut(), horizon)?;
    let wall = started.elapsed().as_millis();
    let phases = trace
        .completion_slot
        .and_then(|s| proto.phase_of_slot(s).map(|p| p + 1));
    Ok(ResultRow {
        n,
        d: metrics.d,
        delta: metrics.delta,
        c: metrics.congestion,
        r: metrics.r,
        protocol: spec.protocol.clone(),
        family_size,
        completion_slot: trace.completion_slot,
        termination_slot: trace.termination_slot,
        phases,
        wall_ms: Some(wall),
    })
}

/// Level sizes for the bench generator: a source, then d levels sharing the
/// remaining n-1 nodes as evenly as possible.
pub fn bench_level_sizes(n: usize, d: usize) -> Vec<usize> {
    let mut sizes = vec![1usize];
    let rest = n - 1;
    for j in 0..d {
        sizes.push(rest / d + usize::from(j < rest % d));
    }
    sizes
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub ns: Vec<usize>,
    pub ds: Vec<usize>,
    pub deltas: Vec<usize>,
    pub protocols: Vec<String>,
    pub reps: u32,
    pub seed: u64,
    pub horizon: Option<u64>,
}

fn mix(seed: u64, salt: u64) -> u64 {
    let mut x = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x
}

/// Run the whole grid with independent derived seeds. Rows come back in
/// deterministic grid order regardless of worker scheduling; failed points
/// yield rows with "none" fields instead of aborting the sweep.
pub fn bench(spec: &BenchSpec) -> Result<(Vec<ResultRow>, Vec<String>, bool), CliError> {
    if spec.ns.is_empty() || spec.ds.is_empty() || spec.deltas.is_empty()
        || spec.protocols.is_empty() || spec.reps == 0
    {
        return Err(CliError::Config("bench grid must be nonempty".into()));
    }
    let mut points = Vec::new();
    for &n in &spec.ns {
        for &d in &spec.ds {
            for &delta in &spec.deltas {
                for protocol in &spec.protocols {
                    for rep in 0..spec.reps {
                        points.push((n, d, delta, protocol.clone(), rep));
                    }
                }
            }
        }
    }
    use rayon::prelude::*;
    let rows: Vec<ResultRow> = points
        .par_iter()
        .enumerate()
        .map(|(idx, (n, d, delta, protocol, rep))| {
            let sizes = bench_level_sizes(*n, *d);
            let run_spec = ExperimentSpec {
                graph: format!(
                    "layered-rand:{}",
                    sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
                ),
                n: *n,
                d: *d,
                delta: *delta,
                r: 1,
                protocol: protocol.clone(),
                alpha: 2.0,
                family_path: None,
                seed: mix(spec.seed, idx as u64 ^ ((*rep as u64) << 32)),
                horizon: spec.horizon,
            };
            simulate_one(&run_spec).unwrap_or_else(|e| {
                eprintln!("bench point {idx} failed: {e}");
                ResultRow {
                    n: *n,
                    d: *d as u32,
                    delta: *delta,
                    c: 0,
                    r: 1,
                    protocol: protocol.clone(),
                    family_size: 0,
                    completion_slot: None,
                    termination_slot: None,
                    phases: None,
                    wall_ms: None,
                }
            })
        })
        .collect();

    // grid-point summaries (median and max completion over reps)
    let mut summaries = Vec::new();
    let mut any_incomplete = false;
    let per_point = spec.reps as usize;
    for (chunk_idx, chunk) in rows.chunks(per_point).enumerate() {
        let (n, d, delta, protocol, _) = &points[chunk_idx * per_point];
        let mut completions: Vec<u64> = chunk.iter().filter_map(|r| r.completion_slot).collect();
        if completions.len() != chunk.len() {
            any_incomplete = true;
        }
        completions.sort_unstable();
        let (median, max) = if completions.is_empty() {
            ("none".to_string(), "none".to_string())
        } else {
            (
                completions[completions.len() / 2].to_string(),
                completions[completions.len() - 1].to_string(),
            )
        };
        summaries.push(format!(
            "n={n} d={d} delta={delta} protocol={protocol} completion_median={median} completion_max={max}"
        ));
    }
    Ok((rows, summaries, any_incomplete))
}
