//! Search for a pool subset no window slot selects (|L ∩ F_t| != 1 for all
//! recorded t), maximizing the window length by doubling then binary search.
//!
//! Small pools are enumerated exactly in lexicographic order; larger pools
//! fall back to singleton scans plus randomized-restart local search. The
//! search being incomplete never threatens soundness: any certified window
//! is checkable.

use super::LevelStatus;
use crate::setfam::LabelSet;
use crate::Label;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXACT_POOL_LIMIT: usize = 24;
const RESTARTS: usize = 16;
const CLIMB_ITERS: usize = 300;

struct Membership {
    /// pool position -> window slot indices whose set contains that label
    slots: Vec<Vec<u32>>,
    /// pool position -> first window slot containing the label (or len)
    first_hit: Vec<u32>,
}

fn membership(pool: &[Label], sets: &[LabelSet]) -> Membership {
    let mut slots = vec![Vec::new(); pool.len()];
    for (t, set) in sets.iter().enumerate() {
        for (pi, &label) in pool.iter().enumerate() {
            if set.contains(label) {
                slots[pi].push(t as u32);
            }
        }
    }
    let first_hit = slots
        .iter()
        .map(|s| s.first().copied().unwrap_or(sets.len() as u32))
        .collect();
    Membership { slots, first_hit }
}

/// Exact lexicographic enumeration of subsets (by pool position) of size
/// <= max_size; returns the first subset with zero violating slots, or None.
/// `budget` counts visited subsets; sets `budget_hit` when exhausted.
fn exact_search(
    pool: &[Label],
    mem: &Membership,
    t_len: usize,
    max_size: usize,
    budget: &mut u64,
    budget_hit: &mut bool,
) -> Option<Vec<Label>> {
    let mut count = vec![0u32; t_len];
    let mut violations = 0usize;
    let mut stack: Vec<usize> = Vec::new();

    fn apply(
        mem: &Membership,
        count: &mut [u32],
        violations: &mut usize,
        pi: usize,
        t_len: usize,
        add: bool,
    ) {
        for &t in &mem.slots[pi] {
            let t = t as usize;
            if t >= t_len {
                break;
            }
            let c = &mut count[t];
            if add {
                *c += 1;
                match *c {
                    1 => *violations += 1,
                    2 => *violations -= 1,
                    _ => {}
                }
            } else {
                *c -= 1;
                match *c {
                    0 => *violations -= 1,
                    1 => *violations += 1,
                    _ => {}
                }
            }
        }
    }

    let mut next = vec![0usize];
    loop {
        let depth = next.len() - 1;
        let candidate = next[depth];
        if candidate >= pool.len() || stack.len() >= max_size {
            let pi = stack.pop()?; // exhausted: nothing unselected exists
            apply(mem, &mut count, &mut violations, pi, t_len, false);
            next.pop();
            let d = next.len() - 1;
            next[d] = pi + 1;
            continue;
        }
        apply(mem, &mut count, &mut violations, candidate, t_len, true);
        stack.push(candidate);
        if *budget == 0 {
            *budget_hit = true;
            return None;
        }
        *budget -= 1;
        if violations == 0 {
            return Some(stack.iter().map(|&pi| pool[pi]).collect());
        }
        next.push(candidate + 1);
    }
}

/// Randomized-restart local search for larger pools: swap out the lone
/// member of a violating slot, keep the best of a few candidate swaps.
fn climb_search(
    pool: &[Label],
    mem: &Membership,
    t_len: usize,
    max_size: usize,
    seed: u64,
    budget: &mut u64,
    budget_hit: &mut bool,
) -> Option<Vec<Label>> {
    let eval = |members: &[usize]| -> Vec<u32> {
        let mut count = vec![0u32; t_len];
        for &pi in members {
            for &t in &mem.slots[pi] {
                if (t as usize) < t_len {
                    count[t as usize] += 1;
                }
            }
        }
        (0..t_len as u32).filter(|&t| count[t as usize] == 1).collect()
    };

    for size in 2..=max_size {
        for restart in 0..RESTARTS {
            if *budget == 0 {
                *budget_hit = true;
                return None;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ ((size as u64) << 40) ^ ((restart as u64) << 20) ^ t_len as u64,
            );
            let mut positions: Vec<usize> = (0..pool.len()).collect();
            positions.shuffle(&mut rng);
            let mut members: Vec<usize> = positions[..size].to_vec();
            for _ in 0..CLIMB_ITERS {
                if *budget == 0 {
                    *budget_hit = true;
                    return None;
                }
                *budget -= 1;
                let viols = eval(&members);
                if viols.is_empty() {
                    let mut labels: Vec<Label> = members.iter().map(|&pi| pool[pi]).collect();
                    labels.sort_unstable();
                    return Some(labels);
                }
                // the lone member of a violating slot must leave
                let t = viols[rng.random_range(0..viols.len())] as usize;
                let out_pos = members
                    .iter()
                    .position(|&pi| mem.slots[pi].binary_search(&(t as u32)).is_ok())
                    .expect("violating slot has exactly one member");
                let mut best: Option<(usize, usize)> = None;
                for _ in 0..8 {
                    let cand = rng.random_range(0..pool.len());
                    if members.contains(&cand) {
                        continue;
                    }
                    let saved = members[out_pos];
                    members[out_pos] = cand;
                    let score = eval(&members).len();
                    members[out_pos] = saved;
                    if best.is_none_or(|(_, s)| score < s) {
                        best = Some((cand, score));
                    }
                }
                if let Some((cand, _)) = best {
                    members[out_pos] = cand;
                }
            }
        }
    }
    None
}

/// Find members for the next level and the longest certified window.
/// Returns (members, window length, status); a zero-length window means no
/// delay could be certified even for a single slot.
pub(super) fn find_unselected(
    pool: &[Label],
    sets: &[LabelSet],
    max_size: usize,
    max_candidates: u64,
    seed: u64,
) -> (Vec<Label>, u64, LevelStatus) {
    let mem = membership(pool, sets);
    let mut budget = max_candidates;
    let mut budget_hit = false;

    // windows whose sets are all singletons can never beat the singleton
    // scan: |L ∩ {x}| = 1 iff x ∈ L, so an unselected L must avoid every
    // hit label regardless of its size
    let multi_member_at: Vec<bool> = {
        let mut acc = false;
        sets.iter()
            .map(|s| {
                acc = acc || s.len() >= 2;
                acc
            })
            .collect()
    };

    let probe = |t_len: usize, budget: &mut u64, budget_hit: &mut bool| {
        if t_len == 0 {
            return Some(vec![pool[0]]);
        }
        // cheapest first: the lexicographically least label unhit in window
        if let Some(pi) = (0..pool.len()).find(|&pi| mem.first_hit[pi] as usize >= t_len) {
            return Some(vec![pool[pi]]);
        }
        if !multi_member_at[t_len - 1] {
            return None;
        }
        if pool.len() <= EXACT_POOL_LIMIT {
            exact_search(pool, &mem, t_len, max_size, budget, budget_hit)
        } else if max_size >= 2 {
            climb_search(pool, &mem, t_len, max_size, seed, budget, budget_hit)
        } else {
            None
        }
    };

    let limit = sets.len();
    let mut best_len = 0usize;
    let mut best_members = vec![pool[0]];

    // doubling
    let mut t = 1usize;
    let mut first_fail = None;
    while t <= limit {
        match probe(t, &mut budget, &mut budget_hit) {
            Some(m) => {
                best_len = t;
                best_members = m;
                if t == limit {
                    break;
                }
                t = (t * 2).min(limit);
            }
            None => {
                first_fail = Some(t);
                break;
            }
        }
    }
    // binary search between the last success and the first failure
    if let Some(fail) = first_fail {
        let mut lo = best_len;
        let mut hi = fail;
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            match probe(mid, &mut budget, &mut budget_hit) {
                Some(m) => {
                    best_len = mid;
                    best_members = m;
                    lo = mid;
                }
                None => hi = mid,
            }
        }
    }

    let status = if budget_hit {
        LevelStatus::BudgetExceeded
    } else if best_len == 0 {
        LevelStatus::NoDelay
    } else {
        LevelStatus::Certified
    };
    (best_members, best_len as u64, status)
}
