//! Exact minimum family sizes for small ground sets, by iterative-deepening
//! search over candidate subsets of [n]. The oracle for size-bound sanity
//! tests: everything here is independent of the constructions.

use super::SetFamError;

/// Exact minimum number of sets in any (n,k)-(strongly-)selective family,
/// n <= 10.
///
/// Targets are the subsets Z (selective: Z needs |Z ∩ F| = 1 for some F;
/// strong: every (Z, z) pair needs Z ∩ F = {z}). Depth-limited search
/// branches on the uncovered target with the fewest covering candidates.
pub fn min_selective_size_bruteforce(
    n: usize,
    k: usize,
    strong: bool,
) -> Result<usize, SetFamError> {
    if n == 0 {
        return Err(SetFamError::EmptyGround);
    }
    if n > 10 {
        return Err(SetFamError::Unsupported(format!(
            "brute force supports n <= 10, got {n}"
        )));
    }
    let k = k.min(n).max(1);

    // candidate sets = all nonempty subsets of [n], as bitmasks
    let candidates: Vec<u32> = (1..(1u32 << n)).collect();

    // targets, each with the list of candidate indices covering it
    let mut coverers: Vec<Vec<u32>> = Vec::new();
    for z in 1..(1u32 << n) {
        if (z.count_ones() as usize) > k {
            continue;
        }
        if strong {
            let mut zz = z;
            while zz != 0 {
                let elem = zz & zz.wrapping_neg();
                zz &= zz - 1;
                let list = candidates
                    .iter()
                    .enumerate()
                    .filter(|(_, &f)| f & z == elem)
                    .map(|(i, _)| i as u32)
                    .collect();
                coverers.push(list);
            }
        } else {
            let list = candidates
                .iter()
                .enumerate()
                .filter(|(_, &f)| (f & z).count_ones() == 1)
                .map(|(i, _)| i as u32)
                .collect();
            coverers.push(list);
        }
    }

    // per-candidate bitset of covered targets
    let t = coverers.len();
    let words = t.div_ceil(64);
    let mut covers: Vec<Vec<u64>> = vec![vec![0; words]; candidates.len()];
    for (ti, list) in coverers.iter().enumerate() {
        for &ci in list {
            covers[ci as usize][ti / 64] |= 1 << (ti % 64);
        }
    }

    fn search(
        depth_left: usize,
        covered: &mut Vec<u64>,
        coverers: &[Vec<u32>],
        covers: &[Vec<u64>],
        min_from: u32,
    ) -> bool {
        // branch on the uncovered target with fewest coverers
        let mut best: Option<usize> = None;
        let mut best_len = usize::MAX;
        for (ti, list) in coverers.iter().enumerate() {
            if covered[ti / 64] >> (ti % 64) & 1 == 0 {
                // count coverers at or above min_from (ordering prunes permutations)
                let len = list.iter().filter(|&&c| c >= min_from).count();
                if len < best_len {
                    best_len = len;
                    best = Some(ti);
                    if len == 0 {
                        break;
                    }
                }
            }
        }
        let Some(ti) = best else {
            return true; // everything covered
        };
        if depth_left == 0 || best_len == 0 {
            return false;
        }
        for &ci in coverers[ti].iter().filter(|&&c| c >= min_from) {
            let ci = ci as usize;
            let saved = covered.clone();
            for (w, add) in covered.iter_mut().zip(&covers[ci]) {
                *w |= add;
            }
            if search(depth_left - 1, covered, coverers, covers, ci as u32 + 1) {
                return true;
            }
            *covered = saved;
        }
        false
    }

    for size in 1..=(2 * n) {
        let mut covered = vec![0u64; words];
        if search(size, &mut covered, &coverers, &covers, 0) {
            return Ok(size);
        }
    }
    unreachable!("singleton family of size n always suffices");
}
