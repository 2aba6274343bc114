//! Pairwise r-difference checking: two rows are r-different when every
//! symbol z in 1..=r appears opposite a 0 at some coordinate.

use super::SequenceSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RDiffVerdict {
    Pass,
    /// First failing pair in row order (1-based) and the smallest symbol with
    /// no witnessing coordinate.
    Fail { row_a: usize, row_b: usize, symbol: u32 },
}

pub fn verify_r_different(seqs: &SequenceSet) -> RDiffVerdict {
    let r = seqs.alphabet_max();
    let n = seqs.count();
    let mut seen = vec![false; r as usize + 1];
    for a in 0..n {
        for b in (a + 1)..n {
            for s in seen.iter_mut() {
                *s = false;
            }
            let (ra, rb) = (seqs.row(a), seqs.row(b));
            for (&x, &y) in ra.iter().zip(rb) {
                if x == 0 && y != 0 {
                    seen[y as usize] = true;
                } else if y == 0 && x != 0 {
                    seen[x as usize] = true;
                }
            }
            if let Some(z) = (1..=r).find(|&z| !seen[z as usize]) {
                return RDiffVerdict::Fail {
                    row_a: a + 1,
                    row_b: b + 1,
                    symbol: z,
                };
            }
        }
    }
    RDiffVerdict::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfam::SequenceSet;

    #[test]
    fn minimal_pair_passes() {
        let s = SequenceSet::new(1, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(verify_r_different(&s), RDiffVerdict::Pass);
    }

    #[test]
    fn identical_rows_fail() {
        let s = SequenceSet::new(1, vec![vec![1, 0], vec![1, 0]]).unwrap();
        assert_eq!(
            verify_r_different(&s),
            RDiffVerdict::Fail {
                row_a: 1,
                row_b: 2,
                symbol: 1
            }
        );
    }

    #[test]
    fn no_zero_pairing_fails() {
        // both coordinates pair symbols with symbols, never with 0
        let s = SequenceSet::new(2, vec![vec![1, 2], vec![2, 1]]).unwrap();
        assert!(matches!(verify_r_different(&s), RDiffVerdict::Fail { .. }));
    }
}
