//! Assignments of four exemplars to two two-outcome measurements.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Rows,
    Cols,
}

/// Measurements `X = (X1, X2)` and `X' = (X1', X2')` over local indices
/// `0..4`. The first element of each pair carries outcome `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub side: Side,
    pub unprimed: [usize; 2],
    pub primed: [usize; 2],
}

impl Partition {
    pub fn new(side: Side, unprimed: [usize; 2], primed: [usize; 2]) -> Self {
        Self { side, unprimed, primed }
    }

    /// Each of the four indices appears exactly once.
    pub fn is_valid(&self) -> bool {
        let mut seen = [false; 4];
        for &i in self.unprimed.iter().chain(&self.primed) {
            if i >= 4 || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }

    /// Swap the outcome labels of both measurements. Negates S.
    pub fn flipped(&self) -> Self {
        Self {
            side: self.side,
            unprimed: [self.unprimed[1], self.unprimed[0]],
            primed: [self.primed[1], self.primed[0]],
        }
    }
}

const PAIRINGS: [([usize; 2], [usize; 2]); 3] = [([0, 1], [2, 3]), ([0, 2], [1, 3]), ([0, 3], [1, 2])];

/// The 12 partitions of one side that are distinct up to the global outcome
/// flip: 3 pairings, 2 choices of primed measurement, 2 labelings of the
/// primed measurement (the unprimed one is kept in ascending order).
pub fn canonical_partitions(side: Side) -> [Partition; 12] {
    let mut out = [Partition::new(side, [0, 1], [2, 3]); 12];
    let mut n = 0;
    for (p, q) in PAIRINGS {
        for (x, xp) in [(p, q), (q, p)] {
            for primed in [xp, [xp[1], xp[0]]] {
                out[n] = Partition::new(side, x, primed);
                n += 1;
            }
        }
    }
    out
}

/// All 144 row/column partition pairs in deterministic order.
pub fn enumerate_partitions() -> Vec<(Partition, Partition)> {
    let cols = canonical_partitions(Side::Cols);
    canonical_partitions(Side::Rows)
        .into_iter()
        .flat_map(|r| cols.iter().map(move |&c| (r, c)))
        .collect()
}

/// The 24 partitions induced by reading a permutation `p` of `0..4` as
/// `X = (p0, p1)`, `X' = (p2, p3)`.
pub fn permutation_partitions(side: Side) -> Vec<Partition> {
    (0..4)
        .permutations(4)
        .map(|p| Partition::new(side, [p[0], p[1]], [p[2], p[3]]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn twelve_per_side_and_144_pairs() {
        let rows = canonical_partitions(Side::Rows);
        assert_eq!(rows.iter().collect::<HashSet<_>>().len(), 12);
        assert!(rows.iter().all(Partition::is_valid));
        assert_eq!(enumerate_partitions().len(), 144);
    }

    #[test]
    fn canonical_set_closed_under_nothing_but_flip() {
        // Every permutation partition is either canonical or the flip of one.
        let canon: HashSet<_> = canonical_partitions(Side::Rows).into_iter().collect();
        let perms = permutation_partitions(Side::Rows);
        assert_eq!(perms.len(), 24);
        for p in &perms {
            assert!(canon.contains(p) ^ canon.contains(&p.flipped()), "{p:?}");
        }
    }

    #[test]
    fn invalid_partitions_detected() {
        assert!(!Partition::new(Side::Rows, [0, 0], [1, 2]).is_valid());
        assert!(!Partition::new(Side::Rows, [0, 1], [2, 4]).is_valid());
    }
}
