//! CHSH evaluation of co-occurrence data.
//!
//! A 2x2 block of counts `f11, f12, f21, f22` estimates the expectation of a
//! composed ±1 experiment as `(f11 + f22 - f12 - f21) / (f11 + f22 + f12 + f21)`.
//! For row measurements `A, A'` and column measurements `B, B'` the statistic
//! is `S = E(AB) + E(A'B) + E(AB') - E(A'B')`, and `|S| > 2` is a violation.
//!
//! Expectations are memoized per ordered row pair and ordered column pair of
//! the full matrix, so evaluating a partition costs four table lookups.

mod partition;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use partition::{canonical_partitions, enumerate_partitions, permutation_partitions, Partition, Side};

use crate::cooccurrence::CoocMatrix;
use crate::relevance::RelevanceMethod;

/// Strict bound of the classical region.
pub const CLASSICAL_BOUND: f64 = 2.0;

/// Expectation of a composed experiment, `None` when the block is empty.
pub fn expected_value(f11: u64, f12: u64, f21: u64, f22: u64) -> Option<f64> {
    let total = f11 + f22 + f12 + f21;
    if total == 0 {
        return None;
    }
    let agree = (f11 + f22) as f64;
    let disagree = (f12 + f21) as f64;
    Some((agree - disagree) / total as f64)
}

/// Four rows and four columns of a co-occurrence matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubMatrix {
    /// Row positions in the parent matrix (C1 indices).
    pub rows: [usize; 4],
    /// Column positions in the parent matrix (C2 indices).
    pub cols: [usize; 4],
    pub f: [[u64; 4]; 4],
}

impl SubMatrix {
    /// A standalone matrix labeled `0..4` on both sides.
    pub fn new(f: [[u64; 4]; 4]) -> Self {
        Self {
            rows: [0, 1, 2, 3],
            cols: [0, 1, 2, 3],
            f,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut f = [[0; 4]; 4];
        for (r, row) in self.f.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                f[c][r] = v;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            f,
        }
    }
}

fn block_expectation(f: &[[u64; 4]; 4], x: [usize; 2], y: [usize; 2]) -> Option<f64> {
    expected_value(f[x[0]][y[0]], f[x[0]][y[1]], f[x[1]][y[0]], f[x[1]][y[1]])
}

/// `S` for one row and one column partition, `None` if any block is empty.
pub fn chsh_statistic(m: &SubMatrix, row: &Partition, col: &Partition) -> Option<f64> {
    let e = |x, y| block_expectation(&m.f, x, y);
    Some(
        e(row.unprimed, col.unprimed)? + e(row.primed, col.unprimed)? + e(row.unprimed, col.primed)?
            - e(row.primed, col.primed)?,
    )
}

/// Best partition pair of one submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshEvaluation {
    pub rows: [usize; 4],
    pub cols: [usize; 4],
    pub max_abs_s: f64,
    /// Signed `S` at the maximizing partition pair (0 when none is defined).
    pub s: f64,
    pub argmax: Option<(Partition, Partition)>,
    pub violated: bool,
    pub skipped_partitions: u32,
}

/// Memoized expectations over ordered row pairs and ordered column pairs of
/// a count matrix. Undefined entries are stored as NaN.
#[derive(Debug, Clone)]
pub struct ExpectationTable {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    counts: Vec<u64>,
}

/// Half-width of the band around the bound where the violation decision is
/// made in integer arithmetic instead of floating point.
const EXACT_BAND: f64 = 1e-9;

impl ExpectationTable {
    pub fn new(counts: &[Vec<u64>]) -> Self {
        let n_rows = counts.len();
        let n_cols = counts.first().map_or(0, Vec::len);
        Self::build(n_rows, n_cols, |r, c| counts[r][c])
    }

    pub fn from_submatrix(m: &SubMatrix) -> Self {
        Self::build(4, 4, |r, c| m.f[r][c])
    }

    fn build(n_rows: usize, n_cols: usize, f: impl Fn(usize, usize) -> u64) -> Self {
        let mut table = Self {
            n_rows,
            n_cols,
            values: vec![f64::NAN; n_rows * n_rows * n_cols * n_cols],
            counts: (0..n_rows)
                .flat_map(|r| (0..n_cols).map(move |c| (r, c)))
                .map(|(r, c)| f(r, c))
                .collect(),
        };
        for (a, b) in (0..n_rows).tuple_combinations() {
            for (c, d) in (0..n_cols).tuple_combinations() {
                let e = expected_value(f(a, c), f(a, d), f(b, c), f(b, d)).unwrap_or(f64::NAN);
                // Swapping the outcome labels of either measurement negates E.
                table.set([a, b], [c, d], e);
                table.set([b, a], [d, c], e);
                table.set([b, a], [c, d], -e);
                table.set([a, b], [d, c], -e);
            }
        }
        table
    }

    fn index(&self, x: [usize; 2], y: [usize; 2]) -> usize {
        ((x[0] * self.n_rows + x[1]) * self.n_cols + y[0]) * self.n_cols + y[1]
    }

    fn set(&mut self, x: [usize; 2], y: [usize; 2], e: f64) {
        let i = self.index(x, y);
        self.values[i] = e;
    }

    /// Expectation for global row pair `x` and column pair `y`.
    pub fn get(&self, x: [usize; 2], y: [usize; 2]) -> Option<f64> {
        let e = self.values[self.index(x, y)];
        (!e.is_nan()).then_some(e)
    }

    fn lookup(&self, x: [usize; 2], y: [usize; 2]) -> f64 {
        self.values[self.index(x, y)]
    }

    /// `S` for partitions given in local indices of the selected rows/cols.
    pub fn statistic(&self, rows: &[usize; 4], cols: &[usize; 4], row: &Partition, col: &Partition) -> Option<f64> {
        let s = self.raw_statistic(rows, cols, row, col);
        (!s.is_nan()).then_some(s)
    }

    fn raw_statistic(&self, rows: &[usize; 4], cols: &[usize; 4], row: &Partition, col: &Partition) -> f64 {
        let a = [rows[row.unprimed[0]], rows[row.unprimed[1]]];
        let ap = [rows[row.primed[0]], rows[row.primed[1]]];
        let b = [cols[col.unprimed[0]], cols[col.unprimed[1]]];
        let bp = [cols[col.primed[0]], cols[col.primed[1]]];
        self.lookup(a, b) + self.lookup(ap, b) + self.lookup(a, bp) - self.lookup(ap, bp)
    }

    fn count(&self, r: usize, c: usize) -> i128 {
        self.counts[r * self.n_cols + c] as i128
    }

    /// Numerator and denominator of E for global pairs, in integers.
    fn exact_block(&self, x: [usize; 2], y: [usize; 2]) -> (i128, i128) {
        let (f11, f12) = (self.count(x[0], y[0]), self.count(x[0], y[1]));
        let (f21, f22) = (self.count(x[1], y[0]), self.count(x[1], y[1]));
        (f11 + f22 - f12 - f21, f11 + f22 + f12 + f21)
    }

    /// Exact `|S| > 2` for a defined partition pair. `None` on overflow.
    fn exact_violation(&self, rows: &[usize; 4], cols: &[usize; 4], row: &Partition, col: &Partition) -> Option<bool> {
        let a = [rows[row.unprimed[0]], rows[row.unprimed[1]]];
        let ap = [rows[row.primed[0]], rows[row.primed[1]]];
        let b = [cols[col.unprimed[0]], cols[col.unprimed[1]]];
        let bp = [cols[col.primed[0]], cols[col.primed[1]]];
        let terms = [
            (self.exact_block(a, b), 1),
            (self.exact_block(ap, b), 1),
            (self.exact_block(a, bp), 1),
            (self.exact_block(ap, bp), -1),
        ];
        // S = sum(sign * n_i / d_i); compare |sum(sign * n_i * prod_{j != i} d_j)| with 2 * prod(d).
        let mut den: i128 = 1;
        for ((_, d), _) in terms {
            den = den.checked_mul(d)?;
        }
        let mut num: i128 = 0;
        for (i, ((n, _), sign)) in terms.iter().enumerate() {
            let mut t = n * sign;
            for (j, ((_, d), _)) in terms.iter().enumerate() {
                if i != j {
                    t = t.checked_mul(*d)?;
                }
            }
            num = num.checked_add(t)?;
        }
        Some(num.checked_abs()? > den.checked_mul(2)?)
    }

    /// Maximize `|S|` over the canonical 144 partition pairs.
    pub fn evaluate(&self, rows: [usize; 4], cols: [usize; 4]) -> ChshEvaluation {
        self.evaluate_with(
            rows,
            cols,
            &canonical_partitions(Side::Rows),
            &canonical_partitions(Side::Cols),
        )
    }

    /// Maximize `|S|` over an explicit partition list for each side. The
    /// first maximizer in iteration order is reported.
    pub fn evaluate_with(
        &self,
        rows: [usize; 4],
        cols: [usize; 4],
        row_partitions: &[Partition],
        col_partitions: &[Partition],
    ) -> ChshEvaluation {
        let mut best: Option<(f64, Partition, Partition)> = None;
        let mut skipped = 0;
        let mut violated = false;
        for rp in row_partitions {
            for cp in col_partitions {
                let s = self.raw_statistic(&rows, &cols, rp, cp);
                if s.is_nan() {
                    skipped += 1;
                    continue;
                }
                if best.is_none_or(|(b, _, _)| s.abs() > b.abs()) {
                    best = Some((s, *rp, *cp));
                }
                if !violated {
                    violated = if (s.abs() - CLASSICAL_BOUND).abs() <= EXACT_BAND {
                        self.exact_violation(&rows, &cols, rp, cp)
                            .unwrap_or(s.abs() > CLASSICAL_BOUND)
                    } else {
                        s.abs() > CLASSICAL_BOUND
                    };
                }
            }
        }
        let (s, argmax) = match best {
            Some((s, rp, cp)) => (s, Some((rp, cp))),
            None => (0.0, None),
        };
        ChshEvaluation {
            rows,
            cols,
            max_abs_s: s.abs(),
            s,
            argmax,
            violated,
            skipped_partitions: skipped,
        }
    }
}

/// Exhaustive search over the 144 partition pairs of a 4x4 matrix.
pub fn max_abs_chsh(m: &SubMatrix) -> ChshEvaluation {
    let mut eval = ExpectationTable::from_submatrix(m).evaluate([0, 1, 2, 3], [0, 1, 2, 3]);
    // Report positions in the parent matrix.
    eval.rows = m.rows;
    eval.cols = m.cols;
    eval
}

/// `|S|` for every row/column permutation pair (24 x 24 = 576 values),
/// `None` where undefined.
pub fn permutation_abs_values(m: &SubMatrix) -> Vec<Option<f64>> {
    let rows = permutation_partitions(Side::Rows);
    let cols = permutation_partitions(Side::Cols);
    rows.iter()
        .flat_map(|r| cols.iter().map(move |c| chsh_statistic(m, r, c).map(f64::abs)))
        .collect()
}

/// Terms of one measurement pair, outcome `+1` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPartition {
    #[serde(rename = "A")]
    pub a: [String; 2],
    #[serde(rename = "A'")]
    pub a_prime: [String; 2],
    #[serde(rename = "B")]
    pub b: [String; 2],
    #[serde(rename = "B'")]
    pub b_prime: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub c1: Vec<String>,
    pub c2: Vec<String>,
    pub partition: LabeledPartition,
    #[serde(rename = "S")]
    pub s: f64,
}

/// Share of 4-term subset pairs of a concept pair that violate CHSH.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionReport {
    pub topic_id: String,
    #[serde(rename = "W")]
    pub window_size: usize,
    pub method: RelevanceMethod,
    pub p: f64,
    #[serde(rename = "n_pairs")]
    pub n_pairs_total: u64,
    #[serde(rename = "n_entangled")]
    pub n_pairs_entangled: u64,
    pub top_violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_pair: Option<Vec<ChshEvaluation>>,
}

#[derive(Debug, Clone, Copy)]
pub struct ProportionOptions {
    /// Number of strongest violations to keep.
    pub top_n: usize,
    /// Keep every subset pair's evaluation.
    pub per_pair: bool,
}

impl Default for ProportionOptions {
    fn default() -> Self {
        Self {
            top_n: 10,
            per_pair: false,
        }
    }
}

fn four_subsets(n: usize) -> Vec<[usize; 4]> {
    (0..n).tuple_combinations().map(|(a, b, c, d)| [a, b, c, d]).collect()
}

/// Evaluate every pair of 4-subsets of the rows and columns of `m`, in
/// lexicographic (rows, cols) order.
pub fn evaluate_all_subsets(m: &CoocMatrix) -> Vec<ChshEvaluation> {
    let table = ExpectationTable::new(&m.counts);
    let row_sets = four_subsets(m.n_rows());
    let col_sets = four_subsets(m.n_cols());
    row_sets
        .par_iter()
        .flat_map_iter(|&rows| {
            let table = &table;
            col_sets.iter().map(move |&cols| table.evaluate(rows, cols))
        })
        .collect()
}

pub fn entanglement_proportion(m: &CoocMatrix) -> ProportionReport {
    entanglement_proportion_with(m, ProportionOptions::default())
}

pub fn entanglement_proportion_with(m: &CoocMatrix, options: ProportionOptions) -> ProportionReport {
    let evaluations = evaluate_all_subsets(m);
    let n_total = evaluations.len() as u64;
    let mut violating: Vec<&ChshEvaluation> = evaluations.iter().filter(|e| e.violated).collect();
    let n_entangled = violating.len() as u64;
    // Stable sort keeps lexicographic subset order among equal |S|.
    violating.sort_by(|a, b| b.max_abs_s.total_cmp(&a.max_abs_s));
    let top_violations = violating
        .into_iter()
        .take(options.top_n)
        .map(|e| label_violation(m, e))
        .collect();
    ProportionReport {
        topic_id: m.concept_pair.topic_id.clone(),
        window_size: m.window_size,
        method: m.concept_pair.method,
        p: if n_total == 0 {
            0.0
        } else {
            n_entangled as f64 / n_total as f64
        },
        n_pairs_total: n_total,
        n_pairs_entangled: n_entangled,
        top_violations,
        per_pair: options.per_pair.then_some(evaluations),
    }
}

fn label_violation(m: &CoocMatrix, e: &ChshEvaluation) -> Violation {
    let c1 = &m.concept_pair.c1;
    let c2 = &m.concept_pair.c2;
    let (rp, cp) = e.argmax.expect("a violation has a maximizing partition");
    let row = |pair: [usize; 2]| pair.map(|i| c1[e.rows[i]].clone());
    let col = |pair: [usize; 2]| pair.map(|i| c2[e.cols[i]].clone());
    Violation {
        c1: e.rows.iter().map(|&i| c1[i].clone()).collect(),
        c2: e.cols.iter().map(|&i| c2[i].clone()).collect(),
        partition: LabeledPartition {
            a: row(rp.unprimed),
            a_prime: row(rp.primed),
            b: col(cp.unprimed),
            b_prime: col(cp.primed),
        },
        s: e.s,
    }
}
