//! Embedded oracle checks runnable from the command line.

use std::fmt;

use num_rational::Ratio;
use rand::Rng;

use crate::chsh::{
    canonical_partitions, expected_value, permutation_abs_values, ExpectationTable, Partition, Side, SubMatrix,
};
use crate::simulation::{rng_from_seed, DistributionSpec};

const SEED: u64 = 0x5eed;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{status:<5} {:<36} {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Run every check against the canonical partition table.
pub fn run_selftest() -> SelftestReport {
    run_selftest_with(&canonical_partitions(Side::Rows), &canonical_partitions(Side::Cols))
}

/// Run every check with the given per-side partition tables.
pub fn run_selftest_with(rows: &[Partition], cols: &[Partition]) -> SelftestReport {
    SelftestReport {
        checks: vec![
            expected_value_check(),
            undefined_check(),
            table1_check(rows, cols),
            boundary_check(rows, cols),
            enumeration_check(rows, cols),
            pmf_check(),
        ],
    }
}

/// The canonical table with its last row partition replaced by a copy of the
/// first, for exercising failure reporting.
pub fn corrupted_partition_table() -> [Partition; 12] {
    let mut t = canonical_partitions(Side::Rows);
    t[11] = t[0];
    t
}

fn expected_value_check() -> Check {
    let mut rng = rng_from_seed(SEED);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let q: [u64; 4] = std::array::from_fn(|_| rng.gen_range(0..=50));
        let total = q.iter().sum::<u64>() as i64;
        let (f11, f12, f21, f22) = (q[0] as i64, q[1] as i64, q[2] as i64, q[3] as i64);
        let got = expected_value(q[0], q[1], q[2], q[3]);
        let err = match got {
            Some(e) if total > 0 => {
                let exact = Ratio::new(f11 + f22 - f12 - f21, total);
                (e - *exact.numer() as f64 / *exact.denom() as f64).abs()
            }
            None if total == 0 => 0.0,
            _ => f64::INFINITY,
        };
        worst = worst.max(err);
    }
    Check {
        name: "expected value vs exact rationals",
        passed: worst <= 1e-12,
        detail: format!("50 quadruples, max error {worst:.3e}"),
    }
}

fn undefined_check() -> Check {
    let e = expected_value(0, 0, 0, 0);
    Check {
        name: "empty block is undefined",
        passed: e.is_none(),
        detail: format!("(0,0,0,0) -> {e:?}"),
    }
}

fn evaluate(m: &SubMatrix, rows: &[Partition], cols: &[Partition]) -> crate::chsh::ChshEvaluation {
    ExpectationTable::from_submatrix(m).evaluate_with([0, 1, 2, 3], [0, 1, 2, 3], rows, cols)
}

fn table1_check(rows: &[Partition], cols: &[Partition]) -> Check {
    let (l, s) = (100, 1);
    let m = SubMatrix::new([[l, s, l, s], [s, l, s, l], [l, s, s, l], [s, l, l, s]]);
    let eval = evaluate(&m, rows, cols);
    // 4 * 198 / 202
    let expected = 396.0 / 101.0;
    Check {
        name: "large/small violating pattern",
        passed: eval.violated && (eval.max_abs_s - expected).abs() <= 1e-9,
        detail: format!("max |S| = {:.9} (expected {expected:.9})", eval.max_abs_s),
    }
}

fn boundary_check(rows: &[Partition], cols: &[Partition]) -> Check {
    let m = SubMatrix::new([[9, 0, 9, 0], [0, 9, 0, 9], [9, 0, 9, 0], [0, 9, 0, 9]]);
    let eval = evaluate(&m, rows, cols);
    Check {
        name: "perfect block correlation at bound",
        passed: !eval.violated && (eval.max_abs_s - 2.0).abs() <= 1e-12,
        detail: format!("max |S| = {}", eval.max_abs_s),
    }
}

/// Sort defined values and count undefined ones.
fn multiset(values: impl IntoIterator<Item = Option<f64>>) -> (Vec<f64>, usize) {
    let mut defined = Vec::new();
    let mut undefined = 0;
    for v in values {
        match v {
            Some(x) => defined.push(x),
            None => undefined += 1,
        }
    }
    defined.sort_by(f64::total_cmp);
    (defined, undefined)
}

fn enumeration_check(rows: &[Partition], cols: &[Partition]) -> Check {
    let mut rng = rng_from_seed(SEED + 1);
    let n = 200;
    let mut failures = 0;
    for _ in 0..n {
        let f: [[u64; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..=20)));
        let m = SubMatrix::new(f);
        let table = ExpectationTable::from_submatrix(&m);
        let canonical = rows.iter().flat_map(|r| {
            let table = &table;
            cols.iter()
                .map(move |c| table.statistic(&[0, 1, 2, 3], &[0, 1, 2, 3], r, c).map(f64::abs))
        });
        let (mut small, small_undef) = multiset(canonical);
        let (full, full_undef) = multiset(permutation_abs_values(&m));
        small = small.iter().flat_map(|&v| [v; 4]).collect();
        let same_multiset = full_undef == 4 * small_undef
            && small.len() == full.len()
            && small.iter().zip(&full).all(|(a, b)| (a - b).abs() <= 1e-12);
        let decision_small = table.evaluate_with([0, 1, 2, 3], [0, 1, 2, 3], rows, cols).violated;
        let decision_full = full.iter().any(|&v| v > 2.0);
        if !same_multiset || decision_small != decision_full {
            failures += 1;
        }
    }
    Check {
        name: "144 canonical vs 576 permutations",
        passed: failures == 0,
        detail: format!("{n} random matrices, {failures} mismatches"),
    }
}

fn pmf_check() -> Check {
    let mut specs = Vec::new();
    for bound in [1, 2, 10, 50, 100, 500, 5000] {
        for lambda in [0.1, 0.3, 0.7, 1.0, 2.0] {
            specs.extend(DistributionSpec::zipf(lambda, bound));
        }
        specs.extend(DistributionSpec::homogeneous(bound));
        specs.extend(DistributionSpec::poisson_default(bound));
    }
    let worst = specs
        .iter()
        .map(|s| s.pmf().map_or(f64::INFINITY, |p| (p.iter().sum::<f64>() - 1.0).abs()))
        .fold(0.0, f64::max);
    Check {
        name: "pmf normalization",
        passed: worst <= 1e-12,
        detail: format!("{} distributions, max |sum - 1| = {worst:.3e}", specs.len()),
    }
}
