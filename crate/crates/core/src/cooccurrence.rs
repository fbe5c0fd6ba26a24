//! Windowed co-occurrence counts between the exemplars of two concepts.
//!
//! Entry `(i, j)` is the number of windows containing at least one
//! occurrence of `C1[i]` and at least one of `C2[j]`. A window contributes at
//! most one to any entry regardless of how often the terms repeat inside it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Window;
use crate::error::{Error, Result};
use crate::relevance::ConceptPair;

const SHARD_WINDOWS: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoocMatrix {
    pub concept_pair: ConceptPair,
    pub window_size: usize,
    /// `counts[i][j] = F_W(C1[i], C2[j])`.
    pub counts: Vec<Vec<u64>>,
    pub n_windows: u64,
}

impl CoocMatrix {
    pub fn zeros(concept_pair: ConceptPair, window_size: usize) -> Self {
        let counts = vec![vec![0; concept_pair.c2.len()]; concept_pair.c1.len()];
        Self {
            concept_pair,
            window_size,
            counts,
            n_windows: 0,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.counts.len()
    }

    pub fn n_cols(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    /// Add the counts of a matrix computed over a disjoint set of windows.
    pub fn merge(&mut self, other: &CoocMatrix) -> Result<()> {
        if self.concept_pair != other.concept_pair || self.window_size != other.window_size {
            return Err(Error::InvalidArgument(
                "cannot merge co-occurrence matrices of different concepts or window sizes".into(),
            ));
        }
        for (row, other_row) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(other_row) {
                *c += o;
            }
        }
        self.n_windows += other.n_windows;
        Ok(())
    }

    /// Matrix as CSV: a header row of C2 terms, then one row per C1 term.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.concept_pair.c2.iter().cloned());
        w.write_record(&header)?;
        for (term, row) in self.concept_pair.c1.iter().zip(&self.counts) {
            let mut record = vec![term.clone()];
            record.extend(row.iter().map(u64::to_string));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Row/column lookup for the exemplar terms.
struct TermIndex<'a> {
    rows: HashMap<&'a str, usize>,
    cols: HashMap<&'a str, usize>,
}

impl<'a> TermIndex<'a> {
    fn new(pair: &'a ConceptPair) -> Self {
        let index = |terms: &'a [String]| terms.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
        Self {
            rows: index(&pair.c1),
            cols: index(&pair.c2),
        }
    }

    fn count_into(&self, windows: &[Window], m: &mut CoocMatrix) {
        let mut row_seen = vec![false; m.n_rows()];
        let mut col_seen = vec![false; m.n_cols()];
        let mut rows = Vec::new();
        let mut cols = Vec::new();
        for window in windows {
            rows.clear();
            cols.clear();
            for term in &window.terms {
                if let Some(&r) = self.rows.get(term.as_str()) {
                    if !row_seen[r] {
                        row_seen[r] = true;
                        rows.push(r);
                    }
                }
                if let Some(&c) = self.cols.get(term.as_str()) {
                    if !col_seen[c] {
                        col_seen[c] = true;
                        cols.push(c);
                    }
                }
            }
            for &r in &rows {
                for &c in &cols {
                    m.counts[r][c] += 1;
                }
                row_seen[r] = false;
            }
            for &c in &cols {
                col_seen[c] = false;
            }
            m.n_windows += 1;
        }
    }
}

/// Count indicator co-occurrences of `pair` over `windows`.
///
/// Windows are counted in shards whose partial matrices are summed.
pub fn count_cooccurrences(pair: &ConceptPair, windows: &[Window], window_size: usize) -> CoocMatrix {
    let index = TermIndex::new(pair);
    windows
        .par_chunks(SHARD_WINDOWS)
        .map(|shard| {
            let mut m = CoocMatrix::zeros(pair.clone(), window_size);
            index.count_into(shard, &mut m);
            m
        })
        .reduce(
            || CoocMatrix::zeros(pair.clone(), window_size),
            |mut a, b| {
                a.merge(&b).expect("shards share concepts and window size");
                a
            },
        )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binning {
    /// One bin per distinct value.
    Unit,
    /// Zero on its own, then `[2^k, 2^(k+1))` keyed by the lower bound.
    Log2,
}

impl Binning {
    fn bin(self, n: u64) -> u64 {
        match self {
            Binning::Unit => n,
            Binning::Log2 if n == 0 => 0,
            Binning::Log2 => 1 << (63 - n.leading_zeros()),
        }
    }
}

impl fmt::Display for Binning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Binning::Unit => "unit",
            Binning::Log2 => "log2",
        })
    }
}

impl FromStr for Binning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Binning::Unit),
            "log2" => Ok(Binning::Log2),
            other => Err(Error::InvalidArgument(format!("unknown binning {other:?}"))),
        }
    }
}

/// Distribution of co-occurrence values over the entries of a matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub topic_id: String,
    pub window_size: usize,
    pub binning: Binning,
    /// Bin lower bound to number of matrix entries.
    pub bins: BTreeMap<u64, u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.bins.values().sum()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "count"])?;
        for (n, count) in &self.bins {
            w.write_record([n.to_string(), count.to_string()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

pub fn cooccurrence_histogram(m: &CoocMatrix, binning: Binning) -> Histogram {
    let mut bins = BTreeMap::new();
    for &n in m.counts.iter().flatten() {
        *bins.entry(binning.bin(n)).or_default() += 1;
    }
    Histogram {
        topic_id: m.concept_pair.topic_id.clone(),
        window_size: m.window_size,
        binning,
        bins,
    }
}
