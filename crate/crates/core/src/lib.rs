//! Detection of CHSH inequality violations in windowed term co-occurrence
//! data, and Monte-Carlo baselines for random co-occurrence matrices.
//!
//! The pipeline runs [`corpus`] (tokenize, stem, segment into windows),
//! [`relevance`] (rank terms and split the top `2k` into two concepts),
//! [`cooccurrence`] (count windows where exemplar pairs co-occur) and
//! [`chsh`] (search every 4x4 submatrix for a violating partition).
//! [`simulation`] estimates violation rates for i.i.d. random matrices and
//! [`report`] drives the whole thing and writes CSV/JSON artifacts.

pub mod chsh;
pub mod cooccurrence;
pub mod corpus;
pub mod error;
pub mod relevance;
pub mod report;
pub mod selftest;
pub mod simulation;

pub use error::{Error, Result};
