//! Term ranking by raw frequency or tf-idf, and construction of the two
//! concept term sets from a ranking.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::TopicCorpus;
use crate::error::{Error, Result};

/// Number of exemplar terms per concept.
pub const DEFAULT_K: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelevanceMethod {
    Frequency,
    Tfidf,
}

impl RelevanceMethod {
    pub const ALL: [RelevanceMethod; 2] = [RelevanceMethod::Frequency, RelevanceMethod::Tfidf];

    pub fn as_str(self) -> &'static str {
        match self {
            RelevanceMethod::Frequency => "frequency",
            RelevanceMethod::Tfidf => "tfidf",
        }
    }
}

impl fmt::Display for RelevanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelevanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frequency" => Ok(RelevanceMethod::Frequency),
            "tfidf" => Ok(RelevanceMethod::Tfidf),
            other => Err(Error::InvalidArgument(format!(
                "unknown relevance method {other:?} (expected frequency or tfidf)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermStats {
    pub term: String,
    pub tf: u64,
    pub df: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTerm {
    pub term: String,
    pub score: f64,
}

/// Terms of one topic in non-increasing score order; equal scores are
/// ordered by term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTerms {
    pub topic_id: String,
    pub method: RelevanceMethod,
    pub terms: Vec<RankedTerm>,
}

impl RankedTerms {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["term", "score", "rank"])?;
        for (i, t) in self.terms.iter().enumerate() {
            w.write_record([t.term.as_str(), &t.score.to_string(), &(i + 1).to_string()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Exemplars of two concepts: C1 holds ranks `1..=k`, C2 ranks `k+1..=2k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptPair {
    pub topic_id: String,
    pub method: RelevanceMethod,
    pub c1: Vec<String>,
    pub c2: Vec<String>,
}

impl ConceptPair {
    pub fn k(&self) -> usize {
        self.c1.len()
    }
}

/// Number of documents in the whole collection containing each term.
#[derive(Debug, Clone, Default)]
pub struct DocumentFrequencies {
    df: HashMap<String, u64>,
    n_documents: u64,
}

impl DocumentFrequencies {
    pub fn from_collection(collection: &[TopicCorpus]) -> Self {
        let mut df: HashMap<String, u64> = HashMap::new();
        let mut n_documents = 0;
        for doc in collection.iter().flat_map(|t| &t.documents) {
            n_documents += 1;
            let distinct: HashSet<&str> = doc.terms.iter().map(String::as_str).collect();
            for term in distinct {
                *df.entry(term.to_string()).or_default() += 1;
            }
        }
        Self { df, n_documents }
    }

    pub fn df(&self, term: &str) -> u64 {
        self.df.get(term).copied().unwrap_or(0)
    }

    pub fn n_documents(&self) -> u64 {
        self.n_documents
    }

    /// Smoothed inverse document frequency `ln((N + 1) / (df + 1)) + 1`.
    pub fn idf(&self, term: &str) -> f64 {
        ((self.n_documents as f64 + 1.0) / (self.df(term) as f64 + 1.0)).ln() + 1.0
    }
}

fn term_frequencies(topic: &TopicCorpus) -> HashMap<&str, u64> {
    let mut tf: HashMap<&str, u64> = HashMap::new();
    for term in topic.documents.iter().flat_map(|d| &d.terms) {
        *tf.entry(term.as_str()).or_default() += 1;
    }
    tf
}

/// Per-term statistics of a topic, with document frequency taken over `df`.
pub fn term_stats(topic: &TopicCorpus, df: &DocumentFrequencies) -> Vec<TermStats> {
    let mut stats: Vec<_> = term_frequencies(topic)
        .into_iter()
        .map(|(term, tf)| TermStats {
            term: term.to_string(),
            tf,
            df: df.df(term),
        })
        .collect();
    stats.sort_by(|a, b| a.term.cmp(&b.term));
    stats
}

fn rank(topic: &TopicCorpus, method: RelevanceMethod, score: impl Fn(&str, u64) -> f64) -> Result<RankedTerms> {
    let tf = term_frequencies(topic);
    if tf.is_empty() {
        return Err(Error::InsufficientVocabulary {
            topic_id: topic.topic_id.clone(),
            needed: 1,
            found: 0,
        });
    }
    let mut terms: Vec<RankedTerm> = tf
        .into_iter()
        .map(|(term, count)| RankedTerm {
            term: term.to_string(),
            score: score(term, count),
        })
        .collect();
    terms.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
    Ok(RankedTerms {
        topic_id: topic.topic_id.clone(),
        method,
        terms,
    })
}

/// Rank every term of the topic by its number of occurrences.
pub fn rank_by_frequency(topic: &TopicCorpus) -> Result<RankedTerms> {
    rank(topic, RelevanceMethod::Frequency, |_, tf| tf as f64)
}

/// Rank by `tf * (ln((N + 1) / (df + 1)) + 1)` with `N` and `df` taken over
/// the whole collection.
pub fn rank_by_tfidf(topic: &TopicCorpus, collection: &[TopicCorpus]) -> Result<RankedTerms> {
    if !collection.iter().any(|t| t.topic_id == topic.topic_id) {
        return Err(Error::InvalidArgument(format!(
            "topic {:?} is not part of the collection",
            topic.topic_id
        )));
    }
    rank_by_tfidf_with(topic, &DocumentFrequencies::from_collection(collection))
}

/// As [`rank_by_tfidf`], reusing precomputed document frequencies.
pub fn rank_by_tfidf_with(topic: &TopicCorpus, df: &DocumentFrequencies) -> Result<RankedTerms> {
    rank(topic, RelevanceMethod::Tfidf, |term, tf| tf as f64 * df.idf(term))
}

pub fn build_concept_pair(ranked: &RankedTerms, k: usize) -> Result<ConceptPair> {
    if k == 0 {
        return Err(Error::InvalidArgument("concept size k must be at least 1".into()));
    }
    if ranked.terms.len() < 2 * k {
        return Err(Error::InsufficientVocabulary {
            topic_id: ranked.topic_id.clone(),
            needed: 2 * k,
            found: ranked.terms.len(),
        });
    }
    let take =
        |range: std::ops::Range<usize>| -> Vec<String> { ranked.terms[range].iter().map(|t| t.term.clone()).collect() };
    Ok(ConceptPair {
        topic_id: ranked.topic_id.clone(),
        method: ranked.method,
        c1: take(0..k),
        c2: take(k..2 * k),
    })
}
