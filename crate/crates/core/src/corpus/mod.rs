//! Corpus ingestion: tokenization, stopword removal, stemming and
//! segmentation of each document into fixed-size windows.

pub mod porter;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SMART_STOPLIST: &str = include_str!("smart_stoplist.txt");

/// The bundled SMART English stoplist (alphabetic entries only).
pub fn default_stoplist() -> HashSet<String> {
    parse_stoplist(SMART_STOPLIST)
}

fn parse_stoplist(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Preprocessing choices applied to every document of a run.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub stoplist: HashSet<String>,
    pub stemming_enabled: bool,
    pub lowercase: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            stoplist: default_stoplist(),
            stemming_enabled: true,
            lowercase: true,
        }
    }
}

impl PipelineConfig {
    /// Load a stoplist with one word per line; `#` starts a comment line.
    pub fn with_stoplist_file(mut self, path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.stoplist = parse_stoplist(&text);
        Ok(self)
    }

    pub fn with_stemming(mut self, enabled: bool) -> Self {
        self.stemming_enabled = enabled;
        self
    }

    fn is_stopword(&self, token: &str) -> bool {
        if self.lowercase {
            self.stoplist.contains(token)
        } else {
            self.stoplist.contains(&token.to_lowercase())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub topic_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSequence {
    pub doc_id: String,
    pub terms: Vec<String>,
}

/// A tile of at most `W` consecutive terms from one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub doc_id: String,
    pub index: usize,
    pub terms: Vec<String>,
}

/// Normalized documents of one topic together with the window size used to
/// segment them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicCorpus {
    pub topic_id: String,
    pub documents: Vec<TermSequence>,
    window_size: usize,
}

impl TopicCorpus {
    pub fn new(topic_id: impl Into<String>, documents: Vec<TermSequence>, window_size: usize) -> Result<Self> {
        check_window_size(window_size)?;
        Ok(Self {
            topic_id: topic_id.into(),
            documents,
            window_size,
        })
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn with_window_size(&self, window_size: usize) -> Result<Self> {
        Self::new(self.topic_id.clone(), self.documents.clone(), window_size)
    }

    /// All windows of the topic, document by document in manifest order.
    pub fn windows(&self) -> Vec<Window> {
        self.documents
            .iter()
            .flat_map(|doc| segment(doc, self.window_size))
            .collect()
    }

    pub fn n_terms(&self) -> usize {
        self.documents.iter().map(|d| d.terms.len()).sum()
    }
}

/// Extract maximal runs of ASCII letters, drop stopwords and stem.
///
/// Stopwords are removed before stemming; a stem that itself coincides with
/// a stopword is removed as well.
pub fn tokenize_and_normalize(raw: &RawDocument, config: &PipelineConfig) -> TermSequence {
    let terms = raw
        .text
        .split(|c: char| !c.is_ascii_alphabetic())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if config.lowercase {
                t.to_ascii_lowercase()
            } else {
                t.to_string()
            }
        })
        .filter(|t| !config.is_stopword(t))
        .map(|t| if config.stemming_enabled { porter::stem(&t) } else { t })
        .filter(|t| !t.is_empty() && !config.is_stopword(t))
        .collect();
    TermSequence {
        doc_id: raw.doc_id.clone(),
        terms,
    }
}

fn check_window_size(window_size: usize) -> Result<()> {
    if window_size == 0 {
        return Err(Error::InvalidArgument("window size must be at least 1".into()));
    }
    Ok(())
}

fn segment(seq: &TermSequence, window_size: usize) -> impl Iterator<Item = Window> + '_ {
    seq.terms.chunks(window_size).enumerate().map(|(index, chunk)| Window {
        doc_id: seq.doc_id.clone(),
        index,
        terms: chunk.to_vec(),
    })
}

/// Tile a document into consecutive windows of `window_size` terms. The last
/// window is shorter when the length is not a multiple of the window size.
pub fn segment_windows(seq: &TermSequence, window_size: usize) -> Result<Vec<Window>> {
    check_window_size(window_size)?;
    Ok(segment(seq, window_size).collect())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    topics: Vec<ManifestTopic>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestTopic {
    topic_id: String,
    documents: Vec<ManifestDocument>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDocument {
    doc_id: String,
    path: PathBuf,
}

/// Read every topic listed in a JSON manifest. Relative document paths are
/// resolved against the manifest's directory.
pub fn load_topic_corpus(
    manifest_path: &Path,
    config: &PipelineConfig,
    window_size: usize,
) -> Result<Vec<TopicCorpus>> {
    check_window_size(window_size)?;
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Manifest {
        path: manifest_path.to_path_buf(),
        message: e.to_string(),
    })?;
    if manifest.topics.is_empty() {
        return Err(Error::NoTopics);
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let mut seen_topics = HashSet::new();
    for topic in &manifest.topics {
        if !seen_topics.insert(topic.topic_id.as_str()) {
            return Err(Error::Manifest {
                path: manifest_path.to_path_buf(),
                message: format!("duplicate topic_id {:?}", topic.topic_id),
            });
        }
        if topic.documents.is_empty() {
            return Err(Error::EmptyTopic {
                topic_id: topic.topic_id.clone(),
            });
        }
        let mut seen_docs = HashSet::new();
        for doc in &topic.documents {
            if !seen_docs.insert(doc.doc_id.as_str()) {
                return Err(Error::Document {
                    topic_id: topic.topic_id.clone(),
                    doc_id: doc.doc_id.clone(),
                    message: "duplicate doc_id".into(),
                });
            }
        }
    }

    manifest
        .topics
        .iter()
        .map(|topic| {
            let documents = topic
                .documents
                .par_iter()
                .map(|doc| {
                    let path = base.join(&doc.path);
                    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    if text.is_empty() {
                        return Err(Error::Document {
                            topic_id: topic.topic_id.clone(),
                            doc_id: doc.doc_id.clone(),
                            message: format!("empty file {}", path.display()),
                        });
                    }
                    let raw = RawDocument {
                        doc_id: doc.doc_id.clone(),
                        topic_id: topic.topic_id.clone(),
                        text,
                    };
                    Ok(tokenize_and_normalize(&raw, config))
                })
                .collect::<Result<Vec<_>>>()?;
            TopicCorpus::new(topic.topic_id.clone(), documents, window_size)
        })
        .collect()
}
