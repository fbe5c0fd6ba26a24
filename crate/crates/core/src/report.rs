//! End-to-end runs and their on-disk artifacts.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::chsh::{entanglement_proportion_with, ProportionOptions, ProportionReport};
use crate::cooccurrence::{cooccurrence_histogram, count_cooccurrences, Binning, CoocMatrix, Histogram};
use crate::corpus::{load_topic_corpus, PipelineConfig, TopicCorpus};
use crate::error::{Error, Result};
use crate::relevance::{
    build_concept_pair, rank_by_frequency, rank_by_tfidf_with, DocumentFrequencies, RankedTerms, RelevanceMethod,
    DEFAULT_K,
};
use crate::simulation::{parameter_sweep, CurveSet, DistributionKind};

pub const DEFAULT_WINDOW_SIZES: [usize; 3] = [20, 10, 5];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifest: PathBuf,
    pub window_sizes: Vec<usize>,
    pub methods: Vec<RelevanceMethod>,
    pub k: usize,
    pub out_dir: PathBuf,
    /// Recorded for provenance; the analysis itself draws no random numbers.
    pub seed: u64,
    pub stoplist: Option<PathBuf>,
    pub stemming: bool,
    pub binning: Binning,
    pub top_n: usize,
}

impl RunConfig {
    pub fn new(manifest: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            manifest: manifest.into(),
            window_sizes: DEFAULT_WINDOW_SIZES.to_vec(),
            methods: RelevanceMethod::ALL.to_vec(),
            k: DEFAULT_K,
            out_dir: out_dir.into(),
            seed: 0,
            stoplist: None,
            stemming: true,
            binning: Binning::Unit,
            top_n: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        let invalid = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.window_sizes.is_empty() {
            return invalid("no window sizes given");
        }
        if self.window_sizes.contains(&0) {
            return invalid("window sizes must be positive");
        }
        let mut sorted = self.window_sizes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.window_sizes.len() {
            return invalid("window sizes must be distinct");
        }
        if self.methods.is_empty() {
            return invalid("no relevance methods given");
        }
        if self.k < 4 {
            return invalid("k must be at least 4");
        }
        Ok(())
    }

    fn sorted_windows(&self) -> Vec<usize> {
        let mut w = self.window_sizes.clone();
        w.sort_unstable();
        w
    }

    fn pipeline(&self) -> Result<PipelineConfig> {
        let config = PipelineConfig::default().with_stemming(self.stemming);
        match &self.stoplist {
            Some(path) => config.with_stoplist_file(path),
            None => Ok(config),
        }
    }
}

/// One (relevance method, window size) cell of a topic.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub method: RelevanceMethod,
    pub window_size: usize,
    pub matrix: CoocMatrix,
    pub proportion: ProportionReport,
    pub histogram: Histogram,
}

#[derive(Debug, Clone)]
pub struct TopicReport {
    pub topic_id: String,
    pub rankings: Vec<RankedTerms>,
    /// Method-major, window sizes ascending.
    pub cells: Vec<CellResult>,
}

impl TopicReport {
    pub fn cell(&self, method: RelevanceMethod, window_size: usize) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.window_size == window_size)
    }

    /// `p` at the smallest window size, the topic ordering key.
    pub fn sort_key(&self, method: RelevanceMethod) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.method == method)
            .min_by_key(|c| c.window_size)
            .map_or(0.0, |c| c.proportion.p)
    }

    /// Whether `p` strictly decreases as the window grows.
    pub fn monotone_in_window(&self, method: RelevanceMethod) -> bool {
        let ps: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.method == method)
            .map(|c| c.proportion.p)
            .collect();
        ps.windows(2).all(|w| w[0] > w[1])
    }
}

/// Topics ordered by descending `p` at the smallest window, ties by id.
pub fn sorted_topics(reports: &[TopicReport], method: RelevanceMethod) -> Vec<&TopicReport> {
    let mut sorted: Vec<&TopicReport> = reports.iter().collect();
    sorted.sort_by(|a, b| {
        b.sort_key(method)
            .total_cmp(&a.sort_key(method))
            .then_with(|| a.topic_id.cmp(&b.topic_id))
    });
    sorted
}

fn analyze_topic(topic: &TopicCorpus, df: &DocumentFrequencies, config: &RunConfig) -> Result<TopicReport> {
    let windows = config.sorted_windows();
    let segmented = windows
        .iter()
        .map(|&w| Ok((w, topic.with_window_size(w)?.windows())))
        .collect::<Result<Vec<_>>>()?;
    let mut rankings = Vec::new();
    let mut cells = Vec::new();
    for &method in &config.methods {
        let ranking = match method {
            RelevanceMethod::Frequency => rank_by_frequency(topic)?,
            RelevanceMethod::Tfidf => rank_by_tfidf_with(topic, df)?,
        };
        let pair = build_concept_pair(&ranking, config.k)?;
        for (window_size, windows) in &segmented {
            let matrix = count_cooccurrences(&pair, windows, *window_size);
            let proportion = entanglement_proportion_with(
                &matrix,
                ProportionOptions {
                    top_n: config.top_n,
                    per_pair: false,
                },
            );
            let histogram = cooccurrence_histogram(&matrix, config.binning);
            cells.push(CellResult {
                method,
                window_size: *window_size,
                matrix,
                proportion,
                histogram,
            });
        }
        rankings.push(ranking);
    }
    Ok(TopicReport {
        topic_id: topic.topic_id.clone(),
        rankings,
        cells,
    })
}

/// Compute every (topic, method, window) cell without writing anything.
pub fn analyze(config: &RunConfig) -> Result<Vec<TopicReport>> {
    config.validate()?;
    let pipeline = config.pipeline()?;
    let smallest = config.sorted_windows()[0];
    let collection = load_topic_corpus(&config.manifest, &pipeline, smallest)?;
    if collection.is_empty() {
        return Err(Error::NoTopics);
    }
    let df = DocumentFrequencies::from_collection(&collection);
    collection
        .par_iter()
        .map(|topic| analyze_topic(topic, &df, config))
        .collect()
}

/// Run the analysis and write all artifacts under `config.out_dir`.
pub fn run_analyze(config: &RunConfig) -> Result<Vec<TopicReport>> {
    let reports = analyze(config)?;
    write_reports(config, &reports)?;
    Ok(reports)
}

fn file_stem(topic_id: &str) -> String {
    topic_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn summary_path(out_dir: &Path, method: RelevanceMethod) -> PathBuf {
    out_dir.join(format!("summary_{method}.csv"))
}

pub fn write_reports(config: &RunConfig, reports: &[TopicReport]) -> Result<()> {
    let out = &config.out_dir;
    for &method in &config.methods {
        let path = summary_path(out, method);
        let mut file = create(&path)?;
        {
            let mut w = csv::Writer::from_writer(&mut file);
            w.write_record([
                "topic_id",
                "method",
                "W",
                "p",
                "n_entangled",
                "n_pairs",
                "monotone_in_W",
            ])?;
            for topic in sorted_topics(reports, method) {
                let monotone = topic.monotone_in_window(method);
                for cell in topic.cells.iter().filter(|c| c.method == method) {
                    let p = &cell.proportion;
                    w.write_record([
                        topic.topic_id.clone(),
                        method.to_string(),
                        cell.window_size.to_string(),
                        p.p.to_string(),
                        p.n_pairs_entangled.to_string(),
                        p.n_pairs_total.to_string(),
                        monotone.to_string(),
                    ])?;
                }
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
        finish(file, &path)?;
    }

    let path = out.join("histograms.csv");
    let mut file = create(&path)?;
    {
        let mut w = csv::Writer::from_writer(&mut file);
        w.write_record(["topic_id", "method", "W", "n", "count"])?;
        for topic in reports {
            for cell in &topic.cells {
                for (n, count) in &cell.histogram.bins {
                    w.write_record([
                        topic.topic_id.clone(),
                        cell.method.to_string(),
                        cell.window_size.to_string(),
                        n.to_string(),
                        count.to_string(),
                    ])?;
                }
            }
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    finish(file, &path)?;

    for topic in reports {
        let stem = file_stem(&topic.topic_id);
        for ranking in &topic.rankings {
            let path = out.join("rankings").join(format!("{stem}__{}.csv", ranking.method));
            let mut file = create(&path)?;
            ranking.write_csv(&mut file)?;
            finish(file, &path)?;
        }
        for cell in &topic.cells {
            let name = format!("{stem}__{}__W{}", cell.method, cell.window_size);
            let path = out.join("matrices").join(format!("{name}.csv"));
            let mut file = create(&path)?;
            cell.matrix.write_csv(&mut file)?;
            finish(file, &path)?;

            let path = out.join("results").join(format!("{name}.json"));
            let mut file = create(&path)?;
            serde_json::to_writer_pretty(&mut file, &cell.proportion)?;
            file.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
            finish(file, &path)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub kind: DistributionKind,
    /// Exponents for zipf, means for poisson; unused for homogeneous.
    pub shape_grid: Vec<f64>,
    pub bounds: Vec<usize>,
    pub n_samples: usize,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct SimulateMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    kind: DistributionKind,
    shape_grid: &'a [f64],
    bounds: &'a [usize],
    n_samples: usize,
    seed: u64,
    grid: &'a [crate::simulation::DistributionSpec],
}

/// Path of the JSON metadata written next to a curve CSV.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

/// Sweep the grid and write the curve CSV plus a JSON metadata sidecar.
pub fn run_simulate(config: &SimulateConfig) -> Result<CurveSet> {
    let curves = parameter_sweep(
        config.kind,
        &config.shape_grid,
        &config.bounds,
        config.n_samples,
        config.seed,
    )?;
    let mut file = create(&config.out)?;
    curves.write_csv(&mut file)?;
    finish(file, &config.out)?;

    let meta = SimulateMetadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        kind: config.kind,
        shape_grid: &config.shape_grid,
        bounds: &config.bounds,
        n_samples: config.n_samples,
        seed: config.seed,
        grid: &curves.grid,
    };
    let path = sidecar_path(&config.out);
    let mut file = create(&path)?;
    serde_json::to_writer_pretty(&mut file, &meta)?;
    file.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
    finish(file, &path)?;
    Ok(curves)
}

/// `p` per (topic, window) for one method, as written to the summary.
pub fn proportions(reports: &[TopicReport], method: RelevanceMethod) -> BTreeMap<(String, usize), f64> {
    reports
        .iter()
        .flat_map(|t| {
            t.cells
                .iter()
                .filter(move |c| c.method == method)
                .map(move |c| ((t.topic_id.clone(), c.window_size), c.proportion.p))
        })
        .collect()
}
