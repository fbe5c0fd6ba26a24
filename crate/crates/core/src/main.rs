use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use entangle::chsh::{canonical_partitions, Side};
use entangle::cooccurrence::Binning;
use entangle::relevance::RelevanceMethod;
use entangle::report::{run_analyze, run_simulate, RunConfig, SimulateConfig};
use entangle::selftest::{corrupted_partition_table, run_selftest, run_selftest_with};
use entangle::simulation::{parse_grid, DistributionKind, DEFAULT_SAMPLES};
use entangle::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_CORPUS: u8 = 2;
const EXIT_SELFTEST: u8 = 3;

#[derive(Parser)]
#[command(name = "entangle", version, about = "CHSH violation analysis of term co-occurrence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure the share of CHSH-violating 4x4 submatrices per topic.
    Analyze {
        /// JSON manifest listing topics and their document files.
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Window sizes, comma separated.
        #[arg(long = "window", value_delimiter = ',', default_values_t = [20, 10, 5])]
        windows: Vec<usize>,
        /// Relevance methods, comma separated.
        #[arg(long, value_delimiter = ',', default_values = ["frequency", "tfidf"])]
        relevance: Vec<RelevanceMethod>,
        /// Terms per concept.
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Stoplist file, one word per line (default: bundled SMART list).
        #[arg(long)]
        stoplist: Option<PathBuf>,
        /// Disable Porter stemming.
        #[arg(long)]
        no_stem: bool,
        /// Histogram binning: unit or log2.
        #[arg(long, default_value = "unit")]
        binning: Binning,
        /// Violations kept per result file.
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Estimate violation probability for random matrices over a parameter grid.
    Simulate {
        #[arg(long, default_value = "zipf")]
        kind: DistributionKind,
        /// Zipf exponents as start:stop:step or a comma list.
        #[arg(long, default_value = "0.1:2.0:0.1")]
        lambda_grid: String,
        /// Poisson means as start:stop:step or a comma list (default B/10).
        #[arg(long)]
        mu_grid: Option<String>,
        /// Support bounds.
        #[arg(long = "B", value_delimiter = ',', default_values_t = [10, 50, 100, 500])]
        bounds: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "curves.csv")]
        out: PathBuf,
    },
    /// Run the embedded oracle checks.
    Selftest {
        #[arg(long, hide = true)]
        corrupt_partitions: bool,
    },
}

fn init_threads() {
    if let Some(n) = std::env::var("ENTANGLE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn fail(err: &Error, corpus_code: u8) -> ExitCode {
    eprintln!("error: {err}");
    if err.is_corpus_error() {
        ExitCode::from(corpus_code)
    } else {
        ExitCode::from(EXIT_USAGE)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();

    match cli.command {
        Command::Analyze {
            manifest,
            out,
            windows,
            relevance,
            k,
            stoplist,
            no_stem,
            binning,
            top,
            seed,
        } => {
            let config = RunConfig {
                manifest,
                window_sizes: windows,
                methods: relevance,
                k,
                out_dir: out,
                seed,
                stoplist,
                stemming: !no_stem,
                binning,
                top_n: top,
            };
            match run_analyze(&config) {
                Ok(reports) => {
                    for &method in &config.methods {
                        for topic in entangle::report::sorted_topics(&reports, method) {
                            let ps: Vec<String> = topic
                                .cells
                                .iter()
                                .filter(|c| c.method == method)
                                .map(|c| format!("p_{}={:.4}", c.window_size, c.proportion.p))
                                .collect();
                            println!("{method:<9} {:<20} {}", topic.topic_id, ps.join(" "));
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, EXIT_CORPUS),
            }
        }
        Command::Simulate {
            kind,
            lambda_grid,
            mu_grid,
            bounds,
            samples,
            seed,
            out,
        } => {
            let shape = match kind {
                DistributionKind::Zipf => parse_grid(&lambda_grid),
                DistributionKind::Poisson => mu_grid.as_deref().map_or(Ok(Vec::new()), parse_grid),
                DistributionKind::Homogeneous => Ok(Vec::new()),
            };
            let shape_grid = match shape {
                Ok(s) => s,
                Err(e) => return fail(&e, EXIT_CORPUS),
            };
            let config = SimulateConfig {
                kind,
                shape_grid,
                bounds,
                n_samples: samples,
                seed,
                out,
            };
            match run_simulate(&config) {
                Ok(curves) => {
                    println!("wrote {} points to {}", curves.estimates.len(), config.out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, EXIT_CORPUS),
            }
        }
        Command::Selftest { corrupt_partitions } => {
            let report = if corrupt_partitions {
                run_selftest_with(&corrupted_partition_table(), &canonical_partitions(Side::Cols))
            } else {
                run_selftest()
            };
            print!("{report}");
            if report.passed() {
                println!("all checks passed");
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_SELFTEST)
            }
        }
    }
}
