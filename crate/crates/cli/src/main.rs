//! `bioid`: extract personal identifiers from profile bios and run the
//! validation analyses, one file-based stage per subcommand.

mod commands;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bioid::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "bioid",
    version,
    about = "Personal-identifier extraction and analysis for profile bios"
)]
struct Cli {
    /// Worker threads for extraction and indexing (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Only errors.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Filter a corpus and extract identifiers from each retained bio.
    Extract(ExtractArgs),
    /// Build the identifier index from `extract` output.
    Index(IndexArgs),
    /// Rank identifiers by normalized log-odds between two groups.
    Contrast(ContrastArgs),
    /// Rank identifiers by the mean of a continuous attribute.
    Continuous(ContinuousArgs),
    /// Spectral co-clustering of identifiers and users.
    Cluster(ClusterArgs),
    /// Share of frequent identifiers found in each lexicon.
    Overlap(OverlapArgs),
    /// Lexicon meaning dimensions by presence among identifiers.
    Meaning(MeaningArgs),
    /// Stratified annotation sample over token and bio-count buckets.
    SampleStratified(StratifiedArgs),
    /// Annotation sample weighted by bio count.
    SampleProb(ProbArgs),
    /// Merge annotator labels: alpha and per-bucket proportions.
    Reliability(ReliabilityArgs),
    /// Correlation of identifier bio counts between two indexes.
    Correlate(CorrelateArgs),
    /// Descriptive statistics for an index.
    Report(ReportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// Decide from the extension: .jsonl/.json, .tsv, anything else is text.
    Auto,
    Jsonl,
    Tsv,
    /// One bio per line.
    Text,
}

#[derive(Args, Debug, Serialize)]
pub struct RulesArg {
    /// Extraction rules file; the bundled defaults when absent.
    #[arg(long, env = "BIOID_RULES")]
    pub rules: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtractArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
    #[command(flatten)]
    #[serde(flatten)]
    pub rules: RulesArg,
    /// Allowed last-status languages (primary subtag).
    #[arg(long, value_delimiter = ',', default_values_t = ["en".to_string(), "es".to_string()])]
    pub languages: Vec<String>,
    /// Keep every language.
    #[arg(long)]
    pub all_languages: bool,
    /// Also write candidates.tsv: phrases of any token count.
    #[arg(long)]
    pub candidates: bool,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhraseSource {
    Phrases,
    Candidates,
}

#[derive(Args, Debug, Serialize)]
pub struct IndexArgs {
    /// Directory written by `extract`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = PhraseSource::Phrases)]
    pub source: PhraseSource,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ContrastArgs {
    /// Directory written by `index`.
    #[arg(long)]
    pub index: PathBuf,
    /// sex, party, race, race:<value> or verified.
    #[arg(long)]
    pub attribute: String,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long, default_value_t = bioid::stats::DEFAULT_MIN_BIOS)]
    pub min_bios: u64,
    #[arg(long, default_value_t = bioid::stats::DEFAULT_PRIOR)]
    pub prior: f64,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ContinuousArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// age, pct_rural or ff_ratio.
    #[arg(long)]
    pub attribute: String,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long, default_value_t = bioid::stats::DEFAULT_MIN_BIOS)]
    pub min_bios: u64,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ClusterArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    /// Keep identifiers in more than this many bios.
    #[arg(long, default_value_t = 100)]
    pub min_bio_count: u64,
    /// Keep users with more than this many kept identifiers.
    #[arg(long, default_value_t = 1)]
    pub min_user_identifiers: u64,
    /// Defaults to ceil(log2 k).
    #[arg(long)]
    pub singular_vectors: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 300)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Identifiers listed per cluster in the summary.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct OverlapArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Lexicon CSV, optionally `name=path`; repeatable.
    #[arg(long = "lexicon", required = true)]
    pub lexicons: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub rules: RulesArg,
    /// Explicit bio-count cutoffs; a log-spaced grid up to the largest count otherwise.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Vec<u64>,
    #[arg(long, default_value_t = 10)]
    pub per_decade: usize,
    /// Stop once this many identifiers or fewer remain above the cutoff.
    #[arg(long, default_value_t = bioid::lexicon::DEFAULT_MIN_REMAINING)]
    pub min_remaining: usize,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct MeaningArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long = "lexicon", required = true)]
    pub lexicons: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub rules: RulesArg,
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct StratifiedArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Index built with `index --source candidates`, for the 4+ token cells.
    #[arg(long)]
    pub long_index: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub per_cell: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ProbArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ReliabilityArgs {
    /// sample_key.tsv written by a sample command.
    #[arg(long)]
    pub key: PathBuf,
    /// Label files with columns item_id, annotator_id, label; repeatable.
    #[arg(long = "labels", required = true)]
    pub labels: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CorrelateArgs {
    /// Exactly two index directories.
    #[arg(long = "index", num_args = 1, required = true)]
    pub indexes: Vec<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// `extract` directory, to include its filter report.
    #[arg(long)]
    pub extract: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_env("BIOID_LOG")
        .format_timestamp(None)
        .init();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        log::warn!("thread pool: {e}");
    }
    let result = match &cli.command {
        Command::Extract(a) => commands::extract(a),
        Command::Index(a) => commands::index(a),
        Command::Contrast(a) => commands::contrast(a),
        Command::Continuous(a) => commands::continuous(a),
        Command::Cluster(a) => commands::cluster(a),
        Command::Overlap(a) => commands::overlap(a),
        Command::Meaning(a) => commands::meaning(a),
        Command::SampleStratified(a) => commands::sample_stratified(a),
        Command::SampleProb(a) => commands::sample_prob(a),
        Command::Reliability(a) => commands::reliability(a),
        Command::Correlate(a) => commands::correlate(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
