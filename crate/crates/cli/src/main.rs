mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Usage errors exit with 1, data errors with 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<blesseval::Error> for CliError {
    fn from(e: blesseval::Error) -> Self {
        CliError::Data(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(name = "blesseval", version, about = "Corpus preparation and evaluation metrics for blessing generation")]
pub struct Cli {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (output does not depend on this).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize, deduplicate and filter a corpus.
    Clean(CleanArgs),
    /// Stratified train/validation/test split.
    Split(SplitArgs),
    /// Corpus statistics as JSON.
    Stats(StatsArgs),
    /// Blessing bag construction.
    #[command(subcommand)]
    Bow(BowCommand),
    /// Score generated texts.
    Score(ScoreArgs),
    /// Metric verification curves from human annotations.
    Verify(VerifyArgs),
    /// Fleiss' kappa over annotations.
    Kappa(KappaArgs),
    /// Ranked word frequencies.
    Freq(FreqArgs),
}

#[derive(Debug, Args)]
pub struct CleanArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of rejected records (id,reason).
    #[arg(long)]
    rejections: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    min_tokens: usize,
    #[arg(long, default_value_t = 200)]
    max_tokens: usize,
    /// Drop records sharing no word with their occasion or object bag.
    #[arg(long)]
    attribute_filter: bool,
    /// Attribute bags JSON; the shipped bags when omitted.
    #[arg(long)]
    bags: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Train, validation and test ratios.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.9, 0.05, 0.05])]
    ratios: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum BowCommand {
    /// Most frequent non-stopwords of the (training) corpus.
    Build(BowArgs),
}

#[derive(Debug, Args)]
pub struct BowArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 50)]
    size: usize,
    /// Split assignments; only training records are counted.
    #[arg(long)]
    splits: Option<PathBuf>,
    /// Stopword list, one word per line.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Generated texts as corpus JSONL.
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated: ble, ent, bleu, rouge, distinct, wmd, ppl.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// Reference texts JSONL ({"id", "text"}), paired by id or line order.
    #[arg(long)]
    refs: Option<String>,
    /// Token log-probabilities JSONL ({"id", "logprobs"}).
    #[arg(long)]
    logprobs: Option<String>,
    #[arg(long)]
    embeddings: Option<String>,
    #[arg(long)]
    bags: Option<String>,
    #[arg(long)]
    blessing_bag: Option<String>,
    #[arg(long)]
    threshold_t: Option<f64>,
    #[arg(long)]
    bonus_unit: Option<f64>,
    #[arg(long)]
    keyword_k: Option<usize>,
    #[arg(long)]
    mmr_lambda: Option<f64>,
    #[arg(long)]
    bleu_max_n: Option<usize>,
    #[arg(long)]
    bleu_smoothing: Option<bool>,
    #[arg(long)]
    filter_stopwords: Option<bool>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Annotations JSONL ({"text", "occasion", "object", "ratings"}).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    embeddings: Option<String>,
    #[arg(long)]
    bags: Option<String>,
    #[arg(long)]
    blessing_bag: Option<String>,
    #[arg(long, default_value_t = 100)]
    subset_size: usize,
    #[arg(long, default_value_t = 11)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = CorrelationArg::Pearson)]
    correlation: CorrelationArg,
    #[arg(long)]
    threshold_t: Option<f64>,
    #[arg(long)]
    bonus_unit: Option<f64>,
    #[arg(long)]
    keyword_k: Option<usize>,
    #[arg(long)]
    mmr_lambda: Option<f64>,
    /// Directory for the curve CSVs and summary.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum CorrelationArg {
    Pearson,
    Spearman,
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Exclude {
    Labels,
    Bags,
    Both,
    None,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Number of words to print; all when omitted.
    #[arg(long)]
    top: Option<usize>,
    /// Words to drop besides stopwords: the corpus's occasion and object
    /// label words, every attribute-bag word, both, or nothing.
    #[arg(long, value_enum, default_value_t = Exclude::Labels)]
    exclude: Exclude,
    /// Attribute bags for `--exclude bags|both`; the shipped bags when omitted.
    #[arg(long)]
    bags: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => config::ConfigFile::load(path)?,
        None => config::ConfigFile::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be >= 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| CliError::Data(e.into()))?;
    let global = commands::Global { file, seed };
    pool.install(|| match cli.command {
        Command::Clean(a) => commands::clean(&global, a),
        Command::Split(a) => commands::split(&global, a),
        Command::Stats(a) => commands::stats(a),
        Command::Bow(BowCommand::Build(a)) => commands::bow_build(a),
        Command::Score(a) => commands::score(&global, a),
        Command::Verify(a) => commands::verify(&global, a),
        Command::Kappa(a) => commands::kappa(a),
        Command::Freq(a) => commands::freq(a),
    })
}
