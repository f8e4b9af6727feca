//! `xlemo`: one subcommand per pipeline stage. Every run writes its
//! artifacts under `--out` and, only when it succeeds, a `manifest.json`
//! with input hashes, the effective configuration and counts.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod files;
mod manifest;

#[derive(Debug, Parser)]
#[command(name = "xlemo", version, about = "Cross-lingual emotion classification", arg_required_else_help = true)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
struct Common {
    /// Directory for all outputs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file; keys are long flag names. Flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed (default: config `seed`, then XLEMO_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Active labels, comma separated (default anger,fear,joy).
    #[arg(long)]
    labels: Option<String>,
}

/// Classifier shape and training options.
#[derive(Debug, Args)]
struct ModelArgs {
    /// birnn_attention, mean_pool_mlp or precomputed_vectors.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    attention: Option<usize>,
    /// MLP layer sizes, comma separated.
    #[arg(long)]
    mlp: Option<String>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    dropout: Option<f64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Args)]
struct TrainSourceArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    model: ModelArgs,
    /// Labeled corpus (.jsonl or .tsv).
    #[arg(long)]
    train: Option<PathBuf>,
    /// word2vec text embeddings (sentence vectors in precomputed mode).
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    lang: Option<String>,
    /// Emotion lexicon; switches on af24 features.
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    src_embeddings: Option<PathBuf>,
    #[arg(long)]
    tgt_embeddings: Option<PathBuf>,
    #[arg(long)]
    parallel_src: Option<PathBuf>,
    #[arg(long)]
    parallel_tgt: Option<PathBuf>,
    #[arg(long)]
    src_lang: Option<String>,
    #[arg(long)]
    tgt_lang: Option<String>,
    /// Minimum source-side probability for a label to be projected.
    #[arg(long)]
    threshold: Option<f64>,
    /// Labeled target test set to evaluate the target classifier on.
    #[arg(long)]
    test: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AlignWordsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    parallel_src: Option<PathBuf>,
    #[arg(long)]
    parallel_tgt: Option<PathBuf>,
    #[arg(long)]
    src_lang: Option<String>,
    #[arg(long)]
    tgt_lang: Option<String>,
    /// EM iterations.
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    min_prob: Option<f64>,
    #[arg(long)]
    min_cooccur: Option<u32>,
}

#[derive(Debug, Args)]
struct AlignEmbeddingsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    src_embeddings: Option<PathBuf>,
    #[arg(long)]
    tgt_embeddings: Option<PathBuf>,
    #[arg(long)]
    src_lang: Option<String>,
    #[arg(long)]
    tgt_lang: Option<String>,
    /// Seed dictionary; identically spelled words are used when absent.
    #[arg(long)]
    dictionary: Option<PathBuf>,
    /// Held-out dictionary to report precision@1 on.
    #[arg(long)]
    eval_dictionary: Option<PathBuf>,
    /// cosine or csls.
    #[arg(long)]
    metric: Option<String>,
}

#[derive(Debug, Args)]
struct InduceLexiconArgs {
    #[command(flatten)]
    common: Common,
    /// Source-language lexicon (`word<TAB>emotion<TAB>intensity`).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    dictionary: Option<PathBuf>,
    #[arg(long)]
    src_lang: Option<String>,
    #[arg(long)]
    tgt_lang: Option<String>,
}

#[derive(Debug, Args)]
struct TransferArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    model: ModelArgs,
    /// Labeled source-language training corpus.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Labeled target-language test corpus.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    src_embeddings: Option<PathBuf>,
    #[arg(long)]
    tgt_embeddings: Option<PathBuf>,
    /// Alignment map (JSON) applied to the source embeddings.
    #[arg(long)]
    alignment: Option<PathBuf>,
    #[arg(long)]
    src_lang: Option<String>,
    #[arg(long)]
    tgt_lang: Option<String>,
    /// Concatenate af24 lexicon features.
    #[arg(long)]
    af24: bool,
    #[arg(long)]
    src_lexicon: Option<PathBuf>,
    #[arg(long)]
    tgt_lexicon: Option<PathBuf>,
    /// Dictionary used to carry tie-break counts to the target language.
    #[arg(long)]
    dictionary: Option<PathBuf>,
    /// Lexicon overlap below which a warning is recorded.
    #[arg(long)]
    overlap_floor: Option<usize>,
    /// Method name for the report.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Debug, Args)]
struct PivotArgs {
    #[command(flatten)]
    transfer: TransferArgs,
    /// `target_word<TAB>pivot_word` substitutions.
    #[arg(long)]
    pivot_map: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    src_lang: Option<String>,
    #[arg(long)]
    tgt_lang: Option<String>,
    /// Sample labels uniformly instead of from the training prior.
    #[arg(long)]
    uniform: bool,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    /// Labeled corpus with gold labels.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// `id<TAB>label[...]` predictions.
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long)]
    lang: Option<String>,
    #[arg(long)]
    method: Option<String>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    common: Common,
    /// JSON report files (single reports or arrays), in table order.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// text, tsv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a classifier on a labeled corpus.
    TrainSource(TrainSourceArgs),
    /// Annotation projection over a parallel corpus.
    Project(ProjectArgs),
    /// IBM Model 1 alignment and dictionary extraction.
    AlignWords(AlignWordsArgs),
    /// Orthogonal Procrustes alignment of two embedding spaces.
    AlignEmbeddings(AlignEmbeddingsArgs),
    /// Translate an emotion lexicon through a bilingual dictionary.
    InduceLexicon(InduceLexiconArgs),
    /// Pivot substitution followed by direct transfer.
    Pivot(PivotArgs),
    /// Direct cross-lingual transfer in a shared embedding space.
    Transfer(TransferArgs),
    /// Random baseline predictions.
    Baseline(BaselineArgs),
    /// Score predictions against gold labels.
    Evaluate(EvaluateArgs),
    /// Combine JSON reports into one table.
    Report(ReportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
