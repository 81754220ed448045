//! Command-line front end: learn and apply merge tables, revert segmented
//! text, n-gram segmentation, joint encodings with transliteration, corpus
//! statistics and evaluation.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "subword",
    version,
    about = "Subword segmentation for open-vocabulary translation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a merge table from tokenized text or a word-frequency file.
    Learn(LearnArgs),
    /// Segment text with a merge table.
    Apply(ApplyArgs),
    /// Undo segmentation by joining "@@ " continuations.
    Revert(IoArgs),
    /// Split words into character n-grams.
    SegmentNgrams(NgramArgs),
    /// Learn one encoding for a source and target language.
    JointLearn(JointArgs),
    /// Score how often aligned words are split at the same points.
    Consistency(ConsistencyArgs),
    /// ISO 9 transliteration between Cyrillic and Latin.
    Translit(TranslitArgs),
    /// Build a symbol vocabulary file from a merge table and training text.
    Vocab(VocabArgs),
    /// Token, type and UNK counts of several segmentations side by side.
    Stats(StatsArgs),
    /// Score hypothesis text against a reference.
    Eval(EvalArgs),
    /// Per-frequency-bin F1 as plottable columns.
    PlotData(PlotArgs),
}

#[derive(Args)]
pub struct IoArgs {
    /// Input file; standard input when absent or "-".
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when absent or "-".
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct LearnArgs {
    /// Training files; several files are learned on as one corpus.
    #[arg(short, long = "input", num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Number of merge operations.
    #[arg(short = 's', long, value_parser = clap::value_parser!(u64).range(1..))]
    pub merges: u64,
    /// Stop once the best pair occurs fewer times than this.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_frequency: u64,
    /// Inputs are "word count" lines instead of running text.
    #[arg(long)]
    pub dict_input: bool,
    /// Use the reference learner that recounts all pairs every iteration.
    #[arg(long)]
    pub naive: bool,
}

#[derive(Args)]
pub struct ApplyArgs {
    /// Merge table file.
    #[arg(short = 'c', long)]
    pub merges: PathBuf,
    #[command(flatten)]
    pub io: IoArgs,
    /// Symbol vocabulary file ("symbol count" lines).
    #[arg(long)]
    pub vocabulary: Option<PathBuf>,
    /// Symbols seen fewer times than this count as out of vocabulary.
    #[arg(long, default_value_t = 1, requires = "vocabulary")]
    pub vocab_threshold: u64,
}

#[derive(Args)]
pub struct NgramArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Characters per chunk.
    #[arg(short, long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Keep the K most frequent training words whole.
    #[arg(long, default_value_t = 0)]
    pub shortlist: usize,
    /// Training text the shortlist is taken from.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// The training file holds "word count" lines.
    #[arg(long, requires = "train")]
    pub dict_input: bool,
    /// Emit the end-of-word marker as a separate symbol.
    #[arg(long)]
    pub detached_eow: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Bridge {
    Iso9,
}

#[derive(Args)]
pub struct JointArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub tgt: PathBuf,
    /// Output path; with a bridge, PREFIX.src and PREFIX.tgt are written.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(short = 's', long, value_parser = clap::value_parser!(u64).range(1..))]
    pub merges: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_frequency: u64,
    /// Transliterate the (Cyrillic) target side before learning.
    #[arg(long, value_enum)]
    pub bridge: Option<Bridge>,
    /// Custom "cyrillic<TAB>latin" table; implies a bridge.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub dict_input: bool,
}

#[derive(Args)]
pub struct ConsistencyArgs {
    /// Segmented source text.
    #[arg(long)]
    pub src: PathBuf,
    /// Segmented target text.
    #[arg(long)]
    pub tgt: PathBuf,
    /// Word alignments, "i-j" pairs per line.
    #[arg(long)]
    pub alignments: PathBuf,
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TranslitDirection {
    Cyr2lat,
    Lat2cyr,
}

#[derive(Args)]
pub struct TranslitArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(short, long, value_enum)]
    pub direction: TranslitDirection,
    /// Custom "cyrillic<TAB>latin" table instead of ISO 9.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Args)]
pub struct VocabArgs {
    #[arg(short = 'c', long)]
    pub merges: PathBuf,
    #[command(flatten)]
    pub io: IoArgs,
    /// Drop symbols seen fewer times than this.
    #[arg(long, default_value_t = 1)]
    pub threshold: u64,
}

#[derive(Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// none | char:N[:K] | bpe:MERGES | joint:MERGES | pre:LABEL:TRAIN:TEST
    #[arg(long = "scheme", default_values_t = ["none".to_string(), "char:1".to_string()])]
    pub schemes: Vec<String>,
    /// Tab-separated output.
    #[arg(long)]
    pub tsv: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Chrf,
    F1,
    Categories,
    Bins,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Training text, needed for categories and bins.
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long, requires = "train")]
    pub dict_input: bool,
    #[arg(long = "metric", value_enum, default_values_t = [Metric::Chrf, Metric::F1])]
    pub metrics: Vec<Metric>,
    #[arg(long, default_value_t = 3.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 6)]
    pub max_n: usize,
    /// Words ranked below this in training count as rare.
    #[arg(long, default_value_t = subword::metrics::DEFAULT_RARE_RANK)]
    pub rare_rank: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub dict_input: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Learn(a) => commands::learn(a),
        Command::Apply(a) => commands::apply(a),
        Command::Revert(a) => commands::revert(a),
        Command::SegmentNgrams(a) => commands::segment_ngrams(a),
        Command::JointLearn(a) => commands::joint_learn(a),
        Command::Consistency(a) => commands::consistency(a),
        Command::Translit(a) => commands::translit(a),
        Command::Vocab(a) => commands::vocab(a),
        Command::Stats(a) => commands::stats(a),
        Command::Eval(a) => commands::eval(a),
        Command::PlotData(a) => commands::plot_data(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("subword: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
