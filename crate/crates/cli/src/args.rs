use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Corpus construction, baselines and chrF evaluation for Sumerian
/// cuneiform transliterations.
#[derive(Debug, Parser)]
#[command(name = "cuneitext", version, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub settings: Settings,

    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand. Each may also be given in a config
/// file; flags take precedence.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// TOML or JSON file with default values for these options.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Sign list (NDJSON). Defaults to the bundled mini list.
    #[arg(long, global = true, value_name = "FILE")]
    pub signlist: Option<PathBuf>,

    /// Catalogue JSON mapping ids to period and genre.
    #[arg(long, global = true, value_name = "FILE")]
    pub catalogue: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Train, validation and test shares, e.g. `0.9,0.05,0.05` or `90/5/5`.
    #[arg(long, global = true)]
    pub ratios: Option<String>,

    #[arg(long, global = true)]
    pub beta: Option<f64>,

    /// Maximum character n-gram order for chrF.
    #[arg(long, global = true)]
    pub order: Option<usize>,

    /// Score special tokens as part of the text.
    #[arg(long, global = true, value_name = "BOOL")]
    pub include_specials: Option<bool>,

    /// Combine chrF with (1 + beta)^2 instead of 1 + beta^2.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub eq1_literal: bool,

    /// Dictionary sampling mode.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,

    /// N-gram order.
    #[arg(long, global = true)]
    pub k: Option<usize>,

    /// N-gram backoff factor.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,

    /// Up-sampling factor for non-administrative chunks.
    #[arg(long, global = true)]
    pub factor: Option<u32>,

    /// Chunks hold fewer than this many tokens.
    #[arg(long, global = true)]
    pub max_len: Option<usize>,

    /// Worker threads (default: available parallelism). Does not affect output.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Let the first sign claiming a reading keep it instead of failing.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub first_wins: bool,

    /// Treat `[.` and `.]` as upper-bracket markers.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub ascii_upper_brackets: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Weighted,
    Argmax,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the split dataset from cdl documents and a catalogue.
    Build {
        /// Directory of cdl JSON documents.
        input: PathBuf,
        /// Output directory for the split files, stats.json and run.json.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Re-split an existing dataset (a directory of split files or one JSONL file).
    Split {
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Print mapping and composition tables for a dataset directory.
    Stats { input: PathBuf },
    /// Map one transliteration to glyphs.
    Map { text: String },
    /// Run a baseline over a dataset file.
    Baseline {
        #[command(subcommand)]
        system: Baseline,
    },
    /// Score predictions against references with chrF.
    Eval {
        /// Reference dataset file (JSONL).
        #[arg(long)]
        references: PathBuf,
        /// Predictions JSONL with `id` and `transliteration`; `NAME=PATH`
        /// names the system. Repeatable.
        #[arg(long, required = true)]
        predictions: Vec<String>,
        /// Directory for one report per system and table.tsv.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Cut a dataset file into training chunks and write a sampling manifest.
    Chunk {
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Baseline {
    /// Per-sign reading frequencies.
    Dict(BaselineArgs),
    /// Reading n-grams with backoff.
    Ngram(BaselineArgs),
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Training dataset file whose readings supply the counts.
    #[arg(long)]
    pub train: PathBuf,
    /// Dataset file to transliterate.
    #[arg(long)]
    pub input: PathBuf,
    /// Predictions JSONL.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also write the trained n-gram model here.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}
