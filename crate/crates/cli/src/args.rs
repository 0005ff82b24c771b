use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dbleu::corpus_io::{Format, RatingScale};
use dbleu::{MetricKind, RefMode, Smoothing};

#[derive(Debug, Parser)]
#[command(
    name = "dbleu",
    version,
    about = "Discriminative BLEU scoring and metric correlation studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one system's outputs against the reference sets.
    Score(ScoreArgs),
    /// Correlate metric differences with human rating differences.
    Correlate(CorrelateArgs),
    /// Repeat a correlation study along one parameter axis.
    Sweep(SweepArgs),
    /// Check id coverage and summarize the reference sets.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Weighted reference file.
    #[arg(long)]
    pub refs: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long)]
    pub format: Option<Format>,
    /// Skip a header line in every input file.
    #[arg(long)]
    pub header: bool,
    /// Lowercase all text before tokenizing.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// Highest n-gram order.
    #[arg(long = "max-n", default_value_t = 2)]
    pub max_n: usize,
    /// Precision smoothing; defaults to none for corpus metrics and add-one for sBLEU.
    #[arg(long)]
    pub smoothing: Option<Smoothing>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// System outputs for every system in the study.
    #[arg(long)]
    pub hyps: PathBuf,
    /// Human ratings per (segment, system).
    #[arg(long)]
    pub ratings: PathBuf,
    /// System pair as A:B; repeatable. Defaults to every pair of rated systems.
    #[arg(long = "pair", value_parser = parse_pair)]
    pub pairs: Vec<(String, String)>,
    /// Observation unit size in segments.
    #[arg(long = "unit-size", default_value_t = 100)]
    pub unit_size: usize,
    /// Number of sampled assignments.
    #[arg(long, default_value_t = 1000)]
    pub assignments: usize,
    /// Number of bootstrap resamples for the confidence intervals.
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Raw rating scale as MIN,MAX.
    #[arg(long = "rating-scale", default_value = "1,5")]
    pub rating_scale: RatingScale,
    /// Keep raw rating values instead of mapping them onto [-1, 1].
    #[arg(long = "no-rescale")]
    pub no_rescale: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "DBLEU_THREADS", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// System outputs.
    #[arg(long)]
    pub hyps: PathBuf,
    /// System to score when the output file holds several.
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long, default_value = "dbleu")]
    pub metric: MetricKind,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    /// References to use: single, all or threshold:<w>.
    #[arg(long = "ref-mode", default_value = "all")]
    pub ref_mode: RefMode,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A metric row in a correlation report. `rating` scores units by their mean
/// human rating and serves as a sanity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricChoice {
    Metric(MetricKind),
    Rating,
}

impl FromStr for MetricChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rating" => Ok(MetricChoice::Rating),
            other => other.parse().map(MetricChoice::Metric),
        }
    }
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub study: StudyArgs,
    /// Metrics to evaluate; repeatable. Defaults to bleu, sbleu and dbleu.
    #[arg(long = "metric")]
    pub metrics: Vec<MetricChoice>,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    /// Reference modes; repeatable. Defaults to single, threshold:0.6 and all.
    #[arg(long = "ref-mode")]
    pub ref_modes: Vec<RefMode>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    Threshold,
    UnitSize,
    MaxN,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub study: StudyArgs,
    #[arg(long, value_enum)]
    pub axis: SweepAxis,
    /// Comma-separated axis values. Defaults: observed weights (descending,
    /// or a 0.1 grid when there are more than 21 distinct weights), unit
    /// sizes 1,10,25,50,100, or orders 1,2,3,4.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
    /// Metrics to evaluate; repeatable. Defaults to bleu, sbleu and dbleu.
    #[arg(long = "metric")]
    pub metrics: Vec<MetricChoice>,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    /// Reference mode for the unit-size and max-n axes.
    #[arg(long = "ref-mode", default_value = "all")]
    pub ref_mode: RefMode,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub hyps: Option<PathBuf>,
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    #[arg(long = "rating-scale", default_value = "1,5")]
    pub rating_scale: RatingScale,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(':') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() && a != b => Ok((a.to_owned(), b.to_owned())),
        _ => Err(format!("pair `{s}` must look like A:B with two different systems")),
    }
}
