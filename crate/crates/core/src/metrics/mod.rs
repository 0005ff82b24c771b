//! BLEU, discriminative BLEU and macro-averaged sentence BLEU over weighted
//! multi-reference corpora.
//!
//! All corpus scores share one shape: per-order n-gram precisions `p_n`, a
//! brevity penalty computed from corpus length totals, and the geometric mean
//! `BP * exp(sum_n ln(p_n) / N)`. The metrics differ only in how each segment
//! contributes matched and candidate n-gram mass:
//!
//! * **BLEU** counts a hypothesis n-gram as matched up to its highest clipped
//!   count in any single reference. Reference weights are ignored.
//! * **Discriminative BLEU** scales each clipped count by the weight of the
//!   reference it came from and keeps the best-scoring reference among those
//!   that contain the n-gram. The candidate mass is scaled by the segment's
//!   largest weight. Matches found only in negatively weighted references
//!   therefore subtract from the numerator.
//! * **Sentence BLEU** scores each segment on its own (with add-one smoothing
//!   for orders two and up by default) and averages the scores.

mod corpus;
mod filter;
mod sentence;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::TokenSequence;

pub(crate) use corpus::score_from_totals;
pub use corpus::{
    brevity_penalty, closest_ref_length, corpus_bleu, corpus_dbleu, report_from_stats, segment_stats, SegmentStats,
};
pub use filter::{filter_references, FilteredCorpus, RefMode};
pub use sentence::{macro_sbleu, sentence_bleu};

/// Hypotheses of one system keyed by segment id.
pub type Hypotheses = BTreeMap<String, TokenSequence>;

pub const DEFAULT_MAX_ORDER: usize = 2;
pub const MAX_SUPPORTED_ORDER: usize = 9;

/// A reference response with its human quality weight in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedReference {
    pub id: String,
    pub tokens: TokenSequence,
    pub weight: f64,
    /// Marks the response that originally followed the message.
    pub is_original: bool,
}

impl WeightedReference {
    pub fn new(id: impl Into<String>, tokens: TokenSequence, weight: f64, is_original: bool) -> Result<Self> {
        if !(-1.0..=1.0).contains(&weight) {
            return Err(Error::WeightOutOfRange(weight));
        }
        Ok(Self {
            id: id.into(),
            tokens,
            weight,
            is_original,
        })
    }
}

/// One test item and its reference set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    id: String,
    references: Vec<WeightedReference>,
}

impl Segment {
    /// Builds a segment; the reference list must be nonempty. References are
    /// kept in the order given.
    pub fn new(id: impl Into<String>, references: Vec<WeightedReference>) -> Result<Self> {
        let id = id.into();
        if references.is_empty() {
            return Err(Error::NoReferences(id));
        }
        Ok(Self { id, references })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn references(&self) -> &[WeightedReference] {
        &self.references
    }

    pub fn max_weight(&self) -> f64 {
        self.references
            .iter()
            .map(|r| r.weight)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Discriminative BLEU needs at least one strictly positive weight.
    pub fn has_positive_reference(&self) -> bool {
        self.max_weight() > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Bleu,
    Dbleu,
    Sbleu,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Bleu, MetricKind::Sbleu, MetricKind::Dbleu];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Bleu => "BLEU",
            MetricKind::Dbleu => "dBLEU",
            MetricKind::Sbleu => "sBLEU",
        }
    }

    pub fn default_smoothing(self) -> Smoothing {
        match self {
            MetricKind::Sbleu => Smoothing::AddOne,
            MetricKind::Bleu | MetricKind::Dbleu => Smoothing::None,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Bleu => "bleu",
            MetricKind::Dbleu => "dbleu",
            MetricKind::Sbleu => "sbleu",
        })
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bleu" => Ok(MetricKind::Bleu),
            "dbleu" | "deltableu" | "delta-bleu" => Ok(MetricKind::Dbleu),
            "sbleu" => Ok(MetricKind::Sbleu),
            other => Err(format!("unknown metric `{other}` (expected bleu, dbleu or sbleu)")),
        }
    }
}

/// Precision smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    None,
    /// Add one to matched and candidate counts for orders `n >= 2`.
    AddOne,
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Smoothing::None => "none",
            Smoothing::AddOne => "add-one",
        })
    }
}

impl FromStr for Smoothing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Smoothing::None),
            "add-one" | "add1" | "plus-one" => Ok(Smoothing::AddOne),
            other => Err(format!("unknown smoothing `{other}` (expected none or add-one)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetricConfig {
    pub max_order: usize,
    pub kind: MetricKind,
    pub smoothing: Smoothing,
    /// Lowercase text before tokenizing. Applied by the loaders.
    pub normalize: bool,
}

impl MetricConfig {
    /// Order-2 configuration with the kind's default smoothing.
    pub fn new(kind: MetricKind) -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
            kind,
            smoothing: kind.default_smoothing(),
            normalize: false,
        }
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order;
        self
    }

    pub fn with_smoothing(mut self, smoothing: Smoothing) -> Self {
        self.smoothing = smoothing;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_SUPPORTED_ORDER).contains(&self.max_order) {
            return Err(Error::OrderOutOfRange(self.max_order));
        }
        Ok(())
    }

    /// Display label such as `dBLEU-2`.
    pub fn label(&self) -> String {
        format!("{}-{}", self.kind.name(), self.max_order)
    }
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self::new(MetricKind::Bleu)
    }
}

/// Score and the statistics it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub kind: MetricKind,
    pub max_order: usize,
    pub score: f64,
    /// `p_1 ..= p_N`.
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
    pub segments_scored: usize,
    /// Orders whose precision was `<= 0`, which forces the score to zero.
    pub nonpositive_orders: Vec<usize>,
}

/// Scores `hyps` with whichever metric `cfg` selects.
pub fn score(hyps: &Hypotheses, segments: &[Segment], cfg: &MetricConfig) -> Result<MetricReport> {
    match cfg.kind {
        MetricKind::Bleu => corpus_bleu(hyps, segments, cfg),
        MetricKind::Dbleu => corpus_dbleu(hyps, segments, cfg),
        MetricKind::Sbleu => macro_sbleu(hyps, segments, cfg),
    }
}

pub(crate) fn index_segments(segments: &[Segment]) -> std::collections::HashMap<&str, &Segment> {
    segments.iter().map(|s| (s.id(), s)).collect()
}
