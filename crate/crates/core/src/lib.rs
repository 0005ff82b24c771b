//! Discriminative BLEU and friends for weighted multi-reference corpora.
//!
//! A reference set pairs each test segment with several candidate responses,
//! each carrying a human quality weight in `[-1, 1]`. On top of that this crate
//! provides:
//!
//! * [`metrics`]: corpus BLEU, discriminative BLEU (matches are credited with
//!   the weight of the best reference containing them, so matching a bad
//!   reference costs score), and macro-averaged smoothed sentence BLEU.
//! * [`correlation`]: a harness that measures how well a metric tracks human
//!   ratings, using Spearman's rho and Kendall's tau-b over random partitions
//!   of the test set into observation units, with bootstrap intervals.
//! * [`corpus_io`]: TSV / JSON-lines readers and writers plus study validation.
//!
//! ```
//! use dbleu::{metrics, tokenize, Hypotheses, MetricConfig, MetricKind, Segment, WeightedReference};
//!
//! let refs = vec![
//!     WeightedReference::new("orig", tokenize("a b", false), 0.5, true)?,
//!     WeightedReference::new("mined", tokenize("a c", false), 1.0, false)?,
//! ];
//! let segments = vec![Segment::new("s1", refs)?];
//! let hyps: Hypotheses = [("s1".to_string(), tokenize("a b", false))].into();
//!
//! let report = metrics::corpus_dbleu(&hyps, &segments, &MetricConfig::new(MetricKind::Dbleu))?;
//! assert!((report.score - 0.612_372).abs() < 1e-6);
//! # Ok::<(), dbleu::Error>(())
//! ```

pub mod corpus_io;
pub mod correlation;
pub mod error;
pub mod metrics;
pub mod text;

pub use correlation::{CorrelationSummary, PairedObservation, Ratings, Study, StudyOptions, UnitScorer};
pub use error::{Error, Result};
pub use metrics::{Hypotheses, MetricConfig, MetricKind, MetricReport, RefMode, Segment, Smoothing, WeightedReference};
pub use text::{tokenize, TokenSequence};
