use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by scoring, correlation and corpus loading.
#[derive(Debug, Error)]
pub enum Error {
    #[error("n-gram order must be at least 1")]
    ZeroOrder,

    #[error("max order {0} is outside 1..=9")]
    OrderOutOfRange(usize),

    #[error("brevity penalty needs nonzero lengths (hypothesis {hyp_len}, reference {ref_len})")]
    ZeroLength { hyp_len: usize, ref_len: usize },

    #[error("reference length list is empty")]
    NoReferenceLengths,

    #[error("no hypotheses to score")]
    EmptyHypotheses,

    #[error("hypothesis for unknown segment `{0}`")]
    UnknownSegment(String),

    #[error("segment `{0}` has no references")]
    NoReferences(String),

    #[error("segment `{0}` has no reference with positive weight")]
    NoPositiveReference(String),

    #[error("weight {0} is outside [-1, 1]")]
    WeightOutOfRange(f64),

    #[error("threshold {0} is outside [-1, 1]")]
    ThresholdOutOfRange(f64),

    #[error("{metric} scoring does not accept this configuration: {reason}")]
    InvalidConfig { metric: &'static str, reason: String },

    #[error("paired inputs differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("correlation is undefined: {0}")]
    DegenerateCorrelation(&'static str),

    #[error("unit size {unit_size} is invalid for {segments} segments")]
    InvalidUnitSize { unit_size: usize, segments: usize },

    #[error("system `{system}` lacks a {what} for segment `{segment}`")]
    MissingStudyData {
        system: String,
        segment: String,
        what: &'static str,
    },

    #[error("invalid study: {0}")]
    InvalidStudy(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Whether the error comes from degenerate statistics rather than bad data.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateCorrelation(_))
    }
}
