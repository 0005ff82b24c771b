//! Reading and writing reference sets, system outputs and human ratings.
//!
//! Every file is UTF-8 with one record per line, either tab-separated (the
//! default) or JSON lines carrying the same field names. TSV layouts, text
//! always last:
//!
//! ```text
//! references:  segment_id  ref_id     weight  is_original  text
//! hypotheses:  segment_id  system_id  text
//! ratings:     segment_id  system_id  rating
//! ```
//!
//! `is_original` is `1` or `0`. LF and CRLF line endings are accepted; LF is
//! written. Blank lines are skipped.

mod records;
mod validate;

pub use records::{
    load_hypotheses, load_ratings, load_references, observed_weights, parse_hypotheses, parse_ratings,
    parse_references, rescale_rating, write_hypotheses, write_ratings, write_references, Format, HypothesisRecord,
    LoadedReferences, RatingRecord, RatingScale, ReadOptions, ReferenceRecord, SystemHypotheses,
};
pub use validate::{validate_study, Issue, IssueKind, Severity, ValidationReport};
