use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::records::{preview, SystemHypotheses};
use crate::correlation::Ratings;
use crate::metrics::Segment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    /// A hypothesis or rating names a segment absent from the references.
    UnknownSegment,
    MissingHypothesis,
    MissingRating,
    /// A system has hypotheses but no ratings, or the reverse.
    UnmatchedSystem,
    /// No reference with positive weight; discriminative BLEU refuses it.
    DbleuIneligible,
    /// No reference flagged original; the `single` mode cannot use it.
    NoOriginal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub kind: IssueKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
    pub segments: usize,
    pub systems: usize,
    pub references: usize,
    pub min_references: usize,
    pub max_references: usize,
    pub original_references: usize,
    /// Reference counts in ten weight bins of width 0.2 from -1 to 1; the
    /// last bin includes 1.
    pub weight_histogram: [usize; 10],
}

impl ValidationReport {
    pub fn worst(&self) -> Option<Severity> {
        self.issues.iter().map(|i| i.severity).max()
    }

    pub fn mean_references(&self) -> f64 {
        if self.segments == 0 {
            0.0
        } else {
            self.references as f64 / self.segments as f64
        }
    }
}

/// Cross-checks id coverage between references, hypotheses and ratings and
/// summarizes the reference sets. Never fails; problems land in `issues`.
pub fn validate_study(segments: &[Segment], hypotheses: &SystemHypotheses, ratings: &Ratings) -> ValidationReport {
    let mut issues = Vec::new();
    let mut push = |severity, kind, message: String| {
        issues.push(Issue {
            severity,
            kind,
            message,
        })
    };
    let known: BTreeSet<&str> = segments.iter().map(Segment::id).collect();

    for (system, hyps) in hypotheses {
        let unknown: Vec<String> = hyps.keys().filter(|id| !known.contains(id.as_str())).cloned().collect();
        if !unknown.is_empty() {
            push(
                Severity::Error,
                IssueKind::UnknownSegment,
                format!(
                    "system `{system}` has hypotheses for unknown segments: {}",
                    preview(&unknown)
                ),
            );
        }
        let missing: Vec<String> = known
            .iter()
            .filter(|id| !hyps.contains_key(**id))
            .map(|id| id.to_string())
            .collect();
        if !missing.is_empty() {
            push(
                Severity::Warning,
                IssueKind::MissingHypothesis,
                format!(
                    "system `{system}` has no hypothesis for {} segment(s): {}",
                    missing.len(),
                    preview(&missing)
                ),
            );
        }
    }
    for (system, per_segment) in ratings {
        let unknown: Vec<String> = per_segment
            .keys()
            .filter(|id| !known.contains(id.as_str()))
            .cloned()
            .collect();
        if !unknown.is_empty() {
            push(
                Severity::Error,
                IssueKind::UnknownSegment,
                format!(
                    "system `{system}` has ratings for unknown segments: {}",
                    preview(&unknown)
                ),
            );
        }
        let missing: Vec<String> = known
            .iter()
            .filter(|id| !per_segment.contains_key(**id))
            .map(|id| id.to_string())
            .collect();
        if !missing.is_empty() {
            push(
                Severity::Warning,
                IssueKind::MissingRating,
                format!(
                    "system `{system}` has no rating for {} segment(s): {}",
                    missing.len(),
                    preview(&missing)
                ),
            );
        }
    }
    if !ratings.is_empty() {
        for system in hypotheses.keys().filter(|s| !ratings.contains_key(*s)) {
            push(
                Severity::Warning,
                IssueKind::UnmatchedSystem,
                format!("system `{system}` has hypotheses but no ratings"),
            );
        }
    }
    for system in ratings.keys().filter(|s| !hypotheses.contains_key(*s)) {
        push(
            Severity::Warning,
            IssueKind::UnmatchedSystem,
            format!("system `{system}` has ratings but no hypotheses"),
        );
    }

    let ineligible: Vec<String> = segments
        .iter()
        .filter(|s| !s.has_positive_reference())
        .map(|s| s.id().to_owned())
        .collect();
    if !ineligible.is_empty() {
        push(
            Severity::Warning,
            IssueKind::DbleuIneligible,
            format!(
                "{} segment(s) have no positive-weight reference: {}",
                ineligible.len(),
                preview(&ineligible)
            ),
        );
    }
    let no_original: Vec<String> = segments
        .iter()
        .filter(|s| !s.references().iter().any(|r| r.is_original))
        .map(|s| s.id().to_owned())
        .collect();
    if !no_original.is_empty() {
        push(
            Severity::Warning,
            IssueKind::NoOriginal,
            format!(
                "{} segment(s) have no original reference: {}",
                no_original.len(),
                preview(&no_original)
            ),
        );
    }

    let counts: Vec<usize> = segments.iter().map(|s| s.references().len()).collect();
    let mut weight_histogram = [0; 10];
    for r in segments.iter().flat_map(Segment::references) {
        let bin = (((r.weight + 1.0) / 0.2).floor() as usize).min(9);
        weight_histogram[bin] += 1;
    }
    let systems: BTreeSet<&String> = hypotheses.keys().chain(ratings.keys()).collect();
    ValidationReport {
        issues,
        segments: segments.len(),
        systems: systems.len(),
        references: counts.iter().sum(),
        min_references: counts.iter().copied().min().unwrap_or(0),
        max_references: counts.iter().copied().max().unwrap_or(0),
        original_references: segments
            .iter()
            .flat_map(Segment::references)
            .filter(|r| r.is_original)
            .count(),
        weight_histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::{parse_hypotheses, parse_ratings, parse_references, RatingScale, ReadOptions};
    use std::path::Path;

    fn study(refs: &str, hyps: &str, ratings: &str) -> ValidationReport {
        let p = Path::new("t");
        let o = ReadOptions::default();
        validate_study(
            &parse_references(p, refs, &o).unwrap().segments,
            &parse_hypotheses(p, hyps, &o).unwrap(),
            &parse_ratings(p, ratings, &o, RatingScale::default(), true).unwrap(),
        )
    }

    const REFS: &str = "s1\tr0\t0.6\t1\ta b\ns1\tr1\t-0.7\t0\tc\ns2\tr0\t1\t1\td\n";

    #[test]
    fn consistent_study_has_no_issues() {
        let report = study(REFS, "s1\tA\tx\ns2\tA\ty\n", "s1\tA\t4\ns2\tA\t5\n");
        assert!(report.issues.is_empty(), "{:?}", report.issues);
        assert_eq!(report.worst(), None);
        assert_eq!((report.segments, report.systems, report.references), (2, 1, 3));
        assert_eq!((report.min_references, report.max_references), (1, 2));
        assert_eq!(report.original_references, 2);
        assert_eq!(report.weight_histogram.iter().sum::<usize>(), 3);
        assert_eq!(report.weight_histogram[9], 1); // weight 1.0
        assert_eq!(report.weight_histogram[8], 1); // weight 0.6
        assert_eq!(report.weight_histogram[1], 1); // weight -0.7
    }

    #[test]
    fn unknown_segment_is_an_error() {
        let report = study(REFS, "s1\tA\tx\ns2\tA\ty\ns9\tA\tz\n", "s1\tA\t4\ns2\tA\t5\n");
        assert_eq!(report.worst(), Some(Severity::Error));
        let issue = &report.issues[0];
        assert_eq!(issue.kind, IssueKind::UnknownSegment);
        assert!(issue.message.contains("s9"));
    }

    #[test]
    fn missing_coverage_is_a_warning() {
        let report = study(REFS, "s1\tA\tx\n", "s1\tA\t4\ns2\tA\t5\ns1\tB\t3\ns2\tB\t3\n");
        let kinds: Vec<IssueKind> = report.issues.iter().map(|i| i.kind).collect();
        assert!(kinds.contains(&IssueKind::MissingHypothesis));
        assert!(kinds.contains(&IssueKind::UnmatchedSystem));
        assert_eq!(report.worst(), Some(Severity::Warning));
    }

    #[test]
    fn nonpositive_segment_flagged() {
        let refs = "s1\tr0\t0\t1\ta\ns1\tr1\t-0.2\t0\tb\n";
        let report = study(refs, "s1\tA\tx\n", "s1\tA\t3\n");
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].kind, IssueKind::DbleuIneligible);
    }
}
