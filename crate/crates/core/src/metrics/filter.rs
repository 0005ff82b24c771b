use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Segment;
use crate::error::{Error, Result};

/// Which references of each segment take part in scoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RefMode {
    /// Only the original response.
    Single,
    /// References with weight at or above the threshold.
    Threshold(f64),
    All,
}

impl RefMode {
    pub fn threshold(w: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&w) {
            return Err(Error::ThresholdOutOfRange(w));
        }
        Ok(RefMode::Threshold(w))
    }
}

impl fmt::Display for RefMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefMode::Single => f.write_str("single"),
            RefMode::Threshold(w) => write!(f, "threshold:{w}"),
            RefMode::All => f.write_str("all"),
        }
    }
}

impl FromStr for RefMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(RefMode::Single),
            "all" => Ok(RefMode::All),
            _ => {
                let value = s
                    .strip_prefix("threshold:")
                    .ok_or_else(|| format!("unknown reference mode `{s}` (expected single, all or threshold:<w>)"))?;
                let w: f64 = value.parse().map_err(|_| format!("invalid threshold `{value}`"))?;
                RefMode::threshold(w).map_err(|e| e.to_string())
            }
        }
    }
}

impl From<RefMode> for String {
    fn from(mode: RefMode) -> Self {
        mode.to_string()
    }
}

impl TryFrom<String> for RefMode {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredCorpus {
    pub segments: Vec<Segment>,
    /// Segments left without a positive-weight reference. These still score
    /// under BLEU and sentence BLEU but are rejected by discriminative BLEU.
    pub without_positive: Vec<String>,
}

/// Restricts every segment's references according to `mode`. A segment that
/// would be left with no reference at all is an error.
pub fn filter_references(segments: &[Segment], mode: RefMode) -> Result<FilteredCorpus> {
    if let RefMode::Threshold(w) = mode {
        if !(-1.0..=1.0).contains(&w) {
            return Err(Error::ThresholdOutOfRange(w));
        }
    }
    let mut kept = Vec::with_capacity(segments.len());
    let mut without_positive = Vec::new();
    for segment in segments {
        let refs: Vec<_> = segment
            .references()
            .iter()
            .filter(|r| match mode {
                RefMode::Single => r.is_original,
                RefMode::Threshold(w) => r.weight >= w,
                RefMode::All => true,
            })
            .cloned()
            .collect();
        let filtered = Segment::new(segment.id(), refs)?;
        if !filtered.has_positive_reference() {
            without_positive.push(filtered.id().to_owned());
        }
        kept.push(filtered);
    }
    Ok(FilteredCorpus {
        segments: kept,
        without_positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::WeightedReference;
    use crate::text::tokenize;

    /// First reference set of the sample table: original plus five mined responses.
    fn imagine_set() -> Segment {
        let rows = [
            ("they were very disappointed!!!", 0.6, true),
            (
                "yes. luckily, the whole thing feels very much of the past now.",
                0.8,
                false,
            ),
            ("na this is anything but a disappointment..", 0.6, false),
            ("they were belly rolling, filarious.", 0.4, false),
            ("your imagination is wrong, very wrong at that.", -0.1, false),
            ("the weather in russia is very cool.", -0.7, false),
        ];
        let refs = rows
            .iter()
            .enumerate()
            .map(|(j, (t, w, o))| WeightedReference::new(format!("r{j}"), tokenize(t, false), *w, *o).unwrap())
            .collect();
        Segment::new("imagine", refs).unwrap()
    }

    #[test]
    fn lowest_threshold_is_identity() {
        let segs = vec![imagine_set()];
        let out = filter_references(&segs, RefMode::threshold(-1.0).unwrap()).unwrap();
        assert_eq!(out.segments, segs);
        assert_eq!(filter_references(&segs, RefMode::All).unwrap().segments, segs);
    }

    #[test]
    fn threshold_range_checked() {
        assert!(RefMode::threshold(1.01).is_err());
        assert!("threshold:1.01".parse::<RefMode>().is_err());
        assert!(filter_references(&[imagine_set()], RefMode::Threshold(-1.5)).is_err());
    }

    #[test]
    fn threshold_keeps_high_scoring_references() {
        let out = filter_references(&[imagine_set()], RefMode::threshold(0.6).unwrap()).unwrap();
        let weights: Vec<f64> = out.segments[0].references().iter().map(|r| r.weight).collect();
        assert_eq!(weights, [0.6, 0.8, 0.6]);
        assert!(out.without_positive.is_empty());
    }

    #[test]
    fn single_keeps_original() {
        let out = filter_references(&[imagine_set()], RefMode::Single).unwrap();
        let refs = out.segments[0].references();
        assert_eq!(refs.len(), 1);
        assert!(refs[0].is_original);
    }

    #[test]
    fn reports_segments_without_positive_weight() {
        let refs = vec![
            WeightedReference::new("a", tokenize("x", false), -0.2, true).unwrap(),
            WeightedReference::new("b", tokenize("y", false), 0.5, false).unwrap(),
        ];
        let segs = [Segment::new("s", refs).unwrap()];
        let out = filter_references(&segs, RefMode::Single).unwrap();
        assert_eq!(out.without_positive, ["s"]);
    }

    #[test]
    fn emptied_segment_is_an_error() {
        let err = filter_references(&[imagine_set()], RefMode::threshold(0.9).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NoReferences(id) if id == "imagine"));
    }

    #[test]
    fn mode_strings() {
        assert_eq!("single".parse::<RefMode>().unwrap(), RefMode::Single);
        assert_eq!("all".parse::<RefMode>().unwrap(), RefMode::All);
        assert_eq!("threshold:0.6".parse::<RefMode>().unwrap(), RefMode::Threshold(0.6));
        assert_eq!(RefMode::Threshold(0.6).to_string(), "threshold:0.6");
        assert!("w>=0.6".parse::<RefMode>().is_err());
    }
}
