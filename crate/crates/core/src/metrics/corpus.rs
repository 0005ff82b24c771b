use serde::{Deserialize, Serialize};

use super::{index_segments, Hypotheses, MetricConfig, MetricKind, MetricReport, Segment, Smoothing};
use crate::error::{Error, Result};
use crate::text::{extract_ngrams, NGramCounts, TokenSequence};

/// Brevity penalty for corpus length totals: 1 when the hypotheses are at
/// least as long as the references, `exp(1 - ref_len / hyp_len)` otherwise.
pub fn brevity_penalty(hyp_len: usize, ref_len: usize) -> Result<f64> {
    if hyp_len == 0 || ref_len == 0 {
        return Err(Error::ZeroLength { hyp_len, ref_len });
    }
    if hyp_len >= ref_len {
        Ok(1.0)
    } else {
        Ok((1.0 - ref_len as f64 / hyp_len as f64).exp())
    }
}

/// Reference length closest to `hyp_len`; ties go to the shorter reference.
pub fn closest_ref_length(hyp_len: usize, ref_lens: &[usize]) -> Result<usize> {
    ref_lens
        .iter()
        .copied()
        .min_by_key(|&len| (len.abs_diff(hyp_len), len))
        .ok_or(Error::NoReferenceLengths)
}

/// Sufficient statistics one segment contributes to a corpus score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentStats {
    pub hyp_len: usize,
    pub ref_len: usize,
    /// Matched n-gram mass per order, possibly negative for weighted matches.
    pub matched: Vec<f64>,
    /// Candidate n-gram mass per order.
    pub candidates: Vec<f64>,
}

/// Computes the statistics of `hyp` against `segment`. Weighted statistics are
/// used for [`MetricKind::Dbleu`], plain clipped counts otherwise.
pub fn segment_stats(
    hyp: &TokenSequence,
    segment: &Segment,
    kind: MetricKind,
    max_order: usize,
) -> Result<SegmentStats> {
    if kind == MetricKind::Dbleu && !segment.has_positive_reference() {
        return Err(Error::NoPositiveReference(segment.id().to_owned()));
    }
    let refs = segment.references();
    let ref_lens: Vec<usize> = refs.iter().map(|r| r.tokens.len()).collect();
    let mut stats = SegmentStats {
        hyp_len: hyp.len(),
        ref_len: closest_ref_length(hyp.len(), &ref_lens)?,
        matched: Vec::with_capacity(max_order),
        candidates: Vec::with_capacity(max_order),
    };
    let top_weight = segment.max_weight();

    for order in 1..=max_order {
        let hyp_counts = extract_ngrams(hyp, order)?;
        let ref_counts = refs
            .iter()
            .map(|r| extract_ngrams(&r.tokens, order))
            .collect::<Result<Vec<_>>>()?;
        let (matched, candidates) = match kind {
            MetricKind::Dbleu => weighted_mass(&hyp_counts, &ref_counts, segment),
            MetricKind::Bleu | MetricKind::Sbleu => {
                let (m, c) = clipped_mass(&hyp_counts, &ref_counts);
                (m as f64, c as f64)
            }
        };
        stats.matched.push(matched);
        stats.candidates.push(match kind {
            MetricKind::Dbleu => top_weight * candidates,
            _ => candidates,
        });
    }
    Ok(stats)
}

fn clipped_mass(hyp: &NGramCounts<'_>, refs: &[NGramCounts<'_>]) -> (usize, usize) {
    let mut matched = 0;
    let mut candidates = 0;
    for (gram, count) in hyp.iter() {
        matched += refs.iter().map(|r| count.min(r.get(gram))).max().unwrap_or(0);
        candidates += count;
    }
    (matched, candidates)
}

/// Returns the weighted numerator and the unweighted candidate count; the
/// caller scales the latter by the segment's largest weight.
fn weighted_mass(hyp: &NGramCounts<'_>, refs: &[NGramCounts<'_>], segment: &Segment) -> (f64, f64) {
    let mut matched = 0.0;
    let mut candidates = 0.0;
    for (gram, count) in hyp.iter() {
        // Only references that contain the n-gram compete for it.
        let best = refs
            .iter()
            .zip(segment.references())
            .filter_map(|(counts, r)| match counts.get(gram) {
                0 => None,
                c => Some(r.weight * count.min(c) as f64),
            })
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
        matched += best.unwrap_or(0.0);
        candidates += count as f64;
    }
    (matched, candidates)
}

/// Folds per-segment statistics, in iteration order, into a corpus report.
pub fn report_from_stats<'a>(stats: impl IntoIterator<Item = &'a SegmentStats>, cfg: &MetricConfig) -> MetricReport {
    let order = cfg.max_order;
    let mut matched = vec![0.0; order];
    let mut candidates = vec![0.0; order];
    let (mut hyp_length, mut ref_length, mut segments_scored) = (0, 0, 0);
    for s in stats {
        debug_assert_eq!(s.matched.len(), order);
        for n in 0..order {
            matched[n] += s.matched[n];
            candidates[n] += s.candidates[n];
        }
        hyp_length += s.hyp_len;
        ref_length += s.ref_len;
        segments_scored += 1;
    }

    let precisions: Vec<f64> = (0..order)
        .map(|n| precision(matched[n], candidates[n], n + 1, cfg.smoothing))
        .collect();
    let nonpositive_orders: Vec<usize> = precisions
        .iter()
        .enumerate()
        .filter(|(_, &p)| p <= 0.0)
        .map(|(n, _)| n + 1)
        .collect();
    // An empty hypothesis side has no meaningful penalty; it scores zero.
    let brevity_penalty = brevity_penalty(hyp_length, ref_length).unwrap_or(0.0);
    let score = score_from_totals(&matched, &candidates, hyp_length, ref_length, cfg);

    MetricReport {
        kind: cfg.kind,
        max_order: order,
        score,
        precisions,
        brevity_penalty,
        hyp_length,
        ref_length,
        segments_scored,
        nonpositive_orders,
    }
}

fn precision(matched: f64, candidates: f64, order: usize, smoothing: Smoothing) -> f64 {
    let (m, c) = match smoothing {
        Smoothing::AddOne if order >= 2 => (matched + 1.0, candidates + 1.0),
        _ => (matched, candidates),
    };
    if c > 0.0 {
        m / c
    } else {
        0.0
    }
}

/// Geometric-mean score from summed statistics; zero when any precision is
/// nonpositive or the hypothesis side is empty.
pub(crate) fn score_from_totals(
    matched: &[f64],
    candidates: &[f64],
    hyp_len: usize,
    ref_len: usize,
    cfg: &MetricConfig,
) -> f64 {
    let Ok(bp) = brevity_penalty(hyp_len, ref_len) else {
        return 0.0;
    };
    let mut log_sum = 0.0;
    for (n, (&m, &c)) in matched.iter().zip(candidates).enumerate() {
        let p = precision(m, c, n + 1, cfg.smoothing);
        if p <= 0.0 {
            return 0.0;
        }
        log_sum += p.ln();
    }
    bp * (log_sum / cfg.max_order as f64).exp()
}

pub(super) fn corpus_stats(
    hyps: &Hypotheses,
    segments: &[Segment],
    kind: MetricKind,
    max_order: usize,
) -> Result<Vec<SegmentStats>> {
    if hyps.is_empty() {
        return Err(Error::EmptyHypotheses);
    }
    let index = index_segments(segments);
    hyps.iter()
        .map(|(id, hyp)| {
            let segment = index
                .get(id.as_str())
                .ok_or_else(|| Error::UnknownSegment(id.clone()))?;
            segment_stats(hyp, segment, kind, max_order)
        })
        .collect()
}

/// Corpus-level multi-reference BLEU. Reference weights are ignored.
pub fn corpus_bleu(hyps: &Hypotheses, segments: &[Segment], cfg: &MetricConfig) -> Result<MetricReport> {
    let cfg = MetricConfig {
        kind: MetricKind::Bleu,
        ..*cfg
    };
    cfg.validate()?;
    let stats = corpus_stats(hyps, segments, MetricKind::Bleu, cfg.max_order)?;
    Ok(report_from_stats(&stats, &cfg))
}

/// Corpus-level discriminative BLEU. Every scored segment needs a reference
/// with positive weight.
pub fn corpus_dbleu(hyps: &Hypotheses, segments: &[Segment], cfg: &MetricConfig) -> Result<MetricReport> {
    let cfg = MetricConfig {
        kind: MetricKind::Dbleu,
        ..*cfg
    };
    cfg.validate()?;
    let stats = corpus_stats(hyps, segments, MetricKind::Dbleu, cfg.max_order)?;
    Ok(report_from_stats(&stats, &cfg))
}
