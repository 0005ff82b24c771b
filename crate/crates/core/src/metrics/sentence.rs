use super::corpus::{report_from_stats, segment_stats};
use super::{index_segments, Hypotheses, MetricConfig, MetricKind, MetricReport, Segment};
use crate::error::{Error, Result};
use crate::text::TokenSequence;

/// BLEU of a single hypothesis against its segment. Weights are ignored and
/// the configured smoothing applies; an empty hypothesis scores zero.
pub fn sentence_bleu(hyp: &TokenSequence, segment: &Segment, cfg: &MetricConfig) -> Result<f64> {
    Ok(sentence_report(hyp, segment, cfg)?.score)
}

fn sentence_report(hyp: &TokenSequence, segment: &Segment, cfg: &MetricConfig) -> Result<MetricReport> {
    cfg.validate()?;
    let cfg = MetricConfig {
        kind: MetricKind::Sbleu,
        ..*cfg
    };
    let stats = segment_stats(hyp, segment, MetricKind::Sbleu, cfg.max_order)?;
    let mut report = report_from_stats([&stats], &cfg);
    if hyp.is_empty() {
        report.score = 0.0;
    }
    Ok(report)
}

/// Arithmetic mean of [`sentence_bleu`] over all hypotheses. Precisions and
/// the brevity penalty are unweighted means of the per-sentence values; the
/// lengths are totals.
pub fn macro_sbleu(hyps: &Hypotheses, segments: &[Segment], cfg: &MetricConfig) -> Result<MetricReport> {
    cfg.validate()?;
    if hyps.is_empty() {
        return Err(Error::EmptyHypotheses);
    }
    let index = index_segments(segments);
    let order = cfg.max_order;
    let mut mean = MetricReport {
        kind: MetricKind::Sbleu,
        max_order: order,
        score: 0.0,
        precisions: vec![0.0; order],
        brevity_penalty: 0.0,
        hyp_length: 0,
        ref_length: 0,
        segments_scored: 0,
        nonpositive_orders: Vec::new(),
    };
    for (id, hyp) in hyps {
        let segment = index
            .get(id.as_str())
            .ok_or_else(|| Error::UnknownSegment(id.clone()))?;
        let r = sentence_report(hyp, segment, cfg)?;
        mean.score += r.score;
        for (acc, p) in mean.precisions.iter_mut().zip(&r.precisions) {
            *acc += p;
        }
        mean.brevity_penalty += r.brevity_penalty;
        mean.hyp_length += r.hyp_length;
        mean.ref_length += r.ref_length;
        mean.segments_scored += 1;
    }
    let count = mean.segments_scored as f64;
    mean.score /= count;
    mean.brevity_penalty /= count;
    for p in &mut mean.precisions {
        *p /= count;
    }
    Ok(mean)
}
