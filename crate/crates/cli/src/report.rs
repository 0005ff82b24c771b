//! Rendered command output. Scores are fixed to 4 decimals and correlations to
//! 3, both in text and in JSON, so reports are byte-stable across platforms.

use std::fmt::Write as _;

use dbleu::corpus_io::ValidationReport;
use dbleu::{CorrelationSummary, MetricReport};
use serde::{Deserialize, Serialize};

fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    // + 0.0 turns -0.0 into 0.0
    (x * scale).round() / scale + 0.0
}

fn score4(x: f64) -> f64 {
    round_to(x, 4)
}

fn corr3(x: f64) -> f64 {
    round_to(x, 3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreOutput {
    pub metric: String,
    pub refs: String,
    pub system: String,
    pub score: f64,
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
    pub segments: usize,
    pub nonpositive_orders: Vec<usize>,
}

impl ScoreOutput {
    pub fn new(label: String, refs: String, system: String, r: &MetricReport) -> Self {
        Self {
            metric: label,
            refs,
            system,
            score: score4(r.score),
            precisions: r.precisions.iter().copied().map(score4).collect(),
            brevity_penalty: score4(r.brevity_penalty),
            hyp_length: r.hyp_length,
            ref_length: r.ref_length,
            segments: r.segments_scored,
            nonpositive_orders: r.nonpositive_orders.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "metric: {}", self.metric);
        let _ = writeln!(s, "system: {}", self.system);
        let _ = writeln!(s, "refs: {}", self.refs);
        let _ = writeln!(s, "segments: {}", self.segments);
        let _ = writeln!(s, "score: {:.4}", self.score);
        for (n, p) in self.precisions.iter().enumerate() {
            let _ = writeln!(s, "p{}: {:.4}", n + 1, p);
        }
        let _ = writeln!(s, "brevity_penalty: {:.4}", self.brevity_penalty);
        let _ = writeln!(s, "hyp_length: {}", self.hyp_length);
        let _ = writeln!(s, "ref_length: {}", self.ref_length);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: String,
    pub refs: String,
    pub spearman_rho: f64,
    pub rho_ci: (f64, f64),
    pub kendall_tau: f64,
    pub tau_ci: (f64, f64),
    pub assignments: usize,
    pub unit_size: usize,
    pub observations: usize,
}

impl CorrelationRow {
    pub fn new(metric: String, refs: String, s: &CorrelationSummary) -> Self {
        Self {
            metric,
            refs,
            spearman_rho: corr3(s.spearman_rho),
            rho_ci: (corr3(s.rho_ci.0), corr3(s.rho_ci.1)),
            kendall_tau: corr3(s.kendall_tau),
            tau_ci: (corr3(s.tau_ci.0), corr3(s.tau_ci.1)),
            assignments: s.assignments,
            unit_size: s.unit_size,
            observations: s.observations_per_assignment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub seed: u64,
    pub bootstrap: usize,
    pub rows: Vec<CorrelationRow>,
}

impl CorrelationTable {
    pub fn to_text(&self) -> String {
        let mut s = String::from("metric\trefs\trho\trho_ci\ttau\ttau_ci\tunit_size\tassignments\tobservations\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{:.3}\t({:.3}, {:.3})\t{:.3}\t({:.3}, {:.3})\t{}\t{}\t{}",
                r.metric,
                r.refs,
                r.spearman_rho,
                r.rho_ci.0,
                r.rho_ci.1,
                r.kendall_tau,
                r.tau_ci.0,
                r.tau_ci.1,
                r.unit_size,
                r.assignments,
                r.observations
            );
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis: String,
    pub value: f64,
    #[serde(flatten)]
    pub row: CorrelationRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub seed: u64,
    pub bootstrap: usize,
    pub points: Vec<SweepPoint>,
}

impl SweepTable {
    /// One line per point, every field in its own column for plotting.
    pub fn to_text(&self) -> String {
        let mut s = String::from(
            "axis\tvalue\tmetric\trefs\trho\trho_lo\trho_hi\ttau\ttau_lo\ttau_hi\tunit_size\tassignments\tobservations\n",
        );
        for p in &self.points {
            let r = &p.row;
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{}\t{}\t{}",
                p.axis,
                p.value,
                r.metric,
                r.refs,
                r.spearman_rho,
                r.rho_ci.0,
                r.rho_ci.1,
                r.kendall_tau,
                r.tau_ci.0,
                r.tau_ci.1,
                r.unit_size,
                r.assignments,
                r.observations
            );
        }
        s
    }
}

pub fn validation_text(report: &ValidationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "segments: {}", report.segments);
    let _ = writeln!(s, "systems: {}", report.systems);
    let _ = writeln!(
        s,
        "references: {} (per segment min {}, mean {:.2}, max {})",
        report.references,
        report.min_references,
        report.mean_references(),
        report.max_references
    );
    let _ = writeln!(s, "original references: {}", report.original_references);
    let _ = writeln!(s, "weight histogram:");
    for (i, count) in report.weight_histogram.iter().enumerate() {
        let lo = -1.0 + 0.2 * i as f64;
        let close = if i == 9 { ']' } else { ')' };
        let _ = writeln!(s, "  [{:+.1}, {:+.1}{close}\t{count}", lo, lo + 0.2);
    }
    if report.issues.is_empty() {
        let _ = writeln!(s, "issues: none");
    } else {
        let _ = writeln!(s, "issues: {}", report.issues.len());
        for issue in &report.issues {
            let _ = writeln!(s, "  {}: {}", issue.severity, issue.message);
        }
    }
    s
}

/// Compact JSON followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types serialize");
    s.push('\n');
    s
}
