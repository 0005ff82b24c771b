use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rank::{kendall_tau, spearman_rho};
use super::sampling::{domain, sample_assignments, stream_rng, Assignment};
use crate::error::{Error, Result};
use crate::metrics::{
    score_from_totals, segment_stats, sentence_bleu, Hypotheses, MetricConfig, MetricKind, Segment, SegmentStats,
};

/// Mean human rating per segment for each system.
pub type Ratings = BTreeMap<String, BTreeMap<String, f64>>;

/// Differences between two systems on one observation unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedObservation {
    /// Metric score of A minus metric score of B.
    pub m: f64,
    /// Mean rating of A minus mean rating of B.
    pub q: f64,
}

/// The systems, pairs and per-segment ratings a correlation study runs over.
/// Segments are indexed in ascending id order.
#[derive(Debug, Clone)]
pub struct Study {
    segment_ids: Vec<String>,
    systems: Vec<String>,
    pairs: Vec<(usize, usize)>,
    // [system][segment]
    ratings: Vec<Vec<f64>>,
}

impl Study {
    /// Every system named in `pairs` must have a rating for every segment.
    pub fn new<I, S>(segment_ids: I, ratings: &Ratings, pairs: &[(String, String)]) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segment_ids: Vec<String> = segment_ids
            .into_iter()
            .map(Into::into)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if pairs.is_empty() {
            return Err(Error::InvalidStudy("no system pairs declared".into()));
        }
        let systems: Vec<String> = pairs
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let position = |name: &str| systems.binary_search_by(|s| s.as_str().cmp(name)).unwrap();
        let mut pair_idx = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            if a == b {
                return Err(Error::InvalidStudy(format!("system `{a}` is paired with itself")));
            }
            pair_idx.push((position(a), position(b)));
        }

        let ratings = systems
            .iter()
            .map(|system| {
                let per_segment = ratings.get(system);
                segment_ids
                    .iter()
                    .map(|seg| {
                        per_segment
                            .and_then(|m| m.get(seg))
                            .copied()
                            .ok_or_else(|| Error::MissingStudyData {
                                system: system.clone(),
                                segment: seg.clone(),
                                what: "rating",
                            })
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            segment_ids,
            systems,
            pairs: pair_idx,
            ratings,
        })
    }

    pub fn segment_ids(&self) -> &[String] {
        &self.segment_ids
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.pairs
            .iter()
            .map(|&(a, b)| (self.systems[a].as_str(), self.systems[b].as_str()))
    }

    pub(crate) fn pair_indices(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn system_index(&self, name: &str) -> Option<usize> {
        self.systems.iter().position(|s| s == name)
    }

    /// Mean rating of `system` over the unit's segments.
    pub fn mean_rating(&self, system: usize, unit: &[usize]) -> f64 {
        unit.iter().map(|&i| self.ratings[system][i]).sum::<f64>() / unit.len() as f64
    }
}

/// Something that assigns one score to a system on one observation unit.
pub trait UnitScorer: Sync {
    /// `system` indexes [`Study::systems`]; `unit` holds ascending segment indices.
    fn score_unit(&self, system: usize, unit: &[usize]) -> f64;
}

/// Scores each unit by the system's mean human rating.
pub struct RatingScorer<'a>(pub &'a Study);

impl UnitScorer for RatingScorer<'_> {
    fn score_unit(&self, system: usize, unit: &[usize]) -> f64 {
        self.0.mean_rating(system, unit)
    }
}

enum Precomputed {
    Corpus(Vec<Vec<SegmentStats>>),
    Sentence(Vec<Vec<f64>>),
}

/// BLEU, discriminative BLEU or macro sentence BLEU restricted to a unit.
/// Per-segment statistics are computed once up front.
pub struct MetricScorer {
    cfg: MetricConfig,
    table: Precomputed,
}

impl MetricScorer {
    pub fn new(
        study: &Study,
        segments: &[Segment],
        hypotheses: &BTreeMap<String, Hypotheses>,
        cfg: &MetricConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let index: HashMap<&str, &Segment> = segments.iter().map(|s| (s.id(), s)).collect();
        let rows = study
            .systems()
            .par_iter()
            .map(|system| {
                let hyps = hypotheses.get(system);
                study
                    .segment_ids()
                    .iter()
                    .map(|seg_id| {
                        let hyp = hyps
                            .and_then(|h| h.get(seg_id))
                            .ok_or_else(|| Error::MissingStudyData {
                                system: system.clone(),
                                segment: seg_id.clone(),
                                what: "hypothesis",
                            })?;
                        let segment = index
                            .get(seg_id.as_str())
                            .ok_or_else(|| Error::UnknownSegment(seg_id.clone()))?;
                        Ok(match cfg.kind {
                            MetricKind::Sbleu => Cell::Score(sentence_bleu(hyp, segment, cfg)?),
                            kind => Cell::Stats(segment_stats(hyp, segment, kind, cfg.max_order)?),
                        })
                    })
                    .collect::<Result<Vec<Cell>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let table = match cfg.kind {
            MetricKind::Sbleu => Precomputed::Sentence(
                rows.into_iter()
                    .map(|r| r.into_iter().map(Cell::into_score).collect())
                    .collect(),
            ),
            _ => Precomputed::Corpus(
                rows.into_iter()
                    .map(|r| r.into_iter().map(Cell::into_stats).collect())
                    .collect(),
            ),
        };
        Ok(Self { cfg: *cfg, table })
    }

    pub fn config(&self) -> &MetricConfig {
        &self.cfg
    }
}

enum Cell {
    Stats(SegmentStats),
    Score(f64),
}

impl Cell {
    fn into_stats(self) -> SegmentStats {
        match self {
            Cell::Stats(s) => s,
            Cell::Score(_) => unreachable!("corpus metric stores statistics"),
        }
    }

    fn into_score(self) -> f64 {
        match self {
            Cell::Score(s) => s,
            Cell::Stats(_) => unreachable!("sentence metric stores scores"),
        }
    }
}

impl UnitScorer for MetricScorer {
    fn score_unit(&self, system: usize, unit: &[usize]) -> f64 {
        match &self.table {
            Precomputed::Sentence(scores) => unit.iter().map(|&i| scores[system][i]).sum::<f64>() / unit.len() as f64,
            Precomputed::Corpus(stats) => {
                let order = self.cfg.max_order;
                let mut matched = [0.0; crate::metrics::MAX_SUPPORTED_ORDER];
                let mut candidates = [0.0; crate::metrics::MAX_SUPPORTED_ORDER];
                let (mut hyp_len, mut ref_len) = (0, 0);
                for &i in unit {
                    let s = &stats[system][i];
                    for n in 0..order {
                        matched[n] += s.matched[n];
                        candidates[n] += s.candidates[n];
                    }
                    hyp_len += s.hyp_len;
                    ref_len += s.ref_len;
                }
                score_from_totals(&matched[..order], &candidates[..order], hyp_len, ref_len, &self.cfg)
            }
        }
    }
}

/// One observation per unit of `assignment` for the system pair `(a, b)`.
pub fn build_observations(
    study: &Study,
    assignment: &Assignment,
    pair: (usize, usize),
    scorer: &dyn UnitScorer,
) -> Vec<PairedObservation> {
    let (a, b) = pair;
    assignment
        .units
        .iter()
        .map(|unit| PairedObservation {
            m: scorer.score_unit(a, unit) - scorer.score_unit(b, unit),
            q: study.mean_rating(a, unit) - study.mean_rating(b, unit),
        })
        .collect()
}

/// Observations of every declared pair on one assignment, pooled.
pub fn pooled_observations(study: &Study, assignment: &Assignment, scorer: &dyn UnitScorer) -> Vec<PairedObservation> {
    study
        .pair_indices()
        .iter()
        .flat_map(|&pair| build_observations(study, assignment, pair, scorer))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyOptions {
    pub unit_size: usize,
    pub assignments: usize,
    /// Total bootstrap resamples, spread round-robin over the assignments.
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            unit_size: 100,
            assignments: 1000,
            bootstrap: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub spearman_rho: f64,
    pub kendall_tau: f64,
    pub rho_ci: (f64, f64),
    pub tau_ci: (f64, f64),
    /// Assignments with a defined correlation; the point estimates average these.
    pub assignments: usize,
    pub unit_size: usize,
    pub observations_per_assignment: usize,
}

/// Correlation of a single set of observations.
pub fn correlate_observations(obs: &[PairedObservation]) -> Result<(f64, f64)> {
    let (m, q): (Vec<f64>, Vec<f64>) = obs.iter().map(|o| (o.m, o.q)).unzip();
    Ok((spearman_rho(&m, &q)?, kendall_tau(&m, &q)?))
}

struct AssignmentOutcome {
    point: Option<(f64, f64)>,
    replicates: Vec<(f64, f64)>,
}

/// Runs the study for one scorer over pre-sampled assignments. Assignments
/// are evaluated in parallel on the current rayon pool; results do not depend
/// on the thread count.
pub fn correlate_assignments(
    study: &Study,
    assignments: &[Assignment],
    scorer: &dyn UnitScorer,
    opts: &StudyOptions,
) -> Result<CorrelationSummary> {
    let k_total = assignments.len();
    let outcomes: Vec<AssignmentOutcome> = assignments
        .par_iter()
        .enumerate()
        .map(|(k, assignment)| {
            let obs = pooled_observations(study, assignment, scorer);
            if obs.is_empty() {
                return AssignmentOutcome {
                    point: None,
                    replicates: Vec::new(),
                };
            }
            let point = correlate_observations(&obs).ok();
            // replicates k, k + K, k + 2K, ... below the bootstrap budget
            let draws = (opts.bootstrap + k_total - 1 - k) / k_total;
            let mut rng = stream_rng(opts.seed, domain::BOOTSTRAP, k as u64);
            let mut sample = vec![obs[0]; obs.len()];
            let replicates = (0..draws)
                .filter_map(|_| {
                    for slot in sample.iter_mut() {
                        *slot = obs[rng.gen_range(0..obs.len())];
                    }
                    correlate_observations(&sample).ok()
                })
                .collect();
            AssignmentOutcome { point, replicates }
        })
        .collect();

    let points: Vec<(f64, f64)> = outcomes.iter().filter_map(|o| o.point).collect();
    if points.is_empty() {
        return Err(Error::DegenerateCorrelation(
            "no assignment produced a defined correlation",
        ));
    }
    let n = points.len() as f64;
    let rho = points.iter().map(|p| p.0).sum::<f64>() / n;
    let tau = points.iter().map(|p| p.1).sum::<f64>() / n;

    let mut rho_boot: Vec<f64> = outcomes.iter().flat_map(|o| o.replicates.iter().map(|r| r.0)).collect();
    let mut tau_boot: Vec<f64> = outcomes.iter().flat_map(|o| o.replicates.iter().map(|r| r.1)).collect();

    Ok(CorrelationSummary {
        spearman_rho: rho,
        kendall_tau: tau,
        rho_ci: percentile_interval(&mut rho_boot, rho),
        tau_ci: percentile_interval(&mut tau_boot, tau),
        assignments: points.len(),
        unit_size: assignments.first().map_or(opts.unit_size, Assignment::unit_size),
        observations_per_assignment: assignments.first().map_or(0, |a| a.units.len()) * study.pair_indices().len(),
    })
}

/// Samples assignments once and evaluates every scorer on them.
pub fn correlate(study: &Study, scorers: &[&dyn UnitScorer], opts: &StudyOptions) -> Result<Vec<CorrelationSummary>> {
    let assignments = sample_assignments(study.segment_ids().len(), opts.unit_size, opts.assignments, opts.seed)?;
    scorers
        .iter()
        .map(|s| correlate_assignments(study, &assignments, *s, opts))
        .collect()
}

/// 95% percentile interval, widened if needed so it contains `point`.
fn percentile_interval(values: &mut [f64], point: f64) -> (f64, f64) {
    if values.is_empty() {
        return (point, point);
    }
    values.sort_by(f64::total_cmp);
    let lo = quantile(values, 0.025);
    let hi = quantile(values, 0.975);
    (lo.min(point), hi.max(point))
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let below = pos.floor() as usize;
    let above = pos.ceil() as usize;
    let frac = pos - below as f64;
    sorted[below] + (sorted[above] - sorted[below]) * frac
}
