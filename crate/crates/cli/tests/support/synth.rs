//! Synthetic studies whose ground truth is known by construction.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt::Write as _;

use dbleu::corpus_io::SystemHypotheses;
use dbleu::{Ratings, Segment, TokenSequence, WeightedReference};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct SynthConfig {
    pub segments: usize,
    /// Per-system probability of swapping each copied token for an off-topic one.
    pub corruption: Vec<f64>,
    pub positive_refs: usize,
    pub negative_refs: usize,
    pub vocab: usize,
    pub rating_noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            segments: 200,
            corruption: vec![0.0, 0.15, 0.3, 0.45, 0.6],
            positive_refs: 4,
            negative_refs: 4,
            vocab: 200,
            rating_noise: 0.6,
        }
    }
}

pub struct SynthStudy {
    pub segments: Vec<Segment>,
    pub hyps: SystemHypotheses,
    /// On the [-1, 1] scale.
    pub ratings: Ratings,
    pub pairs: Vec<(String, String)>,
}

fn sentence(rng: &mut ChaCha8Rng, vocab: usize) -> Vec<String> {
    let len = rng.gen_range(5..=10);
    (0..len).map(|_| format!("w{}", rng.gen_range(0..vocab))).collect()
}

pub fn system_name(i: usize) -> String {
    format!("sys{i}")
}

/// Each hypothesis copies a reference drawn with probability proportional to
/// `max(w, 0)`, then swaps tokens for tokens of negatively weighted references
/// at the system's corruption rate. Its rating is the copied weight minus a
/// penalty for the swapped fraction, plus Gaussian-ish noise.
pub fn generate(cfg: &SynthConfig, seed: u64) -> SynthStudy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut segments = Vec::new();
    let mut hyps: SystemHypotheses = BTreeMap::new();
    let mut ratings: Ratings = BTreeMap::new();

    for i in 0..cfg.segments {
        let seg_id = format!("seg{i:04}");
        let mut refs = Vec::new();
        for j in 0..cfg.positive_refs {
            let w = if j == 0 {
                rng.gen_range(0.6..=1.0)
            } else {
                rng.gen_range(0.05..=1.0)
            };
            let toks = TokenSequence::new(sentence(&mut rng, cfg.vocab));
            refs.push(WeightedReference::new(format!("p{j}"), toks, round3(w), j == 0).unwrap());
        }
        for j in 0..cfg.negative_refs {
            let w = rng.gen_range(-1.0..-0.05);
            let toks = TokenSequence::new(sentence(&mut rng, cfg.vocab));
            refs.push(WeightedReference::new(format!("n{j}"), toks, round3(w), false).unwrap());
        }
        let total: f64 = refs.iter().map(|r| r.weight.max(0.0)).sum();

        for (s, &corruption) in cfg.corruption.iter().enumerate() {
            let mut pick = rng.gen_range(0.0..total);
            let chosen = refs
                .iter()
                .find(|r| {
                    pick -= r.weight.max(0.0);
                    r.weight > 0.0 && pick < 0.0
                })
                .unwrap_or(&refs[0]);
            let negatives: Vec<&WeightedReference> = refs.iter().filter(|r| r.weight < 0.0).collect();
            let mut swapped = 0usize;
            let tokens: Vec<String> = chosen
                .tokens
                .tokens()
                .iter()
                .map(|t| {
                    if rng.gen_bool(corruption) {
                        swapped += 1;
                        if negatives.is_empty() {
                            format!("w{}", rng.gen_range(0..cfg.vocab))
                        } else {
                            let neg = negatives[rng.gen_range(0..negatives.len())].tokens.tokens();
                            neg[rng.gen_range(0..neg.len())].clone()
                        }
                    } else {
                        t.clone()
                    }
                })
                .collect();
            let frac = swapped as f64 / tokens.len() as f64;
            let noise: f64 = (0..4).map(|_| rng.gen_range(-1.0..1.0)).sum::<f64>() * cfg.rating_noise / 2.0;
            let rating = (chosen.weight - 1.5 * frac + noise).clamp(-1.0, 1.0);

            let name = system_name(s);
            hyps.entry(name.clone())
                .or_default()
                .insert(seg_id.clone(), TokenSequence::new(tokens));
            ratings.entry(name).or_default().insert(seg_id.clone(), round3(rating));
        }
        segments.push(Segment::new(seg_id, refs).unwrap());
    }

    let names: Vec<String> = (0..cfg.corruption.len()).map(system_name).collect();
    let mut pairs = Vec::new();
    for a in 0..names.len() {
        for b in a + 1..names.len() {
            pairs.push((names[a].clone(), names[b].clone()));
        }
    }
    SynthStudy {
        segments,
        hyps,
        ratings,
        pairs,
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0 + 0.0
}

/// TSV files for the command-line tool; ratings are mapped onto a 1..5 scale.
pub fn to_tsv(study: &SynthStudy) -> (String, String, String) {
    let mut refs = Vec::new();
    dbleu::corpus_io::write_references(&study.segments, &mut refs).unwrap();
    let mut hyps = Vec::new();
    dbleu::corpus_io::write_hypotheses(&study.hyps, &mut hyps).unwrap();
    let mut ratings = String::new();
    for (system, per) in &study.ratings {
        for (seg, r) in per {
            let _ = writeln!(ratings, "{seg}\t{system}\t{}", 3.0 + 2.0 * r);
        }
    }
    (
        String::from_utf8(refs).unwrap(),
        String::from_utf8(hyps).unwrap(),
        ratings,
    )
}
