//! Brute-force reference implementations written straight from the metric
//! and correlation definitions. They share no code with the library.

#![allow(dead_code)]

pub struct OracleRef<'a> {
    pub tokens: &'a [String],
    pub weight: f64,
}

fn ngrams(tokens: &[String], n: usize) -> Vec<Vec<String>> {
    if tokens.len() < n {
        return Vec::new();
    }
    (0..=tokens.len() - n).map(|i| tokens[i..i + n].to_vec()).collect()
}

fn occurrences(grams: &[Vec<String>], g: &[String]) -> usize {
    grams.iter().filter(|x| x.as_slice() == g).count()
}

fn distinct(grams: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for g in grams {
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Bleu,
    Dbleu,
}

/// Matched and candidate mass of one segment at order `n`.
pub fn segment_mass(hyp: &[String], refs: &[OracleRef<'_>], n: usize, kind: OracleKind) -> (f64, f64) {
    let h = ngrams(hyp, n);
    let r: Vec<Vec<Vec<String>>> = refs.iter().map(|x| ngrams(x.tokens, n)).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for g in distinct(&h) {
        let ch = occurrences(&h, &g);
        match kind {
            OracleKind::Bleu => {
                let mut best = 0usize;
                for rj in &r {
                    best = best.max(ch.min(occurrences(rj, &g)));
                }
                num += best as f64;
                den += ch as f64;
            }
            OracleKind::Dbleu => {
                let mut best: Option<f64> = None;
                for (j, rj) in r.iter().enumerate() {
                    let cr = occurrences(rj, &g);
                    if cr > 0 {
                        let v = refs[j].weight * ch.min(cr) as f64;
                        best = Some(match best {
                            Some(b) if b >= v => b,
                            _ => v,
                        });
                    }
                }
                num += best.unwrap_or(0.0);
                let mut top = f64::NEG_INFINITY;
                for x in refs {
                    top = top.max(x.weight * ch as f64);
                }
                den += top;
            }
        }
    }
    (num, den)
}

pub fn closest_length(hyp_len: usize, refs: &[OracleRef<'_>]) -> usize {
    let mut best = refs[0].tokens.len();
    for r in refs {
        let l = r.tokens.len();
        let (d, bd) = ((l as i64 - hyp_len as i64).abs(), (best as i64 - hyp_len as i64).abs());
        if d < bd || (d == bd && l < best) {
            best = l;
        }
    }
    best
}

/// Corpus score over `(hypothesis, references)` items; `smooth` adds one to
/// numerator and denominator for orders of two and up.
pub fn corpus_score(
    items: &[(&[String], Vec<OracleRef<'_>>)],
    max_n: usize,
    kind: OracleKind,
    smooth: bool,
) -> (f64, Vec<f64>) {
    let mut precisions = Vec::new();
    for n in 1..=max_n {
        let (mut num, mut den) = (0.0, 0.0);
        for (h, refs) in items {
            let (a, b) = segment_mass(h, refs, n, kind);
            num += a;
            den += b;
        }
        if smooth && n >= 2 {
            num += 1.0;
            den += 1.0;
        }
        precisions.push(if den > 0.0 { num / den } else { 0.0 });
    }
    let hyp_len: usize = items.iter().map(|(h, _)| h.len()).sum();
    let ref_len: usize = items.iter().map(|(h, r)| closest_length(h.len(), r)).sum();
    if hyp_len == 0 || precisions.iter().any(|&p| p <= 0.0) {
        return (0.0, precisions);
    }
    let bp = if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    let product: f64 = precisions.iter().product();
    (bp * product.powf(1.0 / max_n as f64), precisions)
}

/// Rank of each value: number of smaller values plus the mean position among equals.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let less = v.iter().filter(|y| *y < x).count();
            let equal = v.iter().filter(|y| *y == x).count();
            (2 * less + equal + 1) as f64 / 2.0
        })
        .collect()
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        let (dx, dy) = (rx[i] - mx, ry[i] - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Tau-b by enumerating every pair.
pub fn kendall(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut s, mut tx, mut ty) = (0i64, 0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                tx += 1;
            }
            if dy == 0.0 {
                ty += 1;
            }
            if dx != 0.0 && dy != 0.0 {
                if (dx > 0.0) == (dy > 0.0) {
                    s += 1;
                } else {
                    s -= 1;
                }
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as u64;
    if tx == n0 || ty == n0 {
        return None;
    }
    let denom = ((n0 - tx) as f64 * (n0 - ty) as f64).sqrt();
    Some((s as f64 / denom).clamp(-1.0, 1.0))
}
