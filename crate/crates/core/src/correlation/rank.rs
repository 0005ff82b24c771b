//! Spearman's rho and Kendall's tau-b.

use crate::error::{Error, Result};

fn check_lengths(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateCorrelation("fewer than two observations"));
    }
    Ok(())
}

/// 1-based ranks with ties sharing the mean of the positions they span.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| (values[a] + 0.0).total_cmp(&(values[b] + 0.0)));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

pub(crate) fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateCorrelation("constant input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson correlation of the fractional rank vectors.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_lengths(xs, ys)?;
    pearson(&fractional_ranks(xs), &fractional_ranks(ys))
}

fn tied_pairs(run: u64) -> u64 {
    run * run.saturating_sub(1) / 2
}

/// Sum of `t(t-1)/2` over runs of equal adjacent keys.
fn count_tied_pairs<T>(items: &[T], same: impl Fn(&T, &T) -> bool) -> u64 {
    let mut total = 0;
    let mut run = 1;
    for w in items.windows(2) {
        if same(&w[0], &w[1]) {
            run += 1;
        } else {
            total += tied_pairs(run);
            run = 1;
        }
    }
    if !items.is_empty() {
        total += tied_pairs(run);
    }
    total
}

/// Stable merge sort on `values` returning the number of strict inversions.
fn sort_counting_swaps(values: &mut [f64], scratch: &mut [f64]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut values[..mid], &mut scratch[..mid]);
    swaps += sort_counting_swaps(&mut values[mid..], &mut scratch[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if values[j] < values[i] {
            scratch[k] = values[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            scratch[k] = values[i];
            i += 1;
        }
        k += 1;
    }
    scratch[k..k + mid - i].copy_from_slice(&values[i..mid]);
    k += mid - i;
    scratch[k..k + n - j].copy_from_slice(&values[j..n]);
    values.copy_from_slice(&scratch[..n]);
    swaps
}

/// Tie-corrected Kendall's tau-b in `O(n log n)` (Knight's algorithm).
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_lengths(xs, ys)?;
    let n = xs.len() as u64;
    // `+ 0.0` folds -0.0 into 0.0 so total_cmp agrees with ==
    let mut pairs: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x + 0.0, y + 0.0)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let all_pairs = n * (n - 1) / 2;
    let x_ties = count_tied_pairs(&pairs, |a, b| a.0 == b.0);
    let joint_ties = count_tied_pairs(&pairs, |a, b| a.0 == b.0 && a.1 == b.1);

    let mut y_sorted: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut scratch = vec![0.0; y_sorted.len()];
    let swaps = sort_counting_swaps(&mut y_sorted, &mut scratch);
    let y_ties = count_tied_pairs(&y_sorted, |a, b| a == b);

    if x_ties == all_pairs || y_ties == all_pairs {
        return Err(Error::DegenerateCorrelation("all pairs tied"));
    }
    let score = all_pairs as i64 - x_ties as i64 - y_ties as i64 + joint_ties as i64 - 2 * swaps as i64;
    Ok(tau_b(score, all_pairs, x_ties, y_ties))
}

/// `(concordant - discordant) / sqrt((n0 - n1)(n0 - n2))`.
pub fn tau_b(concordant_minus_discordant: i64, all_pairs: u64, x_ties: u64, y_ties: u64) -> f64 {
    let denom = ((all_pairs - x_ties) as f64 * (all_pairs - y_ties) as f64).sqrt();
    (concordant_minus_discordant as f64 / denom).clamp(-1.0, 1.0)
}
