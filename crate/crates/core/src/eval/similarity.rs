use alloc::vec::Vec;

use crate::metrics::ScoreVector;
use crate::numeric::cmp_asc;

/// 1-based ranks in ascending score order; tied values share the average of
/// the ranks they span.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp_asc(values[a], values[b]));
    let mut ranks = alloc::vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cmp_asc(values[order[start]], values[order[end]]).is_eq() {
            end += 1;
        }
        // Positions start..end hold ranks start+1 ..= end.
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman rank correlation (Pearson correlation of fractional ranks).
/// `None` when either input is constant or the lengths differ.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    pearson(&fractional_ranks(a), &fractional_ranks(b))
}

/// Pairwise Spearman correlations; entries involving a constant vector are
/// `None`.
pub fn spearman_matrix(vectors: &[ScoreVector]) -> Vec<Vec<Option<f64>>> {
    let ranks: Vec<Vec<f64>> = vectors.iter().map(|v| fractional_ranks(v.scores())).collect();
    let k = vectors.len();
    let mut out = alloc::vec![alloc::vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let rho = if ranks[i].len() != ranks[j].len() {
                None
            } else if i == j {
                pearson(&ranks[i], &ranks[i]).map(|_| 1.0)
            } else {
                pearson(&ranks[i], &ranks[j])
            };
            out[i][j] = rho;
            out[j][i] = rho;
        }
    }
    out
}

/// Each curve divided, bin by bin, by the best curve in that bin. Bins where
/// every curve is zero stay zero. Curves must share the same bins; shorter
/// curves are treated as zero beyond their end.
pub fn relative_performance(curves: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let bins = curves.iter().map(Vec::len).max().unwrap_or(0);
    let best: Vec<f64> =
        (0..bins).map(|b| curves.iter().filter_map(|c| c.get(b)).copied().fold(0.0, f64::max)).collect();
    curves
        .iter()
        .map(|c| {
            (0..bins).map(|b| if best[b] > 0.0 { c.get(b).copied().unwrap_or(0.0) / best[b] } else { 0.0 }).collect()
        })
        .collect()
}
