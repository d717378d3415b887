//! PageRank and CiteRank, which share the same damped random walk and differ
//! only in the teleportation vector.

use alloc::vec::Vec;

use super::{MetricConfig, MetricError, ScoreVector};
use crate::eval::spearman;
use crate::network::CitationNetwork;
use crate::numeric::mean_abs_change;

/// Jacobi iteration of
///
/// ```text
/// x_i <- d * sum_{j -> i} x_j / kout_j + d * sum_{kout_j = 0} x_j / N + (1 - d) * v_i
/// ```
///
/// from the uniform vector, with `v` uniform when `teleport` is `None`.
fn damped_walk(
    net: &CitationNetwork,
    damping: f64,
    teleport: Option<&[f64]>,
    cfg: &MetricConfig,
    name: &'static str,
) -> Result<(Vec<f64>, usize), MetricError> {
    let n = net.len();
    if n == 0 {
        return Err(MetricError::EmptyNetwork(name));
    }
    let nf = n as f64;
    let inv_out: Vec<f64> = (0..n)
        .map(|j| match net.outdegree(j) {
            0 => 0.0,
            k => 1.0 / k as f64,
        })
        .collect();
    let mut score = alloc::vec![1.0 / nf; n];
    let mut next = alloc::vec![0.0; n];
    let mut share = alloc::vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=cfg.max_iterations {
        let mut dangling = 0.0;
        for j in 0..n {
            share[j] = score[j] * inv_out[j];
            if inv_out[j] == 0.0 {
                dangling += score[j];
            }
        }
        let uniform = damping * dangling / nf;
        for (i, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = net.citers(i).iter().map(|&j| share[j as usize]).sum();
            let jump = match teleport {
                Some(v) => (1.0 - damping) * v[i],
                None => (1.0 - damping) / nf,
            };
            *slot = damping * inflow + uniform + jump;
        }
        residual = mean_abs_change(&next, &score);
        core::mem::swap(&mut score, &mut next);
        if residual < cfg.tolerance {
            return Ok((score, iteration));
        }
    }
    Err(MetricError::NotConverged { metric: name, iterations: cfg.max_iterations, residual })
}

/// PageRank with uniform teleportation and uniform redistribution of the
/// mass sitting on dangling nodes. Scores sum to one.
pub fn pagerank(net: &CitationNetwork, cfg: &MetricConfig) -> Result<ScoreVector, MetricError> {
    cfg.validate()?;
    let (scores, iterations) = damped_walk(net, cfg.damping, None, cfg, "PageRank")?;
    Ok(ScoreVector::new("P", scores).with_iterations(iterations))
}

/// Teleportation weights `exp(-(t - t_i) / tau)` normalized over all nodes,
/// with `t` the network's reference date.
pub(crate) fn recency_weights(net: &CitationNetwork, tau_days: f64) -> Vec<f64> {
    let as_of = net.as_of();
    let ages: Vec<f64> = net.dates().iter().map(|&d| (as_of - d).num_days() as f64).collect();
    // Shifting by the youngest age cancels in the normalization and keeps
    // the largest weight at exactly 1.
    let youngest = ages.iter().copied().fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = ages.iter().map(|&a| libm::exp(-(a - youngest) / tau_days)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    weights
}

/// CiteRank: PageRank whose walkers start preferentially on recent nodes.
pub fn citerank(net: &CitationNetwork, cfg: &MetricConfig) -> Result<ScoreVector, MetricError> {
    cfg.validate()?;
    if net.is_empty() {
        return Err(MetricError::EmptyNetwork("CiteRank"));
    }
    let teleport = recency_weights(net, cfg.tau_days);
    let (scores, iterations) = damped_walk(net, cfg.damping, Some(&teleport), cfg, "CiteRank")?;
    Ok(ScoreVector::new("T", scores).with_iterations(iterations))
}

/// Citations each node received from nodes dated within the trailing
/// `window_days` before the reference date.
pub fn recent_indegree_gain(net: &CitationNetwork, window_days: i64) -> Vec<f64> {
    let from = net.as_of() - chrono::Duration::days(window_days);
    let dates = net.dates();
    (0..net.len()).map(|i| net.citers(i).iter().filter(|&&j| dates[j as usize] > from).count() as f64).collect()
}

/// Outcome of the CiteRank parameter search.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CiteRankTuning {
    pub damping: f64,
    pub tau_days: f64,
    /// Spearman correlation reached at the selected grid point.
    pub correlation: f64,
}

/// Grid search for the CiteRank parameters whose scores correlate best (by
/// Spearman) with the indegree each node gained in the trailing window.
/// Ties go to the smaller timescale, then to the smaller damping.
pub fn tune_citerank(
    net: &CitationNetwork,
    dampings: &[f64],
    taus_days: &[f64],
    window_days: i64,
    cfg: &MetricConfig,
) -> Result<CiteRankTuning, MetricError> {
    if dampings.is_empty() || taus_days.is_empty() {
        return Err(MetricError::InvalidConfig("CiteRank tuning grids must be non-empty"));
    }
    if net.is_empty() {
        return Err(MetricError::EmptyNetwork("CiteRank tuning"));
    }
    let span = (net.as_of() - net.first_date()).num_days();
    if window_days <= 0 || window_days > span.max(1) {
        return Err(MetricError::InvalidConfig("recent window must be positive and within the network's time span"));
    }
    let target = recent_indegree_gain(net, window_days);
    if target.iter().all(|&g| g == 0.0) {
        return Err(MetricError::DegenerateTuning);
    }
    let mut grid: Vec<(f64, f64)> = taus_days.iter().flat_map(|&t| dampings.iter().map(move |&a| (t, a))).collect();
    grid.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut best: Option<CiteRankTuning> = None;
    for (tau_days, damping) in grid {
        let point = MetricConfig { damping, tau_days, ..*cfg };
        let scores = citerank(net, &point)?;
        let Some(rho) = spearman(scores.scores(), &target) else { continue };
        if best.map_or(true, |b| rho > b.correlation) {
            best = Some(CiteRankTuning { damping, tau_days, correlation: rho });
        }
    }
    best.ok_or(MetricError::DegenerateTuning)
}
