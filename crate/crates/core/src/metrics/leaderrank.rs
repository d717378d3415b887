use alloc::vec::Vec;

use super::{MetricConfig, MetricError, ScoreVector};
use crate::network::CitationNetwork;
use crate::numeric::mean_abs_change;

/// LeaderRank: an unbiased random walk on the network augmented with a
/// ground node linked both ways to every node. Starts from one unit of score
/// per node (ground included); at convergence the ground node's score is
/// split evenly among the real nodes, so real scores sum to `N + 1`.
pub fn leaderrank(net: &CitationNetwork, cfg: &MetricConfig) -> Result<ScoreVector, MetricError> {
    cfg.validate()?;
    let n = net.len();
    if n == 0 {
        return Err(MetricError::EmptyNetwork("LeaderRank"));
    }
    let nf = n as f64;
    if net.edge_count() == 0 {
        // The ground star alone is bipartite and the iteration oscillates;
        // its stationary state gives every node (N + 1) / N.
        return Ok(ScoreVector::new("L", alloc::vec![(nf + 1.0) / nf; n]).with_iterations(0));
    }
    // Every real node has the extra link to the ground node.
    let inv_out: Vec<f64> = (0..n).map(|j| 1.0 / (net.outdegree(j) + 1) as f64).collect();
    let mut score = alloc::vec![1.0; n + 1];
    let mut next = alloc::vec![0.0; n + 1];
    let mut share = alloc::vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=cfg.max_iterations {
        for j in 0..n {
            share[j] = score[j] * inv_out[j];
        }
        let from_ground = score[n] / nf;
        for i in 0..n {
            next[i] = net.citers(i).iter().map(|&j| share[j as usize]).sum::<f64>() + from_ground;
        }
        next[n] = share.iter().sum();
        residual = mean_abs_change(&next, &score);
        core::mem::swap(&mut score, &mut next);
        if residual < cfg.tolerance {
            let ground = score[n] / nf;
            score.truncate(n);
            score.iter_mut().for_each(|s| *s += ground);
            return Ok(ScoreVector::new("L", score).with_iterations(iteration));
        }
    }
    Err(MetricError::NotConverged { metric: "LeaderRank", iterations: cfg.max_iterations, residual })
}
