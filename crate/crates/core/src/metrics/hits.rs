use alloc::vec::Vec;

use super::{MetricConfig, MetricError, ScoreVector};
use crate::network::CitationNetwork;

/// Converged HITS scores. The authority vector is the ranking metric.
#[derive(Debug, Clone, PartialEq)]
pub struct HitsScores {
    pub authority: ScoreVector,
    pub hub: ScoreVector,
}

pub fn hits(net: &CitationNetwork, cfg: &MetricConfig) -> Result<HitsScores, MetricError> {
    hits_observed(net, cfg, |_, _| {})
}

/// HITS with synchronous updates
///
/// ```text
/// a_i <- sum_{j -> i} h_j,    h_i <- sum_{i -> j} a_j
/// ```
///
/// from uniform vectors, each normalized to unit sum after every iteration.
/// `observe` sees the normalized `(authority, hub)` pair after each step.
/// Stops when `sum_i (|da_i| + |dh_i|) / N` falls below the tolerance.
pub fn hits_observed<F>(net: &CitationNetwork, cfg: &MetricConfig, mut observe: F) -> Result<HitsScores, MetricError>
where
    F: FnMut(&[f64], &[f64]),
{
    cfg.validate()?;
    let n = net.len();
    if n == 0 {
        return Err(MetricError::EmptyNetwork("HITS"));
    }
    if net.edge_count() == 0 {
        return Err(MetricError::NoEdges("HITS"));
    }
    let nf = n as f64;
    let mut auth = alloc::vec![1.0 / nf; n];
    let mut hub = alloc::vec![1.0 / nf; n];
    let mut next_auth: Vec<f64> = alloc::vec![0.0; n];
    let mut next_hub: Vec<f64> = alloc::vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=cfg.max_iterations {
        for i in 0..n {
            next_auth[i] = net.citers(i).iter().map(|&j| hub[j as usize]).sum();
            next_hub[i] = net.references(i).iter().map(|&j| auth[j as usize]).sum();
        }
        normalize(&mut next_auth);
        normalize(&mut next_hub);
        observe(&next_auth, &next_hub);
        residual =
            next_auth.iter().zip(&auth).chain(next_hub.iter().zip(&hub)).map(|(x, y)| (x - y).abs()).sum::<f64>() / nf;
        core::mem::swap(&mut auth, &mut next_auth);
        core::mem::swap(&mut hub, &mut next_hub);
        if residual < cfg.tolerance {
            return Ok(HitsScores {
                authority: ScoreVector::new("HITS", auth).with_iterations(iteration),
                hub: ScoreVector::new("HITS-hub", hub).with_iterations(iteration),
            });
        }
    }
    Err(MetricError::NotConverged { metric: "HITS", iterations: cfg.max_iterations, residual })
}

fn normalize(v: &mut [f64]) {
    // With at least one edge and positive inputs the mass is positive.
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::*;

    #[test]
    fn two_node_roles() {
        let h = hits(&net2(), &MetricConfig::default()).unwrap();
        assert_eq!(h.authority.scores(), &[1.0, 0.0]);
        assert_eq!(h.hub.scores(), &[0.0, 1.0]);
    }

    #[test]
    fn sums_stay_normalized() {
        let net = indexed(6, &[(1, 0), (2, 0), (3, 1), (4, 1), (5, 4), (5, 0), (3, 2), (2, 1)]);
        let mut steps = 0;
        hits_observed(&net, &MetricConfig::default(), |a, h| {
            steps += 1;
            assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        })
        .unwrap();
        assert!(steps > 1);
    }

    #[test]
    fn edgeless_is_an_error() {
        assert_eq!(hits(&indexed(3, &[]), &MetricConfig::default()).unwrap_err(), MetricError::NoEdges("HITS"));
    }
}
