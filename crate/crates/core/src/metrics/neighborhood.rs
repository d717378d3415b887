//! Metrics built from the local neighborhood: directed collective influence
//! and semi-local centrality.

use alloc::vec::Vec;

use super::{MetricConfig, MetricError, ScoreVector};
use crate::network::CitationNetwork;

/// Directed collective influence at level `l`:
///
/// ```text
/// CI_i = max(k_i - 1, 0) * sum_{j : d(i, j) = l} max(k_j - 1, 0)
/// ```
///
/// with `k` the indegree and `d(i, j)` the shortest path length following
/// references (outgoing edges) from `i`.
pub fn collective_influence(net: &CitationNetwork, cfg: &MetricConfig) -> Result<ScoreVector, MetricError> {
    cfg.validate()?;
    let level = cfg.ci_level;
    let n = net.len();
    let excess: Vec<u64> = (0..n).map(|i| net.indegree(i).saturating_sub(1) as u64).collect();
    let mut stamp = alloc::vec![u32::MAX; n];
    let mut frontier: Vec<u32> = Vec::new();
    let mut next: Vec<u32> = Vec::new();
    let mut scores = alloc::vec![0.0; n];
    for i in 0..n {
        if excess[i] == 0 {
            continue;
        }
        let mark = i as u32;
        stamp[i] = mark;
        frontier.clear();
        frontier.push(mark);
        for _ in 0..level {
            next.clear();
            for &u in &frontier {
                for &v in net.references(u as usize) {
                    if stamp[v as usize] != mark {
                        stamp[v as usize] = mark;
                        next.push(v);
                    }
                }
            }
            core::mem::swap(&mut frontier, &mut next);
            if frontier.is_empty() {
                break;
            }
        }
        let ring: u64 = frontier.iter().map(|&j| excess[j as usize]).sum();
        scores[i] = (excess[i] * ring) as f64;
    }
    let label = if level == 2 { alloc::string::String::from("CI") } else { alloc::format!("CI{level}") };
    Ok(ScoreVector::new(label, scores))
}

/// Semi-local centrality on the citer graph:
///
/// ```text
/// SLC_i = sum_{j in G(i)} Q_j,   Q_j = sum_{k in G(j)} N_k
/// ```
///
/// where `G(x)` are the nodes citing `x` and `N_k` counts the distinct nodes
/// within two citer steps of `k`, excluding `k` itself.
pub fn semi_local_centrality(net: &CitationNetwork) -> ScoreVector {
    let n = net.len();
    let mut stamp = alloc::vec![u32::MAX; n];
    let mut reach = alloc::vec![0u64; n];
    for k in 0..n {
        let mark = k as u32;
        stamp[k] = mark;
        let mut count = 0u64;
        for &j in net.citers(k) {
            if stamp[j as usize] != mark {
                stamp[j as usize] = mark;
                count += 1;
            }
            for &m in net.citers(j as usize) {
                if stamp[m as usize] != mark {
                    stamp[m as usize] = mark;
                    count += 1;
                }
            }
        }
        reach[k] = count;
    }
    let q: Vec<u64> = (0..n).map(|j| net.citers(j).iter().map(|&k| reach[k as usize]).sum()).collect();
    let scores = (0..n).map(|i| net.citers(i).iter().map(|&j| q[j as usize]).sum::<u64>() as f64).collect();
    ScoreVector::new("SLC", scores)
}
