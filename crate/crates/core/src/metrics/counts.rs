//! Count-based metrics: citation count, h-index, yearly citation percentile
//! and the age baseline.

use alloc::vec::Vec;

use chrono::Datelike;

use super::ScoreVector;
use crate::network::CitationNetwork;

/// Indegree of every node.
pub fn citation_count(net: &CitationNetwork) -> ScoreVector {
    ScoreVector::new("C", (0..net.len()).map(|i| net.indegree(i) as f64).collect())
}

/// Largest `h` such that the node is cited by at least `h` nodes that each
/// have at least `h` citations.
pub fn h_index(net: &CitationNetwork) -> ScoreVector {
    let indeg = net.indegrees();
    let mut buf = Vec::new();
    let scores = (0..net.len())
        .map(|i| {
            buf.clear();
            buf.extend(net.citers(i).iter().map(|&j| indeg[j as usize]));
            buf.sort_unstable_by(|a, b| b.cmp(a));
            buf.iter().enumerate().take_while(|&(r, &k)| k > r).count() as f64
        })
        .collect();
    ScoreVector::new("H", scores)
}

/// Share of same-year nodes with strictly fewer citations.
pub fn yccp(net: &CitationNetwork) -> ScoreVector {
    let n = net.len();
    let dates = net.dates();
    let mut scores = alloc::vec![0.0; n];
    let mut start = 0;
    let mut cohort: Vec<(usize, usize)> = Vec::new();
    // Network order is date order, so each year is a contiguous block.
    while start < n {
        let year = dates[start].year();
        let end = start + dates[start..].partition_point(|d| d.year() == year);
        cohort.clear();
        cohort.extend((start..end).map(|i| (net.indegree(i), i)));
        cohort.sort_unstable();
        let size = cohort.len() as f64;
        let mut below = 0;
        for (r, &(count, node)) in cohort.iter().enumerate() {
            if r > 0 && cohort[r - 1].0 < count {
                below = r;
            }
            scores[node] = below as f64 / size;
        }
        start = end;
    }
    ScoreVector::new("YCCP", scores)
}

/// Oldest node first, independent of the edges.
pub fn age_rank(net: &CitationNetwork) -> ScoreVector {
    ScoreVector::new("AgeR", (0..net.len()).map(|i| -(i as f64)).collect())
}
