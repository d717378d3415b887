//! Identification rates as a function of seminal-node age, measured on
//! year-end snapshots.
//!
//! A seminal node published on `p` is evaluated at age `dt` (whole years) on
//! the first year-end snapshot dated on or after `p + dt years`. Nodes for
//! which no such snapshot exists are too young and leave the average.

use alloc::vec::Vec;

use chrono::Months;

use super::{group_weights, top_count, AgeGrouping, EvalError};
use crate::metrics::{MetricError, ScoreVector};
use crate::network::{CitationNetwork, SeminalSet};
use crate::Date;

/// One bin of an age curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgePoint {
    pub dt_years: u32,
    pub ir: f64,
    pub nir: f64,
    /// Seminal nodes old enough to be evaluated at this age.
    pub eligible: usize,
}

/// Contribution of each seminal node (by position in the set) on one
/// snapshot: `(in top, penalty weight if in top)`.
type SnapshotContrib = Vec<(f64, f64)>;

fn contributions(
    result: Result<ScoreVector, MetricError>,
    snap: &CitationNetwork,
    seminal: &SeminalSet,
    z: f64,
    groups: usize,
) -> Result<SnapshotContrib, EvalError> {
    let present = seminal.nodes().partition_point(|&s| s < snap.len());
    let zeros = alloc::vec![(0.0, 0.0); present];
    let scores = match result {
        Ok(sv) => sv,
        Err(e) if e.is_degenerate_input() => return Ok(zeros),
        Err(e) => return Err(e.into()),
    };
    if scores.len() != snap.len() {
        return Err(EvalError::LengthMismatch { expected: snap.len(), got: scores.len() });
    }
    // Snapshots too small to have a top set or G groups contribute nothing.
    let (Ok(k), Ok(grouping)) = (top_count(z, snap.len()), AgeGrouping::new(snap.len(), groups)) else {
        return Ok(zeros);
    };
    let top = &scores.ranking()[..k];
    let weights = group_weights(top, &grouping);
    let mut in_top = alloc::vec![false; snap.len()];
    for &i in top {
        in_top[i as usize] = true;
    }
    Ok(seminal.nodes()[..present]
        .iter()
        .map(|&s| if in_top[s] { (1.0, weights[grouping.group_of(s)]) } else { (0.0, 0.0) })
        .collect())
}

/// Age curves for several metrics at once. `compute` returns one result per
/// metric for a snapshot; degenerate-input failures (edgeless or tiny
/// snapshots) count as "not in the top", other failures abort.
pub fn age_curves_many<F>(
    net: &CitationNetwork,
    seminal: &SeminalSet,
    z: f64,
    groups: usize,
    metrics: usize,
    mut compute: F,
) -> Result<Vec<Vec<AgePoint>>, EvalError>
where
    F: FnMut(&CitationNetwork) -> Vec<Result<ScoreVector, MetricError>>,
{
    if seminal.is_empty() {
        return Err(EvalError::EmptySeminal);
    }
    super::check_fraction(z)?;
    let cutoffs = net.year_end_cutoffs();
    // contrib[metric][snapshot][seminal position]
    let mut contrib: Vec<Vec<SnapshotContrib>> = alloc::vec![Vec::with_capacity(cutoffs.len()); metrics];
    for &cutoff in &cutoffs {
        let snap = net.snapshot(cutoff)?;
        let results = compute(&snap);
        if results.len() != metrics {
            return Err(EvalError::LengthMismatch { expected: metrics, got: results.len() });
        }
        for (m, result) in results.into_iter().enumerate() {
            contrib[m].push(contributions(result, &snap, seminal, z, groups)?);
        }
    }
    let plan = evaluation_plan(net, seminal, &cutoffs);
    Ok(contrib
        .iter()
        .map(|per_snapshot| {
            plan.iter()
                .map(|(dt, slots)| {
                    let (ir, nir) = slots
                        .iter()
                        .map(|&(pos, snap)| per_snapshot[snap][pos])
                        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
                    let count = slots.len() as f64;
                    AgePoint { dt_years: *dt, ir: ir / count, nir: nir / count, eligible: slots.len() }
                })
                .collect()
        })
        .collect())
}

/// For each age, the `(seminal position, snapshot index)` pairs to read.
fn evaluation_plan(net: &CitationNetwork, seminal: &SeminalSet, cutoffs: &[Date]) -> Vec<(u32, Vec<(usize, usize)>)> {
    let mut plan = Vec::new();
    for dt in 0u32.. {
        let slots: Vec<(usize, usize)> = seminal
            .nodes()
            .iter()
            .enumerate()
            .filter_map(|(pos, &s)| {
                let target = net.date(s).checked_add_months(Months::new(12 * dt))?;
                let k = cutoffs.partition_point(|&c| c < target);
                (k < cutoffs.len()).then_some((pos, k))
            })
            .collect();
        if slots.is_empty() {
            break;
        }
        plan.push((dt, slots));
    }
    plan
}

/// Age curve of a single metric.
pub fn age_curves<F>(
    net: &CitationNetwork,
    seminal: &SeminalSet,
    z: f64,
    groups: usize,
    mut compute: F,
) -> Result<Vec<AgePoint>, EvalError>
where
    F: FnMut(&CitationNetwork) -> Result<ScoreVector, MetricError>,
{
    let mut curves = age_curves_many(net, seminal, z, groups, 1, |snap| alloc::vec![compute(snap)])?;
    Ok(curves.pop().unwrap_or_default())
}

/// `dt -> f_z(m, dt)`.
pub fn identification_rate_vs_age<F>(
    net: &CitationNetwork,
    seminal: &SeminalSet,
    z: f64,
    compute: F,
) -> Result<Vec<(u32, f64)>, EvalError>
where
    F: FnMut(&CitationNetwork) -> Result<ScoreVector, MetricError>,
{
    // Grouping only affects the NIR column; a single group never fails.
    let curve = age_curves(net, seminal, z, 1, compute)?;
    Ok(curve.into_iter().map(|p| (p.dt_years, p.ir)).collect())
}

/// `dt -> NIR(m, dt)`, with age groups rebuilt on every snapshot.
pub fn nir_vs_age<F>(
    net: &CitationNetwork,
    seminal: &SeminalSet,
    z: f64,
    groups: usize,
    compute: F,
) -> Result<Vec<(u32, f64)>, EvalError>
where
    F: FnMut(&CitationNetwork) -> Result<ScoreVector, MetricError>,
{
    let curve = age_curves(net, seminal, z, groups, compute)?;
    Ok(curve.into_iter().map(|p| (p.dt_years, p.nir)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{age_rank, citation_count};
    use crate::network::fixtures::d;
    use crate::network::NodeRecord;
    use alloc::format;
    use alloc::vec;

    /// 100 filler nodes per year 1990..=1996 plus a target node published in
    /// 1990 whose score is driven by `favored`.
    fn yearly_net() -> CitationNetwork {
        let mut nodes = vec![NodeRecord::new("target", d(1990, 6, 1)), NodeRecord::new("end", d(1996, 12, 31))];
        for year in 1990..=1996 {
            for k in 0..100 {
                nodes.push(NodeRecord::new(
                    format!("f{year}-{k:03}"),
                    d(year, 1 + (k % 12) as u32, 1 + (k / 12) as u32),
                ));
            }
        }
        CitationNetwork::from_records(nodes, []).unwrap().0
    }

    #[test]
    fn contributes_only_when_top_at_that_age() {
        let net = yearly_net();
        let target = net.index_of("target").unwrap();
        let seminal = SeminalSet::from_indices(vec![target]);
        // Top only in snapshots cut on or after 1995-12-31.
        let curve = identification_rate_vs_age(&net, &seminal, 0.01, |snap| {
            let mut scores = vec![0.0; snap.len()];
            let favored = if snap.as_of() >= d(1995, 12, 31) { target } else { usize::from(target == 0) };
            scores[favored] = 1.0;
            Ok(ScoreVector::new("m", scores))
        })
        .unwrap();
        let at = |dt: u32| curve.iter().find(|p| p.0 == dt).unwrap().1;
        assert_eq!(at(3), 0.0);
        assert_eq!(at(5), 1.0);
        // Published mid-1990: 6 full years fit before 1996-12-31.
        assert_eq!(curve.last().unwrap().0, 6);
    }

    #[test]
    fn newborn_outside_top_contributes_zero() {
        let net = yearly_net();
        let young = net.len() - 1;
        let seminal = SeminalSet::from_indices(vec![young]);
        let curve = age_curves(&net, &seminal, 0.01, 4, |snap| Ok(age_rank(snap))).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0].dt_years, 0);
        assert_eq!((curve[0].ir, curve[0].nir), (0.0, 0.0));
    }

    #[test]
    fn nir_never_exceeds_ir() {
        let net = yearly_net();
        let seminal = SeminalSet::from_indices((0..net.len()).step_by(37).collect());
        let curve = age_curves(&net, &seminal, 0.05, 7, |snap| Ok(age_rank(snap))).unwrap();
        assert!(!curve.is_empty());
        assert!(curve.iter().all(|p| p.nir <= p.ir && p.ir <= 1.0));
        // Edgeless snapshots with all-tied counts are still valid inputs.
        let c = age_curves(&net, &seminal, 0.05, 7, |snap| Ok(citation_count(snap))).unwrap();
        assert_eq!(c.len(), curve.len());
    }

    #[test]
    fn degenerate_snapshots_count_as_misses() {
        let net = yearly_net();
        let seminal = SeminalSet::from_indices(vec![0]);
        let curve = age_curves(&net, &seminal, 0.01, 40, |_| Err(MetricError::NoEdges("HITS"))).unwrap();
        assert!(curve.iter().all(|p| p.ir == 0.0));
        let err = age_curves(&net, &seminal, 0.01, 40, |_| {
            Err(MetricError::NotConverged { metric: "P", iterations: 1, residual: 1.0 })
        });
        assert!(matches!(err, Err(EvalError::Metric(_))));
    }
}
