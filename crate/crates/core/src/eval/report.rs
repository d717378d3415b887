use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{
    bias_profile, identification_rate, normalized_identification_rate, null_sigma, relative_performance,
    spearman_matrix, top_count, AgeGrouping, AgePoint, BiasProfile, EvalConfig, EvalError,
};
use crate::metrics::ScoreVector;
use crate::network::SeminalSet;

/// IR and NIR of one metric at one top fraction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateRow {
    pub metric: String,
    pub z: f64,
    pub ir: f64,
    pub nir: f64,
    pub sigma_ratio: f64,
    /// NIR divided by the best NIR among the evaluated metrics at this `z`.
    pub relative_nir: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BiasRow {
    pub metric: String,
    pub z: f64,
    pub profile: BiasProfile,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurveRow {
    pub metric: String,
    pub points: Vec<AgePoint>,
    /// IR per age bin relative to the best metric in that bin.
    pub relative_ir: Vec<f64>,
    pub relative_nir: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpearmanMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

/// Everything the evaluation produces for one dataset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub nodes: usize,
    pub seminal: usize,
    pub groups: usize,
    pub rates: Vec<RateRow>,
    pub bias: Vec<BiasRow>,
    pub curves: Vec<CurveRow>,
    pub spearman: SpearmanMatrix,
}

/// Each value over the largest one; all zeros when the largest is not
/// positive.
pub fn relative_scores(values: &[f64]) -> Vec<f64> {
    let best = values.iter().copied().fold(0.0, f64::max);
    values.iter().map(|&v| if best > 0.0 { v / best } else { 0.0 }).collect()
}

/// IR, NIR and bias profiles of every score vector at every configured
/// fraction, plus their Spearman matrix. All vectors must cover the same
/// network.
pub fn evaluate(scores: &[ScoreVector], seminal: &SeminalSet, cfg: &EvalConfig) -> Result<EvalReport, EvalError> {
    cfg.validate()?;
    let nodes = scores.first().map_or(0, ScoreVector::len);
    if let Some(bad) = scores.iter().find(|s| s.len() != nodes) {
        return Err(EvalError::LengthMismatch { expected: nodes, got: bad.len() });
    }
    let grouping = AgeGrouping::new(nodes, cfg.groups)?;
    let mut rates = Vec::new();
    let mut bias = Vec::new();
    for (zi, &z) in cfg.fractions.iter().enumerate() {
        let top = top_count(z, nodes)?;
        let sigma0 = null_sigma(&grouping, top, cfg.null_replicates, cfg.seed.wrapping_add(zi as u64));
        let first = rates.len();
        for sv in scores {
            let ir = identification_rate(sv, seminal, z)?;
            let nir = normalized_identification_rate(sv, seminal, &grouping, z)?;
            let profile = bias_profile(sv, &grouping, z, sigma0)?;
            rates.push(RateRow {
                metric: sv.label().to_string(),
                z,
                ir,
                nir,
                sigma_ratio: profile.ratio(),
                relative_nir: 0.0,
            });
            bias.push(BiasRow { metric: sv.label().to_string(), z, profile });
        }
        let nirs: Vec<f64> = rates[first..].iter().map(|r| r.nir).collect();
        for (row, rel) in rates[first..].iter_mut().zip(relative_scores(&nirs)) {
            row.relative_nir = rel;
        }
    }
    Ok(EvalReport {
        nodes,
        seminal: seminal.len(),
        groups: cfg.groups,
        rates,
        bias,
        curves: Vec::new(),
        spearman: SpearmanMatrix {
            labels: scores.iter().map(|s| s.label().to_string()).collect(),
            values: spearman_matrix(scores),
        },
    })
}

impl EvalReport {
    /// Attaches age curves (one per metric, sharing age bins) and their
    /// relative-performance normalization.
    pub fn set_curves(&mut self, curves: Vec<(String, Vec<AgePoint>)>) {
        let irs: Vec<Vec<f64>> = curves.iter().map(|(_, c)| c.iter().map(|p| p.ir).collect()).collect();
        let nirs: Vec<Vec<f64>> = curves.iter().map(|(_, c)| c.iter().map(|p| p.nir).collect()).collect();
        let rel_ir = relative_performance(&irs);
        let rel_nir = relative_performance(&nirs);
        self.curves = curves
            .into_iter()
            .zip(rel_ir.into_iter().zip(rel_nir))
            .map(|((metric, points), (relative_ir, relative_nir))| CurveRow {
                metric,
                points,
                relative_ir,
                relative_nir,
            })
            .collect();
    }

    pub fn rate(&self, metric: &str, z: f64) -> Option<&RateRow> {
        self.rates.iter().find(|r| r.metric == metric && r.z == z)
    }

    /// Mean over reports (datasets) of `NIR(m) / max_n NIR(n)` at fraction
    /// `z`, for every metric present in all reports.
    pub fn average_relative_nir(reports: &[EvalReport], z: f64) -> Vec<(String, f64)> {
        let Some(first) = reports.first() else { return Vec::new() };
        first
            .rates
            .iter()
            .filter(|r| r.z == z)
            .filter_map(|r| {
                let values: Option<Vec<f64>> =
                    reports.iter().map(|rep| rep.rate(&r.metric, z).map(|x| x.relative_nir)).collect();
                let values = values?;
                Some((r.metric.clone(), values.iter().sum::<f64>() / values.len() as f64))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn evaluate_small_example() {
        let n = 400;
        let good = ScoreVector::new("good", (0..n).map(|i| if i % 10 == 0 { 100.0 + i as f64 } else { 0.0 }).collect());
        let old = ScoreVector::new("old", (0..n).map(|i| -(i as f64)).collect());
        let seminal = SeminalSet::from_indices(vec![390, 10, 200]);
        let cfg = EvalConfig { fractions: vec![0.01, 0.02], groups: 4, null_replicates: 50, seed: 3 };
        let report = evaluate(&[good, old], &seminal, &cfg).unwrap();
        assert_eq!(report.rates.len(), 4);
        let g = report.rate("good", 0.01).unwrap();
        // Top 4 of "good": 390, 380, 370, 360 (all group 3) -> N_U = 1, weight 1/4.
        assert!((g.ir - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.nir - 1.0 / 12.0).abs() < 1e-15);
        let o = report.rate("old", 0.01).unwrap();
        assert_eq!(o.ir, 0.0);
        assert_eq!(g.relative_nir, 1.0);
        assert_eq!(o.relative_nir, 0.0);
        assert!(report.rates.iter().all(|r| r.nir <= r.ir));
        assert_eq!(report.spearman.values.len(), 2);
    }

    #[test]
    fn average_relative_over_datasets() {
        let mk = |vals: &[(&str, f64)]| EvalReport {
            nodes: 0,
            seminal: 0,
            groups: 1,
            rates: vals
                .iter()
                .map(|&(m, rel)| RateRow {
                    metric: m.into(),
                    z: 0.01,
                    ir: 0.0,
                    nir: 0.0,
                    sigma_ratio: 0.0,
                    relative_nir: rel,
                })
                .collect(),
            bias: vec![],
            curves: vec![],
            spearman: SpearmanMatrix { labels: vec![], values: vec![] },
        };
        let avg =
            EvalReport::average_relative_nir(&[mk(&[("a", 1.0), ("b", 0.5)]), mk(&[("a", 0.6), ("b", 1.0)])], 0.01);
        assert_eq!(avg, vec![("a".into(), 0.8), ("b".into(), 0.75)]);
    }

    #[test]
    fn relative_scores_handles_zero() {
        assert_eq!(relative_scores(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(relative_scores(&[0.2, 0.4]), vec![0.5, 1.0]);
    }
}
