//! Evaluation of rankings against a set of seminal nodes.
//!
//! The identification rate (IR) is the share of seminal nodes found in the
//! top `z` fraction of a ranking. The normalized identification rate (NIR)
//! discounts every identified seminal node whose age group is
//! over-represented at the top by `N_U / N_z(g)`, where `N_z(g)` counts the
//! top nodes from group `g` and `N_U` is the count an age-blind ranking would
//! put there on average.

use alloc::vec::Vec;

use thiserror::Error;

use crate::metrics::{MetricError, ScoreVector};
use crate::network::{NetworkError, SeminalSet};
use crate::numeric::floor_fraction;

mod curves;
mod grouping;
mod report;
mod similarity;

pub use curves::{age_curves, age_curves_many, identification_rate_vs_age, nir_vs_age, AgePoint};
pub use grouping::{analytic_null_sigma, bias_profile, null_sigma, AgeGrouping, BiasProfile, DEFAULT_NULL_REPLICATES};
pub use report::{evaluate, relative_scores, BiasRow, CurveRow, EvalReport, RateRow, SpearmanMatrix};
pub use similarity::{fractional_ranks, relative_performance, spearman, spearman_matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("top fraction {z} of {nodes} nodes selects no node")]
    EmptyTop { z: f64, nodes: usize },
    #[error("top fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("seminal set is empty")]
    EmptySeminal,
    #[error("cannot split {nodes} nodes into {groups} age groups")]
    InvalidGroups { groups: usize, nodes: usize },
    #[error("score vectors cover {got} nodes, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Evaluation parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalConfig {
    /// Top fractions to evaluate.
    pub fractions: Vec<f64>,
    /// Number of equal-size age groups.
    pub groups: usize,
    /// Monte-Carlo replicates for the null-model standard deviation.
    pub null_replicates: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { fractions: alloc::vec![0.01], groups: 40, null_replicates: DEFAULT_NULL_REPLICATES, seed: 0 }
    }
}

impl EvalConfig {
    /// The fraction used for bias histograms and age curves: 1% when listed,
    /// otherwise the first listed fraction.
    pub fn primary_fraction(&self) -> f64 {
        self.fractions.iter().copied().find(|&z| z == 0.01).or(self.fractions.first().copied()).unwrap_or(0.01)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        for &z in &self.fractions {
            check_fraction(z)?;
        }
        if self.groups == 0 {
            return Err(EvalError::InvalidGroups { groups: 0, nodes: 0 });
        }
        Ok(())
    }
}

fn check_fraction(z: f64) -> Result<(), EvalError> {
    if !(z > 0.0 && z < 1.0) {
        return Err(EvalError::InvalidFraction(z));
    }
    Ok(())
}

/// Number of top nodes, `floor(z N)`.
pub fn top_count(z: f64, nodes: usize) -> Result<usize, EvalError> {
    check_fraction(z)?;
    match floor_fraction(z, nodes) {
        0 => Err(EvalError::EmptyTop { z, nodes }),
        k => Ok(k),
    }
}

/// The first `floor(z N)` entries of the ranking.
pub fn top_fraction(scores: &ScoreVector, z: f64) -> Result<&[u32], EvalError> {
    let k = top_count(z, scores.len())?;
    Ok(&scores.ranking()[..k])
}

fn top_mask(scores: &ScoreVector, z: f64) -> Result<Vec<bool>, EvalError> {
    let mut mask = alloc::vec![false; scores.len()];
    for &i in top_fraction(scores, z)? {
        mask[i as usize] = true;
    }
    Ok(mask)
}

fn check_seminal(scores: &ScoreVector, seminal: &SeminalSet) -> Result<(), EvalError> {
    if seminal.is_empty() {
        return Err(EvalError::EmptySeminal);
    }
    if let Some(&last) = seminal.nodes().last() {
        if last >= scores.len() {
            return Err(EvalError::LengthMismatch { expected: last + 1, got: scores.len() });
        }
    }
    Ok(())
}

/// Share of seminal nodes in the top `z` fraction.
pub fn identification_rate(scores: &ScoreVector, seminal: &SeminalSet, z: f64) -> Result<f64, EvalError> {
    check_seminal(scores, seminal)?;
    let mask = top_mask(scores, z)?;
    let hits = seminal.nodes().iter().filter(|&&s| mask[s]).count();
    Ok(hits as f64 / seminal.len() as f64)
}

/// Penalty weight `min(1, N_U / N_z(g))` of every age group for a given top
/// set.
pub(crate) fn group_weights(top: &[u32], grouping: &AgeGrouping) -> Vec<f64> {
    let hist = grouping.histogram(top.iter().map(|&i| i as usize));
    let expected = top.len() as f64 / grouping.groups() as f64;
    hist.iter().map(|&c| if (c as f64) > expected { expected / c as f64 } else { 1.0 }).collect()
}

/// IR in which each identified seminal node counts `min(1, N_U / N_z(g))`
/// for its age group `g`.
pub fn normalized_identification_rate(
    scores: &ScoreVector,
    seminal: &SeminalSet,
    grouping: &AgeGrouping,
    z: f64,
) -> Result<f64, EvalError> {
    check_seminal(scores, seminal)?;
    grouping.check_len(scores.len())?;
    let top = top_fraction(scores, z)?;
    let weights = group_weights(top, grouping);
    let mask = top_mask(scores, z)?;
    let total = seminal.nodes().iter().filter(|&&s| mask[s]).fold(0.0, |acc, &s| acc + weights[grouping.group_of(s)]);
    Ok(total / seminal.len() as f64)
}
