use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{top_fraction, EvalError};
use crate::metrics::ScoreVector;

pub const DEFAULT_NULL_REPLICATES: usize = 1_000;

/// Partition of `N` date-ordered nodes into `G` consecutive groups of equal
/// size; the `N mod G` leftover nodes go one each to the oldest groups.
/// Group indices are 0-based here (group 0 is the oldest); reports print them
/// 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgeGrouping {
    nodes: usize,
    groups: usize,
}

impl AgeGrouping {
    pub fn new(nodes: usize, groups: usize) -> Result<Self, EvalError> {
        if groups == 0 || groups > nodes {
            return Err(EvalError::InvalidGroups { groups, nodes });
        }
        Ok(Self { nodes, groups })
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn group_size(&self, group: usize) -> usize {
        self.nodes / self.groups + usize::from(group < self.nodes % self.groups)
    }

    pub fn group_of(&self, node: usize) -> usize {
        debug_assert!(node < self.nodes);
        let base = self.nodes / self.groups;
        let rem = self.nodes % self.groups;
        let big = rem * (base + 1);
        if node < big {
            node / (base + 1)
        } else {
            rem + (node - big) / base
        }
    }

    pub fn histogram(&self, nodes: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut hist = alloc::vec![0; self.groups];
        for i in nodes {
            hist[self.group_of(i)] += 1;
        }
        hist
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<(), EvalError> {
        if len != self.nodes {
            return Err(EvalError::LengthMismatch { expected: self.nodes, got: len });
        }
        Ok(())
    }
}

/// Age composition of a ranking's top nodes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BiasProfile {
    /// `N_z(g)`, oldest group first.
    pub histogram: Vec<usize>,
    /// `N_U`: top count per group under an age-blind ranking.
    pub expected: f64,
    /// Standard deviation of the histogram around `N_U`.
    pub sigma: f64,
    /// The same quantity averaged over random top sets.
    pub sigma0: f64,
}

impl BiasProfile {
    /// `sigma / sigma0`; about 1 for an unbiased ranking.
    pub fn ratio(&self) -> f64 {
        if self.sigma == 0.0 {
            0.0
        } else {
            self.sigma / self.sigma0
        }
    }
}

fn histogram_sigma(hist: &[usize], expected: f64) -> f64 {
    let ss: f64 = hist.iter().map(|&c| (c as f64 - expected) * (c as f64 - expected)).sum();
    libm::sqrt(ss / hist.len() as f64)
}

/// Bias profile of the top `z` fraction against a precomputed null `sigma0`
/// (see [`null_sigma`]).
pub fn bias_profile(
    scores: &ScoreVector,
    grouping: &AgeGrouping,
    z: f64,
    sigma0: f64,
) -> Result<BiasProfile, EvalError> {
    grouping.check_len(scores.len())?;
    let top = top_fraction(scores, z)?;
    let histogram = grouping.histogram(top.iter().map(|&i| i as usize));
    let expected = top.len() as f64 / grouping.groups() as f64;
    let sigma = histogram_sigma(&histogram, expected);
    Ok(BiasProfile { histogram, expected, sigma, sigma0 })
}

/// Mean histogram standard deviation when `top` distinct nodes are drawn
/// uniformly at random (without replacement) from the grouped population.
pub fn null_sigma(grouping: &AgeGrouping, top: usize, replicates: usize, seed: u64) -> f64 {
    if replicates == 0 || top == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expected = top as f64 / grouping.groups() as f64;
    let top = top.min(grouping.nodes());
    let total: f64 = (0..replicates)
        .map(|_| {
            let sample = rand::seq::index::sample(&mut rng, grouping.nodes(), top);
            histogram_sigma(&grouping.histogram(sample.iter()), expected)
        })
        .sum();
    total / replicates as f64
}

/// Binomial approximation `sqrt(n p (1 - p))` with `p = 1 / G`.
pub fn analytic_null_sigma(top: usize, groups: usize) -> f64 {
    let p = 1.0 / groups as f64;
    libm::sqrt(top as f64 * p * (1.0 - p))
}
