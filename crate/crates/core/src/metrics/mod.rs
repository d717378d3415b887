//! Node-ranking metrics.
//!
//! Every metric maps a [`CitationNetwork`] to a [`ScoreVector`]: one score per
//! node in network order together with a deterministic ranking. Ties are
//! broken by age (older first), which in network order is simply the lower
//! node index.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::network::CitationNetwork;
use crate::numeric::cmp_desc;
use crate::rescale::{self, RescaleConfig, RescaleError};
use crate::DAYS_PER_YEAR;

mod counts;
mod hits;
mod leaderrank;
mod neighborhood;
mod pagerank;

pub use counts::{age_rank, citation_count, h_index, yccp};
pub use hits::{hits, hits_observed, HitsScores};
pub use leaderrank::leaderrank;
pub use neighborhood::{collective_influence, semi_local_centrality};
pub use pagerank::{citerank, pagerank, recent_indegree_gain, tune_citerank, CiteRankTuning};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("invalid metric configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("{metric} did not converge within {iterations} iterations (residual {residual:e})")]
    NotConverged { metric: &'static str, iterations: usize, residual: f64 },
    #[error("{0} needs a non-empty network")]
    EmptyNetwork(&'static str),
    #[error("{0} needs at least one edge")]
    NoEdges(&'static str),
    #[error("CiteRank tuning target is degenerate: no node gained citations in the recent window")]
    DegenerateTuning,
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("metric `{0}` has no rescaled variant")]
    NotRescalable(String),
    #[error(transparent)]
    Rescale(#[from] RescaleError),
}

impl MetricError {
    /// Errors caused by the input being too small or edgeless rather than by
    /// the numerics.
    pub fn is_degenerate_input(&self) -> bool {
        matches!(
            self,
            MetricError::EmptyNetwork(_)
                | MetricError::NoEdges(_)
                | MetricError::Rescale(RescaleError::WindowTooLarge { .. })
        )
    }
}

/// Scores of one metric over a network, plus the induced ranking.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoreVector {
    label: String,
    scores: Vec<f64>,
    ranking: Vec<u32>,
    iterations: Option<usize>,
}

impl ScoreVector {
    /// Wraps raw scores (aligned to network order) and ranks them: score
    /// descending, then older node first.
    pub fn new(label: impl Into<String>, scores: Vec<f64>) -> Self {
        let mut ranking: Vec<u32> = (0..scores.len() as u32).collect();
        // Stable sort keeps index order (date, then id) among equal scores.
        ranking.sort_by(|&a, &b| cmp_desc(scores[a as usize], scores[b as usize]));
        Self { label: label.into(), scores, ranking, iterations: None }
    }

    pub(crate) fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = Some(iterations);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Node indices, best first.
    pub fn ranking(&self) -> &[u32] {
        &self.ranking
    }

    /// Solver iterations for iterative metrics.
    pub fn iterations(&self) -> Option<usize> {
        self.iterations
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// 1-based rank position of every node.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = alloc::vec![0; self.ranking.len()];
        for (r, &node) in self.ranking.iter().enumerate() {
            pos[node as usize] = r + 1;
        }
        pos
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Parameters shared by the metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricConfig {
    /// Damping factor of PageRank and CiteRank.
    pub damping: f64,
    /// CiteRank recency timescale, in days.
    pub tau_days: f64,
    /// Stop when the mean absolute score change drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Collective influence level.
    pub ci_level: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self { damping: 0.5, tau_days: 2.6 * DAYS_PER_YEAR, tolerance: 1e-9, max_iterations: 10_000, ci_level: 2 }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(MetricError::InvalidConfig("damping must lie in (0, 1)"));
        }
        if !(self.tau_days > 0.0) || !self.tau_days.is_finite() {
            return Err(MetricError::InvalidConfig("CiteRank timescale must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(MetricError::InvalidConfig("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(MetricError::InvalidConfig("max_iterations must be positive"));
        }
        if self.ci_level == 0 {
            return Err(MetricError::InvalidConfig("collective influence level must be at least 1"));
        }
        Ok(())
    }
}

/// The registered base metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    CitationCount,
    PageRank,
    CiteRank,
    LeaderRank,
    HIndex,
    CollectiveInfluence,
    SemiLocalCentrality,
    Hits,
    Yccp,
    AgeRank,
}

impl Metric {
    pub const ALL: [Metric; 10] = [
        Metric::CitationCount,
        Metric::PageRank,
        Metric::CiteRank,
        Metric::LeaderRank,
        Metric::HIndex,
        Metric::CollectiveInfluence,
        Metric::SemiLocalCentrality,
        Metric::Hits,
        Metric::Yccp,
        Metric::AgeRank,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Metric::CitationCount => "C",
            Metric::PageRank => "P",
            Metric::CiteRank => "T",
            Metric::LeaderRank => "L",
            Metric::HIndex => "H",
            Metric::CollectiveInfluence => "CI",
            Metric::SemiLocalCentrality => "SLC",
            Metric::Hits => "HITS",
            Metric::Yccp => "YCCP",
            Metric::AgeRank => "AgeR",
        }
    }

    /// YCCP already compares nodes within their year and AgeR is pure age,
    /// so neither has a rescaled variant.
    pub fn rescalable(self) -> bool {
        !matches!(self, Metric::Yccp | Metric::AgeRank)
    }

    /// AgeR ignores the network structure.
    pub fn is_structural(self) -> bool {
        self != Metric::AgeRank
    }

    pub fn compute(self, net: &CitationNetwork, cfg: &MetricConfig) -> Result<ScoreVector, MetricError> {
        match self {
            Metric::CitationCount => Ok(citation_count(net)),
            Metric::PageRank => pagerank(net, cfg),
            Metric::CiteRank => citerank(net, cfg),
            Metric::LeaderRank => leaderrank(net, cfg),
            Metric::HIndex => Ok(h_index(net)),
            Metric::CollectiveInfluence => collective_influence(net, cfg),
            Metric::SemiLocalCentrality => Ok(semi_local_centrality(net)),
            Metric::Hits => hits(net, cfg).map(|h| h.authority),
            Metric::Yccp => Ok(yccp(net)),
            Metric::AgeRank => Ok(age_rank(net)),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Metric {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL.into_iter().find(|m| m.label() == s).ok_or_else(|| MetricError::UnknownMetric(s.to_string()))
    }
}

/// A base metric, optionally age-rescaled (`RP`, `RC`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetricSpec {
    pub metric: Metric,
    pub rescaled: bool,
}

impl MetricSpec {
    pub fn plain(metric: Metric) -> Self {
        Self { metric, rescaled: false }
    }

    pub fn rescaled(metric: Metric) -> Result<Self, MetricError> {
        if !metric.rescalable() {
            let mut label = String::from("R");
            label.push_str(metric.label());
            return Err(MetricError::NotRescalable(label));
        }
        Ok(Self { metric, rescaled: true })
    }

    /// The nine base metrics, their eight rescaled variants and AgeR.
    pub fn all() -> Vec<MetricSpec> {
        let mut specs: Vec<MetricSpec> = Metric::ALL.iter().map(|&m| Self::plain(m)).collect();
        specs.extend(Metric::ALL.iter().filter(|m| m.rescalable()).map(|&m| Self { metric: m, rescaled: true }));
        specs
    }

    pub fn label(&self) -> String {
        let mut s = String::new();
        if self.rescaled {
            s.push('R');
        }
        s.push_str(self.metric.label());
        s
    }

    /// Computes the base metric and, for rescaled specs, its rescaling.
    /// Returns `(base, rescaled)`.
    pub fn compute(
        &self,
        net: &CitationNetwork,
        cfg: &MetricConfig,
        window: &RescaleConfig,
    ) -> Result<(ScoreVector, Option<ScoreVector>), MetricError> {
        let base = self.metric.compute(net, cfg)?;
        if !self.rescaled {
            return Ok((base, None));
        }
        let rescaled = rescale::rescale(&base, net, window)?;
        Ok((base, Some(rescaled)))
    }

    /// The score vector this spec stands for.
    pub fn scores(
        &self,
        net: &CitationNetwork,
        cfg: &MetricConfig,
        window: &RescaleConfig,
    ) -> Result<ScoreVector, MetricError> {
        let (base, rescaled) = self.compute(net, cfg, window)?;
        Ok(rescaled.unwrap_or(base))
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for MetricSpec {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(metric) = s.parse::<Metric>() {
            return Ok(Self::plain(metric));
        }
        match s.strip_prefix('R').map(str::parse::<Metric>) {
            Some(Ok(metric)) => Self::rescaled(metric),
            _ => Err(MetricError::UnknownMetric(s.to_string())),
        }
    }
}
