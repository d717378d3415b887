//! Node-ranking metrics for time-stamped citation networks, age-bias
//! rescaling, and seminal-node evaluation that penalizes age-biased rankings.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command-line front end live in the `citeval` crate.
//!
//! # Layout
//!
//! - [`network`]: the immutable [`CitationNetwork`], ingestion from parsed
//!   rows, calendar snapshots and descriptive statistics.
//! - [`metrics`]: citation count, PageRank, CiteRank, LeaderRank, h-index,
//!   collective influence, semi-local centrality, HITS, yearly citation
//!   percentile and the age baseline, each producing a [`ScoreVector`].
//! - [`rescale`]: moving-window z-scores that remove age bias from any
//!   score vector.
//! - [`eval`]: identification rate, normalized identification rate, age
//!   curves, bias histograms with their null model, relative performance and
//!   Spearman similarity.
//! - [`synth`]: a seeded growing-network generator with aging, used as a
//!   desk-scale fixture.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod eval;
pub mod metrics;
pub mod network;
pub mod rescale;
pub mod synth;

mod numeric;

pub use eval::{AgeGrouping, BiasProfile, EvalConfig, EvalError};
pub use metrics::{Metric, MetricConfig, MetricError, MetricSpec, ScoreVector};
pub use network::{CitationNetwork, LoadSummary, NetworkBuilder, NetworkError, NodeRecord, SeminalSet};
pub use rescale::{RescaleConfig, RescaleError};
pub use synth::{SynthParams, SyntheticDataset};

/// Calendar date with day resolution.
pub use chrono::NaiveDate as Date;

/// Days per year used whenever durations are reported in years.
pub const DAYS_PER_YEAR: f64 = 365.25;
