//! Seeded generator of growing citation networks with preferential
//! attachment, aging and node quality, plus a planted seminal set.
//!
//! Nodes arrive over a number of calendar years, with the yearly count
//! multiplied by a constant growth factor. Each newcomer cites earlier nodes
//! chosen without replacement with probability proportional to
//!
//! ```text
//! (indegree + offset) * quality * exp(-age / aging)
//! ```
//!
//! The aging factor of a candidate `j` at time `t` splits into
//! `exp(-t / aging) * exp(t_j / aging)`, and the first factor is shared by all
//! candidates, so per-node weights only change when a node gains a citation.
//! That makes a Fenwick tree over the weights sufficient for sampling.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{Datelike, Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use thiserror::Error;

use crate::network::{CitationNetwork, NetworkBuilder, NodeRecord, SeminalSet};
use crate::DAYS_PER_YEAR;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid synthetic parameter: {0}")]
    InvalidParameter(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthParams {
    pub nodes: usize,
    pub start_year: i32,
    pub years: u32,
    /// Ratio between consecutive yearly arrival counts.
    pub growth: f64,
    /// Added to the indegree in the attachment kernel.
    pub attachment_offset: f64,
    /// References made by every node (fewer while the network is small).
    pub references: usize,
    /// Aging timescale of the attachment kernel, in days.
    pub aging_days: f64,
    /// Log-normal spread of node quality.
    pub quality_sigma: f64,
    pub seed: u64,
    /// Size of the planted seminal set.
    pub seminal: usize,
    /// Fraction of highest-quality nodes eligible to be seminal.
    pub seminal_pool: f64,
    /// Exponent `s` of the age preference `(1 - u)^s`, `u` being the node's
    /// position in age order scaled to `[0, 1)`. Zero means no age
    /// preference.
    pub seminal_skew: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            nodes: 10_000,
            start_year: 1990,
            years: 20,
            growth: 1.15,
            attachment_offset: 1.0,
            references: 10,
            aging_days: 15.0 * DAYS_PER_YEAR,
            quality_sigma: 0.8,
            seed: 1,
            seminal: 20,
            seminal_pool: 0.05,
            seminal_skew: 0.0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.nodes == 0 {
            return Err(SynthError::InvalidParameter("nodes must be positive"));
        }
        if self.years == 0 {
            return Err(SynthError::InvalidParameter("years must be positive"));
        }
        if !(self.growth > 0.0) || !self.growth.is_finite() {
            return Err(SynthError::InvalidParameter("growth must be positive"));
        }
        if !(self.attachment_offset > 0.0) {
            return Err(SynthError::InvalidParameter("attachment offset must be positive"));
        }
        if self.references == 0 {
            return Err(SynthError::InvalidParameter("references must be positive"));
        }
        if !(self.aging_days > 0.0) {
            return Err(SynthError::InvalidParameter("aging timescale must be positive"));
        }
        if !(self.quality_sigma >= 0.0) {
            return Err(SynthError::InvalidParameter("quality spread must be non-negative"));
        }
        if self.seminal == 0 {
            return Err(SynthError::InvalidParameter("seminal set size must be positive"));
        }
        if !(self.seminal_pool > 0.0 && self.seminal_pool <= 1.0) {
            return Err(SynthError::InvalidParameter("seminal pool must lie in (0, 1]"));
        }
        if !(self.seminal_skew >= 0.0) {
            return Err(SynthError::InvalidParameter("seminal skew must be non-negative"));
        }
        NaiveDate::from_ymd_opt(self.start_year, 1, 1)
            .and_then(|_| NaiveDate::from_ymd_opt(self.start_year + self.years as i32, 1, 1))
            .ok_or(SynthError::InvalidParameter("year range out of bounds"))?;
        Ok(())
    }
}

/// Generated network with its planted ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub network: CitationNetwork,
    pub seminal: SeminalSet,
    /// Planted quality, aligned to network order.
    pub quality: Vec<f64>,
    /// Nodes that made fewer references than requested because too few
    /// earlier nodes existed.
    pub clamped_nodes: usize,
}

impl SyntheticDataset {
    pub fn node_records(&self) -> Vec<NodeRecord> {
        (0..self.network.len()).map(|i| NodeRecord::new(self.network.id(i), self.network.date(i))).collect()
    }
}

/// Fenwick tree of non-negative weights supporting prefix-sum search.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self { tree: alloc::vec![0.0; n + 1] }
    }

    fn add(&mut self, index: usize, delta: f64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn total(&self, len: usize) -> f64 {
        let mut i = len;
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    fn find(&self, mut target: f64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            if pos + step <= n && self.tree[pos + step] <= target {
                pos += step;
                target -= self.tree[pos];
            }
            step >>= 1;
        }
        pos
    }
}

/// Yearly arrival counts proportional to `growth^y`, summing to `nodes`.
fn yearly_counts(nodes: usize, years: u32, growth: f64) -> Vec<usize> {
    let weights: Vec<f64> = (0..years).map(|y| libm::pow(growth, y as f64)).collect();
    let total: f64 = weights.iter().sum();
    let mut cum = 0.0;
    let mut prev = 0usize;
    weights
        .iter()
        .enumerate()
        .map(|(y, w)| {
            cum += w;
            let bound = if y + 1 == years as usize { nodes } else { libm::round(nodes as f64 * cum / total) as usize };
            let bound = bound.clamp(prev, nodes);
            let count = bound - prev;
            prev = bound;
            count
        })
        .collect()
}

/// Days since the start of generation, for every node in arrival order.
fn arrival_days(params: &SynthParams, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let start = NaiveDate::from_ymd_opt(params.start_year, 1, 1).expect("validated");
    let mut days = Vec::with_capacity(params.nodes);
    for (y, count) in yearly_counts(params.nodes, params.years, params.growth).into_iter().enumerate() {
        let year_start = NaiveDate::from_ymd_opt(params.start_year + y as i32, 1, 1).expect("validated");
        let offset = (year_start - start).num_days() as u32;
        let len = if year_start.leap_year() { 366 } else { 365 };
        let mut block: Vec<u32> = (0..count).map(|_| offset + rng.random_range(0..len)).collect();
        block.sort_unstable();
        days.extend(block);
    }
    days
}

pub fn generate_synthetic(params: &SynthParams) -> Result<SyntheticDataset, SynthError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.nodes;
    let days = arrival_days(params, &mut rng);
    let lognormal =
        LogNormal::new(0.0, params.quality_sigma).map_err(|_| SynthError::InvalidParameter("quality spread"))?;
    let quality: Vec<f64> = (0..n).map(|_| lognormal.sample(&mut rng)).collect();

    let aging = params.aging_days;
    let mut base_day = 0.0f64;
    let mut indegree = alloc::vec![0u32; n];
    let mut weight = alloc::vec![0.0f64; n];
    let mut tree = Fenwick::new(n);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * params.references);
    let mut picked: Vec<usize> = Vec::with_capacity(params.references);
    let mut clamped_nodes = 0;
    let node_weight = |j: usize, k: u32, base: f64| {
        (k as f64 + params.attachment_offset) * quality[j] * libm::exp((days[j] as f64 - base) / aging)
    };

    for i in 0..n {
        let now = days[i] as f64;
        // Keep exp((t_j - base) / aging) representable.
        if (now - base_day) / aging > 300.0 {
            base_day = now;
            tree = Fenwick::new(n);
            for j in 0..i {
                weight[j] = node_weight(j, indegree[j], base_day);
                tree.add(j, weight[j]);
            }
        }
        let wanted = params.references.min(i);
        if wanted < params.references {
            clamped_nodes += 1;
        }
        picked.clear();
        let mut attempts = 0;
        while picked.len() < wanted {
            let total = tree.total(i);
            let j = if total > 0.0 && attempts < 64 {
                tree.find(rng.random::<f64>() * total).min(i - 1)
            } else {
                // Rounding left no usable mass: take the first unpicked node.
                (0..i).find(|j| !picked.contains(j)).expect("wanted <= i")
            };
            attempts += 1;
            if picked.contains(&j) {
                continue;
            }
            tree.add(j, -weight[j]);
            picked.push(j);
        }
        for &j in &picked {
            indegree[j] += 1;
            weight[j] = node_weight(j, indegree[j], base_day);
            tree.add(j, weight[j]);
            edges.push((i, j));
        }
        weight[i] = node_weight(i, 0, base_day);
        tree.add(i, weight[i]);
    }
    if clamped_nodes > 0 {
        log::warn!("{clamped_nodes} early nodes made fewer than {} references", params.references);
    }

    let start = NaiveDate::from_ymd_opt(params.start_year, 1, 1).expect("validated");
    let width = format!("{}", n.saturating_sub(1)).len();
    let records: Vec<NodeRecord> = (0..n)
        .map(|i| {
            let id: String = format!("n{i:0width$}");
            NodeRecord::new(id, start + Days::new(days[i] as u64))
        })
        .collect();
    let mut builder = NetworkBuilder::from_nodes(records).expect("ids are unique");
    for (from, to) in edges {
        builder.add_edge_index(from, to);
    }
    let (network, _) = builder.finish();
    let seminal = plant_seminal(params, &quality, &mut rng);
    Ok(SyntheticDataset { network, seminal, quality, clamped_nodes })
}

/// Weighted sampling without replacement (exponential keys) of seminal
/// nodes from the top-quality pool, weighted by `(1 - u)^skew`.
fn plant_seminal(params: &SynthParams, quality: &[f64], rng: &mut ChaCha8Rng) -> SeminalSet {
    let n = quality.len();
    let pool_size = (libm::ceil(params.seminal_pool * n as f64) as usize).clamp(1, n);
    let mut by_quality: Vec<usize> = (0..n).collect();
    by_quality.sort_by(|&a, &b| quality[b].total_cmp(&quality[a]).then(a.cmp(&b)));
    let pool = &by_quality[..pool_size];
    let wanted = params.seminal.min(pool_size);
    if wanted < params.seminal {
        log::warn!("seminal set clamped to the {pool_size}-node quality pool");
    }
    let mut keyed: Vec<(f64, usize)> = pool
        .iter()
        .map(|&i| {
            let u = i as f64 / n as f64;
            let w = libm::pow(1.0 - u, params.seminal_skew);
            let draw: f64 = rng.random::<f64>();
            let key = if w > 0.0 { libm::log(1.0 - draw) / w } else { f64::NEG_INFINITY };
            (key, i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    SeminalSet::from_indices(keyed.into_iter().take(wanted).map(|(_, i)| i).collect())
}

/// Share of seminal nodes in each of `groups` equal age groups.
pub fn seminal_age_histogram(net: &CitationNetwork, seminal: &SeminalSet, groups: usize) -> Option<Vec<usize>> {
    let grouping = crate::eval::AgeGrouping::new(net.len(), groups).ok()?;
    Some(grouping.histogram(seminal.nodes().iter().copied()))
}

/// Year of the first and last node.
pub fn year_span(net: &CitationNetwork) -> (i32, i32) {
    (net.first_date().year(), net.as_of().year())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SynthParams {
        SynthParams { nodes: 3_000, years: 10, seed, seminal: 30, ..Default::default() }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = generate_synthetic(&small(1)).unwrap();
        let b = generate_synthetic(&small(1)).unwrap();
        assert_eq!(a.network, b.network);
        assert_eq!(a.seminal, b.seminal);
        assert_eq!(a.quality, b.quality);
        let c = generate_synthetic(&small(2)).unwrap();
        assert_ne!(a.network, c.network);
    }

    #[test]
    fn shape_of_output() {
        let p = small(3);
        let d = generate_synthetic(&p).unwrap();
        let net = &d.network;
        assert_eq!(net.len(), 3_000);
        // Only the first ten nodes cannot make all ten references.
        assert_eq!(d.clamped_nodes, 10);
        assert_eq!(net.edge_count(), 10 * (3_000 - 10) + (0..10).sum::<usize>());
        assert_eq!(d.seminal.len(), 30);
        assert_eq!(year_span(net), (1990, 1999));
        // Edges go from newer to older nodes.
        assert!(net.edges().all(|(i, j)| j < i));
        assert_eq!(net.predating_citations(), 0);
    }

    #[test]
    fn arrivals_accelerate() {
        let counts = yearly_counts(10_000, 20, 1.15);
        assert_eq!(counts.iter().sum::<usize>(), 10_000);
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(yearly_counts(5, 3, 1.0).iter().sum::<usize>(), 5);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(generate_synthetic(&SynthParams { nodes: 0, ..Default::default() }).is_err());
        assert!(generate_synthetic(&SynthParams { growth: 0.0, ..Default::default() }).is_err());
        assert!(generate_synthetic(&SynthParams { seminal_pool: 1.5, ..Default::default() }).is_err());
    }

    #[test]
    fn unskewed_seminal_is_uniform_over_pool() {
        // Chi-square goodness of fit on 40 age groups against the pool's own
        // age distribution; 62.43 is the 1% critical value at 39 d.o.f.
        let p = SynthParams { nodes: 20_000, seminal: 2_000, seminal_pool: 0.5, seed: 11, ..Default::default() };
        let d = generate_synthetic(&p).unwrap();
        let n = d.network.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d.quality[b].total_cmp(&d.quality[a]));
        let pool = &order[..n / 2];
        let grouping = crate::eval::AgeGrouping::new(n, 40).unwrap();
        let pool_hist = grouping.histogram(pool.iter().copied());
        let hist = seminal_age_histogram(&d.network, &d.seminal, 40).unwrap();
        assert!(d.seminal.nodes().iter().all(|s| pool.contains(s)));
        let chi2: f64 = hist
            .iter()
            .zip(&pool_hist)
            .map(|(&o, &c)| {
                let e = 2_000.0 * c as f64 / pool.len() as f64;
                (o as f64 - e) * (o as f64 - e) / e
            })
            .sum();
        assert!(chi2 < 62.43, "chi2 = {chi2}");
    }

    #[test]
    fn strong_skew_concentrates_in_oldest_group() {
        let p = SynthParams { nodes: 20_000, seminal: 20, seminal_skew: 200.0, seed: 4, ..Default::default() };
        let d = generate_synthetic(&p).unwrap();
        let hist = seminal_age_histogram(&d.network, &d.seminal, 40).unwrap();
        assert!(hist[0] * 10 >= 7 * d.seminal.len(), "{hist:?}");
    }

    #[test]
    fn fenwick_search() {
        let mut f = Fenwick::new(5);
        for (i, w) in [1.0, 0.0, 2.0, 3.0, 0.5].iter().enumerate() {
            f.add(i, *w);
        }
        assert_eq!(f.total(5), 6.5);
        assert_eq!(f.find(0.5), 0);
        assert_eq!(f.find(1.0), 2);
        assert_eq!(f.find(2.99), 2);
        assert_eq!(f.find(3.0), 3);
        assert_eq!(f.find(6.2), 4);
    }
}
