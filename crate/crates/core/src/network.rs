//! Time-stamped directed citation networks.
//!
//! Nodes are kept in a total order: by date, ties broken by id. Every node
//! index used elsewhere in the crate refers to this order, so index order is
//! age order (index 0 is the oldest node). A calendar snapshot of a network is
//! a prefix of that order and shares its node table, which keeps node indices
//! stable across snapshots.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

use crate::{Date, DAYS_PER_YEAR};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("network has no nodes")]
    Empty,
    #[error("cutoff {cutoff} precedes the first node date {first}")]
    CutoffBeforeFirstNode { cutoff: Date, first: Date },
    #[error("reference date {as_of} precedes the latest node date {latest}")]
    AsOfBeforeLatestNode { as_of: Date, latest: Date },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// One input node: an opaque identifier and its publication date.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeRecord {
    pub id: String,
    pub date: Date,
}

impl NodeRecord {
    pub fn new(id: impl Into<String>, date: Date) -> Self {
        Self { id: id.into(), date }
    }
}

#[derive(Debug)]
struct NodeTable {
    ids: Vec<String>,
    dates: Vec<Date>,
    index: BTreeMap<String, u32>,
}

/// Immutable citation network in compressed sparse form, with both the
/// reference lists (outgoing edges) and the citer lists (incoming edges).
///
/// Edge `i -> j` means node `i` cites node `j`.
#[derive(Debug, Clone)]
pub struct CitationNetwork {
    nodes: Arc<NodeTable>,
    len: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    as_of: Date,
}

impl PartialEq for CitationNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len
            && self.as_of == other.as_of
            && self.nodes.ids[..self.len] == other.nodes.ids[..other.len]
            && self.nodes.dates[..self.len] == other.nodes.dates[..other.len]
            && self.out_offsets == other.out_offsets
            && self.out_targets == other.out_targets
    }
}

/// Bookkeeping produced while ingesting edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LoadSummary {
    pub nodes: usize,
    pub edges: usize,
    /// Edge rows naming an id that is not a node.
    pub rejected_unknown: usize,
    /// Edge rows of the form `i -> i`.
    pub rejected_self: usize,
    /// Repeated edge rows.
    pub rejected_duplicate: usize,
    /// Accepted citations whose citing node is dated before the cited node.
    pub predating_citations: usize,
}

impl LoadSummary {
    pub fn rejected(&self) -> usize {
        self.rejected_unknown + self.rejected_self + self.rejected_duplicate
    }
}

/// What happened to a single edge row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOutcome {
    Accepted,
    UnknownEndpoint,
    SelfCitation,
}

/// Two-phase ingestion: nodes first (sorted and indexed immediately), then a
/// stream of edges resolved against them.
#[derive(Debug)]
pub struct NetworkBuilder {
    table: NodeTable,
    edges: Vec<(u32, u32)>,
    summary: LoadSummary,
    as_of: Date,
}

impl NetworkBuilder {
    /// Sorts the nodes by `(date, id)` and indexes them.
    pub fn from_nodes(mut nodes: Vec<NodeRecord>) -> Result<Self, NetworkError> {
        if nodes.is_empty() {
            return Err(NetworkError::Empty);
        }
        if nodes.len() > u32::MAX as usize {
            return Err(NetworkError::InvalidParameter("more than 2^32 - 1 nodes"));
        }
        nodes.sort_unstable_by(|a, b| a.date.cmp(&b.date).then_with(|| a.id.cmp(&b.id)));
        let mut index = BTreeMap::new();
        let mut ids = Vec::with_capacity(nodes.len());
        let mut dates = Vec::with_capacity(nodes.len());
        for (i, node) in nodes.into_iter().enumerate() {
            if index.insert(node.id.clone(), i as u32).is_some() {
                return Err(NetworkError::DuplicateNode(node.id));
            }
            ids.push(node.id);
            dates.push(node.date);
        }
        let as_of = *dates.last().expect("non-empty");
        Ok(Self { table: NodeTable { ids, dates, index }, edges: Vec::new(), summary: LoadSummary::default(), as_of })
    }

    /// Overrides the reference date (defaults to the latest node date).
    pub fn as_of(mut self, as_of: Date) -> Result<Self, NetworkError> {
        let latest = *self.table.dates.last().expect("non-empty");
        if as_of < latest {
            return Err(NetworkError::AsOfBeforeLatestNode { as_of, latest });
        }
        self.as_of = as_of;
        Ok(self)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.table.index.get(id).map(|&i| i as usize)
    }

    pub fn len(&self) -> usize {
        self.table.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.ids.is_empty()
    }

    pub fn add_edge(&mut self, citing: &str, cited: &str) -> EdgeOutcome {
        match (self.index_of(citing), self.index_of(cited)) {
            (Some(from), Some(to)) => self.add_edge_index(from, to),
            _ => {
                self.summary.rejected_unknown += 1;
                EdgeOutcome::UnknownEndpoint
            }
        }
    }

    /// Adds an edge by sorted node index (see [`NetworkBuilder::index_of`]).
    pub fn add_edge_index(&mut self, citing: usize, cited: usize) -> EdgeOutcome {
        let n = self.len();
        if citing >= n || cited >= n {
            self.summary.rejected_unknown += 1;
            return EdgeOutcome::UnknownEndpoint;
        }
        if citing == cited {
            self.summary.rejected_self += 1;
            return EdgeOutcome::SelfCitation;
        }
        self.edges.push((citing as u32, cited as u32));
        EdgeOutcome::Accepted
    }

    pub fn finish(mut self) -> (CitationNetwork, LoadSummary) {
        let n = self.table.ids.len();
        let before = self.edges.len();
        self.edges.sort_unstable();
        self.edges.dedup();
        self.summary.rejected_duplicate += before - self.edges.len();
        let dates = &self.table.dates;
        self.summary.predating_citations =
            self.edges.iter().filter(|&&(from, to)| dates[from as usize] < dates[to as usize]).count();
        let (out_offsets, out_targets, in_offsets, in_sources) = build_csr(n, &self.edges);
        self.summary.nodes = n;
        self.summary.edges = self.edges.len();
        let net = CitationNetwork {
            nodes: Arc::new(self.table),
            len: n,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            as_of: self.as_of,
        };
        (net, self.summary)
    }
}

/// Builds both adjacency directions from edges sorted by `(citing, cited)`.
fn build_csr(n: usize, edges: &[(u32, u32)]) -> (Vec<usize>, Vec<u32>, Vec<usize>, Vec<u32>) {
    let mut out_offsets = alloc::vec![0usize; n + 1];
    let mut in_offsets = alloc::vec![0usize; n + 1];
    for &(from, to) in edges {
        out_offsets[from as usize + 1] += 1;
        in_offsets[to as usize + 1] += 1;
    }
    for i in 0..n {
        out_offsets[i + 1] += out_offsets[i];
        in_offsets[i + 1] += in_offsets[i];
    }
    let out_targets: Vec<u32> = edges.iter().map(|&(_, to)| to).collect();
    let mut in_sources = alloc::vec![0u32; edges.len()];
    let mut cursor = in_offsets.clone();
    // Sorted by citing node, so each citer list comes out ascending.
    for &(from, to) in edges {
        let slot = &mut cursor[to as usize];
        in_sources[*slot] = from;
        *slot += 1;
    }
    (out_offsets, out_targets, in_offsets, in_sources)
}

impl CitationNetwork {
    /// Convenience constructor for in-memory data; edges are given as
    /// `(citing id, cited id)` pairs and go through the same checks as
    /// file ingestion.
    pub fn from_records<'a, I>(nodes: Vec<NodeRecord>, edges: I) -> Result<(Self, LoadSummary), NetworkError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut builder = NetworkBuilder::from_nodes(nodes)?;
        for (citing, cited) in edges {
            builder.add_edge(citing, cited);
        }
        Ok(builder.finish())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Reference date `t` at which time-aware metrics are evaluated.
    pub fn as_of(&self) -> Date {
        self.as_of
    }

    pub fn id(&self, node: usize) -> &str {
        assert!(node < self.len, "node index out of range");
        &self.nodes.ids[node]
    }

    pub fn date(&self, node: usize) -> Date {
        assert!(node < self.len, "node index out of range");
        self.nodes.dates[node]
    }

    pub fn ids(&self) -> &[String] {
        &self.nodes.ids[..self.len]
    }

    pub fn dates(&self) -> &[Date] {
        &self.nodes.dates[..self.len]
    }

    pub fn first_date(&self) -> Date {
        self.nodes.dates[0]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.index.get(id).map(|&i| i as usize).filter(|&i| i < self.len)
    }

    /// Nodes cited by `node`, ascending by index.
    pub fn references(&self, node: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[node]..self.out_offsets[node + 1]]
    }

    /// Nodes citing `node`, ascending by index.
    pub fn citers(&self, node: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    pub fn indegree(&self, node: usize) -> usize {
        self.in_offsets[node + 1] - self.in_offsets[node]
    }

    pub fn outdegree(&self, node: usize) -> usize {
        self.out_offsets[node + 1] - self.out_offsets[node]
    }

    pub fn indegrees(&self) -> Vec<usize> {
        (0..self.len).map(|i| self.indegree(i)).collect()
    }

    /// All edges as `(citing, cited)` index pairs, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len).flat_map(move |i| self.references(i).iter().map(move |&j| (i, j as usize)))
    }

    /// Accepted citations whose citing node predates the cited node.
    pub fn predating_citations(&self) -> usize {
        let dates = self.dates();
        self.edges().filter(|&(i, j)| dates[i] < dates[j]).count()
    }

    /// The network as it looked at the end of `cutoff`: nodes dated on or
    /// before the cutoff and the edges among them. The reference date becomes
    /// `min(cutoff, self.as_of())`, so snapshots compose.
    pub fn snapshot(&self, cutoff: Date) -> Result<Self, NetworkError> {
        let first = self.first_date();
        if cutoff < first {
            return Err(NetworkError::CutoffBeforeFirstNode { cutoff, first });
        }
        let keep = self.dates().partition_point(|&d| d <= cutoff);
        let bound = keep as u32;
        let mut out_offsets = Vec::with_capacity(keep + 1);
        let mut out_targets = Vec::new();
        out_offsets.push(0);
        let mut in_offsets = Vec::with_capacity(keep + 1);
        let mut in_sources = Vec::new();
        in_offsets.push(0);
        for i in 0..keep {
            let refs = self.references(i);
            out_targets.extend_from_slice(&refs[..refs.partition_point(|&j| j < bound)]);
            out_offsets.push(out_targets.len());
            let cit = self.citers(i);
            in_sources.extend_from_slice(&cit[..cit.partition_point(|&j| j < bound)]);
            in_offsets.push(in_sources.len());
        }
        Ok(Self {
            nodes: Arc::clone(&self.nodes),
            len: keep,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            as_of: cutoff.min(self.as_of),
        })
    }

    /// Snapshot cutoffs at every December 31 between the first node's year
    /// and the reference date (inclusive), followed by the reference date
    /// itself when it is not a year end.
    pub fn yearly_cutoffs(&self) -> Vec<Date> {
        let mut cutoffs = Vec::new();
        for year in self.first_date().year()..=self.as_of.year() {
            let end = year_end(year);
            if end <= self.as_of {
                cutoffs.push(end);
            }
        }
        if cutoffs.last() != Some(&self.as_of) {
            cutoffs.push(self.as_of);
        }
        cutoffs
    }

    /// Year-end snapshots only (no trailing partial year).
    pub fn year_end_cutoffs(&self) -> Vec<Date> {
        self.yearly_cutoffs().into_iter().filter(|d| d.month() == 12 && d.day() == 31).collect()
    }

    pub fn yearly_snapshots(&self) -> Result<Vec<(Date, Self)>, NetworkError> {
        self.yearly_cutoffs().into_iter().map(|d| Ok((d, self.snapshot(d)?))).collect()
    }

    /// Time each node needed to collect its first `k` citations. The
    /// citation time is the citing node's date; a citation dated before its
    /// target counts as zero delay.
    pub fn time_to_k_citations(&self, k: usize, subset: Option<&SeminalSet>) -> Result<CitationDelays, NetworkError> {
        if k == 0 {
            return Err(NetworkError::InvalidParameter("k must be at least 1"));
        }
        let dates = self.dates();
        let measure = |node: usize| -> Option<(usize, i64)> {
            let citers = self.citers(node);
            if citers.len() < k {
                return None;
            }
            let mut times: Vec<Date> = citers.iter().map(|&c| dates[c as usize]).collect();
            let (_, kth, _) = times.select_nth_unstable(k - 1);
            Some((node, (*kth - dates[node]).num_days().max(0)))
        };
        let per_node: Vec<(usize, i64)> = match subset {
            Some(set) => set.nodes().iter().filter(|&&i| i < self.len).filter_map(|&i| measure(i)).collect(),
            None => (0..self.len).filter_map(measure).collect(),
        };
        Ok(CitationDelays { per_node })
    }

    /// Median indegree over all nodes or over a subset.
    pub fn median_indegree(&self, subset: Option<&SeminalSet>) -> Option<f64> {
        let mut degrees: Vec<usize> = match subset {
            Some(set) => set.nodes().iter().filter(|&&i| i < self.len).map(|&i| self.indegree(i)).collect(),
            None => self.indegrees(),
        };
        if degrees.is_empty() {
            return None;
        }
        degrees.sort_unstable();
        let mid = degrees.len() / 2;
        Some(if degrees.len() % 2 == 1 { degrees[mid] as f64 } else { (degrees[mid - 1] + degrees[mid]) as f64 / 2.0 })
    }
}

pub(crate) fn year_end(year: i32) -> Date {
    NaiveDate::from_ymd_opt(year, 12, 31).expect("valid year")
}

/// Delays until the k-th citation, in days, for every qualifying node.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationDelays {
    pub per_node: Vec<(usize, i64)>,
}

impl CitationDelays {
    /// Mean delay in years, absent when no node qualified.
    pub fn mean_years(&self) -> Option<f64> {
        if self.per_node.is_empty() {
            return None;
        }
        let total: i64 = self.per_node.iter().map(|&(_, d)| d).sum();
        Some(total as f64 / self.per_node.len() as f64 / DAYS_PER_YEAR)
    }
}

/// Expert-selected target nodes, stored as sorted node indices of the
/// network they were resolved against (valid for all its snapshots).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeminalSet {
    nodes: Vec<usize>,
}

impl SeminalSet {
    /// Resolves ids against `net`. Returns the set and the ids that did not
    /// resolve, in input order.
    pub fn resolve<'a, I>(net: &CitationNetwork, ids: I) -> (Self, Vec<String>)
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut nodes = Vec::new();
        let mut missing = Vec::new();
        for id in ids {
            match net.index_of(id) {
                Some(i) => nodes.push(i),
                None => missing.push(String::from(id)),
            }
        }
        (Self::from_indices(nodes), missing)
    }

    pub fn from_indices(mut nodes: Vec<usize>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        Self { nodes }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }
}
