//! Metric computation for a network: base metrics in parallel on a fixed
//! worker pool, then their rescaled variants.

use std::collections::BTreeMap;
use std::time::Instant;

use citeval_core::metrics::{tune_citerank, CiteRankTuning};
use citeval_core::rescale::{self, default_window, fit_window};
use citeval_core::{
    CitationNetwork, Metric, MetricConfig, MetricError, MetricSpec, RescaleConfig, RescaleError, ScoreVector,
    DAYS_PER_YEAR,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Per-metric record kept in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRun {
    pub label: String,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    NotConverged,
    Failed(String),
}

/// Everything computed for one network.
#[derive(Debug)]
pub struct Computation {
    /// Base vectors followed by rescaled ones, each base listed once, in
    /// the order the specs ask for them.
    pub vectors: Vec<ScoreVector>,
    pub runs: Vec<MetricRun>,
    pub window: Option<usize>,
}

impl Computation {
    pub fn get(&self, label: &str) -> Option<&ScoreVector> {
        self.vectors.iter().find(|v| v.label() == label)
    }

    /// The vectors of `specs`, in order.
    pub fn select(&self, specs: &[MetricSpec]) -> Vec<ScoreVector> {
        specs.iter().filter_map(|s| self.get(&s.label()).cloned()).collect()
    }
}

pub struct Pipeline {
    specs: Vec<MetricSpec>,
    configs: BTreeMap<Metric, MetricConfig>,
    window: Option<usize>,
    pool: rayon::ThreadPool,
}

impl Pipeline {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let specs = cfg.metric_specs()?;
        let configs = Metric::ALL.iter().map(|&m| (m, cfg.metric_config(m))).collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.run.workers.max(1))
            .thread_name(|i| format!("citeval-{i}"))
            .build()
            .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
        Ok(Self { specs, configs, window: cfg.run.window, pool })
    }

    pub fn specs(&self) -> &[MetricSpec] {
        &self.specs
    }

    pub fn set_metric_config(&mut self, metric: Metric, cfg: MetricConfig) {
        self.configs.insert(metric, cfg);
    }

    /// Distinct base metrics in request order.
    fn bases(&self) -> Vec<Metric> {
        let mut out: Vec<Metric> = Vec::new();
        for s in &self.specs {
            if !out.contains(&s.metric) {
                out.push(s.metric);
            }
        }
        out
    }

    fn needs_window(&self) -> bool {
        self.specs.iter().any(|s| s.rescaled)
    }

    /// Window for the full network. A configured window that does not fit is
    /// an error; the default shrinks to fit small networks.
    pub fn window_for(&self, nodes: usize) -> Result<Option<usize>> {
        if !self.needs_window() {
            return Ok(None);
        }
        match self.window {
            Some(w) => {
                RescaleConfig::new(w).validate(nodes).map_err(MetricError::from)?;
                Ok(Some(w))
            }
            None => {
                let preferred = default_window(nodes);
                let w = fit_window(preferred, nodes);
                if w != Some(preferred) {
                    log::warn!("{nodes} nodes: rescaling window shrunk from {preferred} to {w:?}");
                }
                Ok(w)
            }
        }
    }

    /// Window for a snapshot: the configured or default window, shrunk to
    /// fit.
    fn snapshot_window(&self, nodes: usize) -> Option<usize> {
        fit_window(self.window.unwrap_or_else(|| default_window(nodes)), nodes)
    }

    fn compute_bases(&self, net: &CitationNetwork) -> Vec<(Metric, Result<ScoreVector, MetricError>, f64)> {
        let bases = self.bases();
        self.pool.install(|| {
            bases
                .par_iter()
                .map(|&m| {
                    let start = Instant::now();
                    let result = m.compute(net, &self.configs[&m]);
                    (m, result, start.elapsed().as_secs_f64())
                })
                .collect()
        })
    }

    /// Computes every spec on the full network. The first failure, if any,
    /// is returned alongside the per-metric records gathered so far.
    pub fn run(&self, net: &CitationNetwork) -> (Computation, Option<CliError>) {
        let mut error = None;
        let window = match self.window_for(net.len()) {
            Ok(w) => w,
            Err(e) => {
                error = Some(e);
                None
            }
        };
        let mut comp = Computation { vectors: Vec::new(), runs: Vec::new(), window };
        if error.is_some() {
            return (comp, error);
        }
        let mut bases: BTreeMap<Metric, ScoreVector> = BTreeMap::new();
        for (m, result, seconds) in self.compute_bases(net) {
            let label = m.label().to_string();
            match result {
                Ok(sv) => {
                    comp.runs.push(MetricRun {
                        label,
                        status: RunStatus::Ok,
                        iterations: sv.iterations(),
                        residual: None,
                        seconds,
                    });
                    bases.insert(m, sv);
                }
                Err(e) => {
                    let (status, iterations, residual) = match &e {
                        MetricError::NotConverged { iterations, residual, .. } => {
                            (RunStatus::NotConverged, Some(*iterations), Some(*residual))
                        }
                        other => (RunStatus::Failed(other.to_string()), None, None),
                    };
                    comp.runs.push(MetricRun { label, status, iterations, residual, seconds });
                    error.get_or_insert(e.into());
                }
            }
        }
        if error.is_some() {
            return (comp, error);
        }
        for spec in &self.specs {
            let base = &bases[&spec.metric];
            if comp.get(base.label()).is_none() {
                comp.vectors.push(base.clone());
            }
            if spec.rescaled {
                let start = Instant::now();
                let result = match window {
                    Some(w) => rescale::rescale(base, net, &RescaleConfig::new(w)).map_err(MetricError::from),
                    None => Err(MetricError::Rescale(RescaleError::WindowTooLarge { window: 2, nodes: net.len() })),
                };
                let seconds = start.elapsed().as_secs_f64();
                match result {
                    Ok(sv) => {
                        comp.runs.push(MetricRun {
                            label: spec.label(),
                            status: RunStatus::Ok,
                            iterations: None,
                            residual: None,
                            seconds,
                        });
                        comp.vectors.push(sv);
                    }
                    Err(e) => {
                        comp.runs.push(MetricRun {
                            label: spec.label(),
                            status: RunStatus::Failed(e.to_string()),
                            iterations: None,
                            residual: None,
                            seconds,
                        });
                        return (comp, Some(CliError::Data(format!("{}: {e}", spec.label()))));
                    }
                }
            }
        }
        (comp, None)
    }

    /// Scores of every spec on a snapshot, for age curves.
    pub fn run_snapshot(&self, snap: &CitationNetwork) -> Vec<Result<ScoreVector, MetricError>> {
        let window = self.snapshot_window(snap.len());
        let bases: BTreeMap<Metric, Result<ScoreVector, MetricError>> =
            self.compute_bases(snap).into_iter().map(|(m, r, _)| (m, r)).collect();
        self.specs
            .iter()
            .map(|spec| {
                let base = bases[&spec.metric].clone()?;
                if !spec.rescaled {
                    return Ok(base);
                }
                let w = window.ok_or(MetricError::Rescale(RescaleError::WindowTooLarge {
                    window: self.window.unwrap_or(2),
                    nodes: snap.len(),
                }))?;
                Ok(rescale::rescale(&base, snap, &RescaleConfig::new(w))?)
            })
            .collect()
    }
}

/// Grid search for the CiteRank parameters on `net`.
pub fn tune(net: &CitationNetwork, cfg: &RunConfig) -> Result<CiteRankTuning> {
    let t = &cfg.tuning;
    let taus: Vec<f64> = t.tau_years.iter().map(|y| y * DAYS_PER_YEAR).collect();
    let window_days = (t.window_years * DAYS_PER_YEAR).round() as i64;
    let base = cfg.metric_config(Metric::CiteRank);
    tune_citerank(net, &t.dampings, &taus, window_days, &base).map_err(|e| match e {
        MetricError::DegenerateTuning => CliError::Data(e.to_string()),
        other => other.into(),
    })
}
