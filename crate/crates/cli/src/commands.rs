use std::path::{Path, PathBuf};

use citeval_core::eval::{self, age_curves_many, bias_profile, null_sigma, AgeGrouping, EvalReport};
use citeval_core::synth::{generate_synthetic, seminal_age_histogram};
use citeval_core::{CitationNetwork, LoadSummary, Metric, ScoreVector, SeminalSet};
use clap::Args;

use crate::config::{DatasetConfig, RunConfig, SynthSection};
use crate::error::{CliError, Result};
use crate::io::{self, fmt_f64, Table};
use crate::manifest::{DatasetRecord, Manifest};
use crate::pipeline::{self, Computation, Pipeline};

/// Generator settings that can be given on the command line.
#[derive(Debug, Clone, Default, Args)]
pub struct SynthArgs {
    /// Number of nodes.
    #[arg(short = 'n', long, value_name = "N")]
    pub size: Option<usize>,
    #[arg(long)]
    pub years: Option<u32>,
    /// Number of seminal nodes to plant.
    #[arg(long, value_name = "COUNT")]
    pub seminal_count: Option<usize>,
    /// Preference of the seminal set for old nodes (0 = none).
    #[arg(long, value_name = "S")]
    pub skew: Option<f64>,
    /// Aging timescale of the attachment kernel.
    #[arg(long, value_name = "YEARS")]
    pub aging_years: Option<f64>,
}

impl SynthArgs {
    fn apply(&self, s: &mut SynthSection) {
        if let Some(n) = self.size {
            s.nodes = n;
        }
        if let Some(y) = self.years {
            s.years = y;
        }
        if let Some(c) = self.seminal_count {
            s.seminal = c;
        }
        if let Some(k) = self.skew {
            s.seminal_skew = k;
        }
        if let Some(a) = self.aging_years {
            s.aging_years = a;
        }
    }
}

/// Runs `body` and writes the manifest whatever the outcome. Returns the
/// human-readable summary produced by `body`.
fn with_manifest<F>(command: &str, cfg: RunConfig, body: F) -> Result<String>
where
    F: FnOnce(&mut Manifest) -> Result<String>,
{
    let mut manifest = Manifest::new(command, cfg);
    let outcome = body(&mut manifest);
    let written = manifest.finish(outcome.as_ref().err());
    written.and(outcome)
}

struct Dataset {
    name: String,
    net: CitationNetwork,
    summary: LoadSummary,
    seminal: Option<SeminalSet>,
}

fn load(d: &DatasetConfig, delimiter: u8, need_seminal: bool, m: &mut Manifest) -> Result<Dataset> {
    m.add_input(&d.nodes)?;
    m.add_input(&d.edges)?;
    let (net, summary) = io::load_network(&d.nodes, &d.edges, delimiter)?;
    log::info!("{}: {} nodes, {} edges", d.name, net.len(), net.edge_count());
    let seminal = match (&d.seminal, need_seminal) {
        (Some(path), true) => {
            m.add_input(path)?;
            Some(io::load_seminal(path, delimiter, &net)?)
        }
        _ => None,
    };
    Ok(Dataset { name: d.name.clone(), net, summary, seminal })
}

fn datasets(cfg: &RunConfig, need_seminal: bool) -> Result<(u8, Vec<DatasetConfig>)> {
    cfg.validate()?;
    cfg.check_inputs(need_seminal)?;
    Ok((cfg.delimiter()?, cfg.datasets.clone()))
}

/// Optional CiteRank tuning, then every requested metric. Per-metric records
/// land in the manifest even when a metric fails.
fn compute(data: &Dataset, cfg: &RunConfig, m: &mut Manifest) -> Result<(Pipeline, Computation)> {
    let mut pipe = Pipeline::new(cfg)?;
    let mut record = DatasetRecord {
        name: data.name.clone(),
        load: data.summary,
        seminal: data.seminal.as_ref().map(SeminalSet::len),
        window: None,
        tuning: None,
        metrics: Vec::new(),
    };
    if cfg.tuning.enabled && pipe.specs().iter().any(|s| s.metric == Metric::CiteRank) {
        let t = pipeline::tune(&data.net, cfg)?;
        log::info!("{}: CiteRank tuned to damping {} and tau {} days", data.name, t.damping, t.tau_days);
        let base = cfg.metric_config(Metric::CiteRank);
        pipe.set_metric_config(
            Metric::CiteRank,
            citeval_core::MetricConfig { damping: t.damping, tau_days: t.tau_days, ..base },
        );
        record.tuning = Some(t);
    }
    let (comp, err) = pipe.run(&data.net);
    record.window = comp.window;
    record.metrics = comp.runs.clone();
    m.datasets.push(record);
    match err {
        Some(e) => Err(e),
        None => Ok((pipe, comp)),
    }
}

pub fn synth(mut cfg: RunConfig, args: &SynthArgs) -> Result<String> {
    args.apply(&mut cfg.synth);
    let params = cfg.synth.params(cfg.run.seed);
    params.validate()?;
    let out = std::path::absolute(&cfg.run.out).map_err(|e| CliError::io(&cfg.run.out, e))?;
    cfg.datasets = vec![DatasetConfig {
        name: "synthetic".into(),
        nodes: out.join("nodes.tsv"),
        edges: out.join("edges.tsv"),
        seminal: Some(out.join("seminal.tsv")),
    }];
    let groups = cfg.run.groups;
    with_manifest("synth", cfg, |m| {
        let data = generate_synthetic(&params)?;
        let net = &data.network;
        io::write_nodes(&m.output("nodes.tsv"), net)?;
        io::write_edges(&m.output("edges.tsv"), net)?;
        io::write_seminal(&m.output("seminal.tsv"), net, &data.seminal)?;
        io::write_quality(&m.output("quality.tsv"), net, &data.quality)?;
        let hist = seminal_age_histogram(net, &data.seminal, groups)
            .ok_or_else(|| CliError::usage(format!("cannot split {} nodes into {groups} age groups", net.len())))?;
        write_seminal_bias(&m.output("seminal_bias.tsv"), "synthetic", &hist)?;
        m.datasets.push(DatasetRecord {
            name: "synthetic".into(),
            load: LoadSummary { nodes: net.len(), edges: net.edge_count(), ..Default::default() },
            seminal: Some(data.seminal.len()),
            window: None,
            tuning: None,
            metrics: Vec::new(),
        });
        Ok(format!(
            "{} nodes, {} edges, {} seminal ({} in the oldest of {groups} groups) -> {}",
            net.len(),
            net.edge_count(),
            data.seminal.len(),
            hist[0],
            m.out_dir().display()
        ))
    })
}

fn write_seminal_bias(path: &Path, dataset: &str, hist: &[usize]) -> Result<()> {
    let total: usize = hist.iter().sum();
    let mut t = Table::create(path, &["dataset", "group", "count", "share"])?;
    for (g, &c) in hist.iter().enumerate() {
        let share = if total == 0 { 0.0 } else { c as f64 / total as f64 };
        t.row([dataset, &(g + 1).to_string(), &c.to_string(), &fmt_f64(share)])?;
    }
    t.finish()
}

fn dataset_dir(name: &str) -> PathBuf {
    PathBuf::from("scores").join(name)
}

pub fn rank(cfg: RunConfig) -> Result<String> {
    let (delimiter, sets) = datasets(&cfg, false)?;
    with_manifest("rank", cfg.clone(), |m| {
        let mut summary = String::new();
        for d in &sets {
            let data = load(d, delimiter, false, m)?;
            let (_, comp) = compute(&data, &cfg, m)?;
            for sv in &comp.vectors {
                let path = m.output(dataset_dir(&data.name).join(format!("{}.tsv", sv.label())));
                io::write_scores(&path, &data.net, sv)?;
            }
            summary.push_str(&format!("{}: {} score files\n", data.name, comp.vectors.len()));
        }
        Ok(summary)
    })
}

pub fn evaluate(cfg: RunConfig) -> Result<String> {
    let (delimiter, sets) = datasets(&cfg, true)?;
    let eval_cfg = cfg.eval_config();
    with_manifest("evaluate", cfg.clone(), |m| {
        let mut reports: Vec<(String, EvalReport)> = Vec::new();
        let mut stats = Table::create(&m.output("dataset_stats.tsv"), STATS_HEADER)?;
        for d in &sets {
            let data = load(d, delimiter, true, m)?;
            let seminal = data.seminal.as_ref().expect("seminal loaded");
            let (pipe, comp) = compute(&data, &cfg, m)?;
            let vectors = comp.select(pipe.specs());
            let mut report = eval::evaluate(&vectors, seminal, &eval_cfg)?;
            if cfg.run.snapshots {
                let curves = age_curves_many(
                    &data.net,
                    seminal,
                    eval_cfg.primary_fraction(),
                    eval_cfg.groups,
                    vectors.len(),
                    |snap| pipe.run_snapshot(snap),
                )?;
                report.set_curves(vectors.iter().map(|v| v.label().to_string()).zip(curves).collect());
            }
            stats.row(dataset_stats(&data))?;
            reports.push((data.name, report));
        }
        stats.finish()?;
        write_rates(&m.output("ir.csv"), &reports)?;
        write_bias(
            &m.output("bias_hist.csv"),
            reports.iter().flat_map(|(n, r)| {
                r.bias.iter().map(move |b| (n.as_str(), b.metric.as_str(), b.z, &b.profile.histogram))
            }),
        )?;
        write_spearman(&m.output("spearman.csv"), reports.iter().map(|(n, r)| (n.as_str(), &r.spearman)))?;
        if cfg.run.snapshots {
            write_curves(&m.output("age_curves.csv"), &reports)?;
        }
        write_summary(&m.output("summary.csv"), &reports, &eval_cfg.fractions)?;
        let json: serde_json::Map<String, serde_json::Value> =
            reports.iter().map(|(n, r)| (n.clone(), serde_json::to_value(r).expect("report serializes"))).collect();
        let path = m.output("report.json");
        let text = serde_json::to_string_pretty(&json).expect("report serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(format_rates(&reports))
    })
}

const STATS_HEADER: &[&str] = &[
    "dataset",
    "nodes",
    "edges",
    "seminal",
    "median_indegree",
    "median_indegree_seminal",
    "tau3_years",
    "tau5_years",
    "tau3_seminal_years",
    "tau5_seminal_years",
    "predating_citations",
    "rejected_edges",
];

fn dataset_stats(data: &Dataset) -> Vec<String> {
    let net = &data.net;
    let seminal = data.seminal.as_ref();
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), fmt_f64);
    let tau = |k: usize, subset: Option<&SeminalSet>| {
        opt(net.time_to_k_citations(k, subset).ok().and_then(|d| d.mean_years()))
    };
    vec![
        data.name.clone(),
        net.len().to_string(),
        net.edge_count().to_string(),
        seminal.map_or(0, SeminalSet::len).to_string(),
        opt(net.median_indegree(None)),
        opt(seminal.and_then(|s| net.median_indegree(Some(s)))),
        tau(3, None),
        tau(5, None),
        seminal.map_or_else(|| "NA".into(), |s| tau(3, Some(s))),
        seminal.map_or_else(|| "NA".into(), |s| tau(5, Some(s))),
        net.predating_citations().to_string(),
        data.summary.rejected().to_string(),
    ]
}

fn write_rates(path: &Path, reports: &[(String, EvalReport)]) -> Result<()> {
    let mut t = Table::create(path, &["dataset", "metric", "z", "ir", "nir", "sigma_ratio", "relative_nir"])?;
    for (name, r) in reports {
        for row in &r.rates {
            t.row([
                name.as_str(),
                &row.metric,
                &fmt_f64(row.z),
                &fmt_f64(row.ir),
                &fmt_f64(row.nir),
                &fmt_f64(row.sigma_ratio),
                &fmt_f64(row.relative_nir),
            ])?;
        }
    }
    t.finish()
}

fn write_bias<'a, I>(path: &Path, rows: I) -> Result<()>
where
    I: IntoIterator<Item = (&'a str, &'a str, f64, &'a Vec<usize>)>,
{
    let mut t = Table::create(path, &["dataset", "metric", "z", "group", "count"])?;
    for (dataset, metric, z, hist) in rows {
        for (g, &c) in hist.iter().enumerate() {
            t.row([dataset, metric, &fmt_f64(z), &(g + 1).to_string(), &c.to_string()])?;
        }
    }
    t.finish()
}

fn write_spearman<'a, I>(path: &Path, matrices: I) -> Result<()>
where
    I: IntoIterator<Item = (&'a str, &'a eval::SpearmanMatrix)>,
{
    let mut t = Table::create(path, &["dataset", "metric_a", "metric_b", "rho"])?;
    for (dataset, sm) in matrices {
        for (a, row) in sm.labels.iter().zip(&sm.values) {
            for (b, rho) in sm.labels.iter().zip(row) {
                t.row([dataset, a, b, &rho.map_or_else(|| "NA".to_string(), fmt_f64)])?;
            }
        }
    }
    t.finish()
}

fn write_curves(path: &Path, reports: &[(String, EvalReport)]) -> Result<()> {
    let mut t = Table::create(
        path,
        &["dataset", "metric", "dt_years", "ir", "nir", "relative_ir", "relative_nir", "eligible"],
    )?;
    for (name, r) in reports {
        for c in &r.curves {
            for (k, p) in c.points.iter().enumerate() {
                t.row([
                    name.as_str(),
                    &c.metric,
                    &p.dt_years.to_string(),
                    &fmt_f64(p.ir),
                    &fmt_f64(p.nir),
                    &fmt_f64(c.relative_ir[k]),
                    &fmt_f64(c.relative_nir[k]),
                    &p.eligible.to_string(),
                ])?;
            }
        }
    }
    t.finish()
}

/// Mean relative NIR of each metric over all datasets.
fn write_summary(path: &Path, reports: &[(String, EvalReport)], fractions: &[f64]) -> Result<()> {
    let only: Vec<EvalReport> = reports.iter().map(|(_, r)| r.clone()).collect();
    let mut t = Table::create(path, &["metric", "z", "mean_relative_nir", "datasets"])?;
    for &z in fractions {
        for (metric, mean) in EvalReport::average_relative_nir(&only, z) {
            t.row([metric.as_str(), &fmt_f64(z), &fmt_f64(mean), &only.len().to_string()])?;
        }
    }
    t.finish()
}

fn format_rates(reports: &[(String, EvalReport)]) -> String {
    let mut s = String::from("dataset\tmetric\tz\tir\tnir\tsigma_ratio\n");
    for (name, r) in reports {
        for row in &r.rates {
            s.push_str(&format!(
                "{name}\t{}\t{}\t{:.4}\t{:.4}\t{:.2}\n",
                row.metric, row.z, row.ir, row.nir, row.sigma_ratio
            ));
        }
    }
    s
}

/// Bias histograms and `sigma / sigma0` of every metric; the seminal set's
/// own age histogram when a seminal file is configured.
pub fn bias(cfg: RunConfig) -> Result<String> {
    let (delimiter, sets) = datasets(&cfg, false)?;
    let eval_cfg = cfg.eval_config();
    with_manifest("bias", cfg.clone(), |m| {
        let mut hist_rows: Vec<(String, String, f64, Vec<usize>)> = Vec::new();
        let mut summary = Table::create(
            &m.output("bias_summary.tsv"),
            &["dataset", "metric", "z", "expected", "sigma", "sigma0", "sigma_ratio"],
        )?;
        let mut seminal_rows: Vec<(String, Vec<usize>)> = Vec::new();
        for d in &sets {
            let data = load(d, delimiter, d.seminal.is_some(), m)?;
            let (pipe, comp) = compute(&data, &cfg, m)?;
            let grouping = AgeGrouping::new(data.net.len(), eval_cfg.groups)?;
            for (zi, &z) in eval_cfg.fractions.iter().enumerate() {
                let top = eval::top_count(z, data.net.len())?;
                let sigma0 =
                    null_sigma(&grouping, top, eval_cfg.null_replicates, eval_cfg.seed.wrapping_add(zi as u64));
                for sv in comp.select(pipe.specs()) {
                    let p = bias_profile(&sv, &grouping, z, sigma0)?;
                    summary.row([
                        data.name.as_str(),
                        sv.label(),
                        &fmt_f64(z),
                        &fmt_f64(p.expected),
                        &fmt_f64(p.sigma),
                        &fmt_f64(p.sigma0),
                        &fmt_f64(p.ratio()),
                    ])?;
                    hist_rows.push((data.name.clone(), sv.label().to_string(), z, p.histogram));
                }
            }
            if let Some(s) = &data.seminal {
                seminal_rows.push((data.name.clone(), grouping.histogram(s.nodes().iter().copied())));
            }
        }
        summary.finish()?;
        write_bias(&m.output("bias_hist.csv"), hist_rows.iter().map(|(d, l, z, h)| (d.as_str(), l.as_str(), *z, h)))?;
        if !seminal_rows.is_empty() {
            let path = m.output("seminal_bias.tsv");
            let mut t = Table::create(&path, &["dataset", "group", "count", "share"])?;
            for (name, hist) in &seminal_rows {
                let total: usize = hist.iter().sum();
                for (g, &c) in hist.iter().enumerate() {
                    t.row([name.as_str(), &(g + 1).to_string(), &c.to_string(), &fmt_f64(c as f64 / total as f64)])?;
                }
            }
            t.finish()?;
        }
        Ok(format!("bias histograms for {} datasets -> {}", sets.len(), m.out_dir().display()))
    })
}

pub fn similarity(cfg: RunConfig) -> Result<String> {
    let (delimiter, sets) = datasets(&cfg, false)?;
    with_manifest("similarity", cfg.clone(), |m| {
        let mut matrices = Vec::new();
        for d in &sets {
            let data = load(d, delimiter, false, m)?;
            let (pipe, comp) = compute(&data, &cfg, m)?;
            let vectors: Vec<ScoreVector> = comp.select(pipe.specs());
            matrices.push((
                data.name,
                eval::SpearmanMatrix {
                    labels: vectors.iter().map(|v| v.label().to_string()).collect(),
                    values: eval::spearman_matrix(&vectors),
                },
            ));
        }
        write_spearman(&m.output("spearman.csv"), matrices.iter().map(|(n, s)| (n.as_str(), s)))?;
        Ok(format!("Spearman matrices for {} datasets -> {}", sets.len(), m.out_dir().display()))
    })
}

/// Size and degree statistics of every yearly snapshot.
pub fn snapshots(cfg: RunConfig) -> Result<String> {
    let delimiter = cfg.delimiter()?;
    cfg.check_inputs(false)?;
    let sets = cfg.datasets.clone();
    with_manifest("snapshots", cfg, |m| {
        let mut t = Table::create(
            &m.output("snapshots.tsv"),
            &["dataset", "cutoff", "nodes", "edges", "median_indegree", "predating_citations"],
        )?;
        for d in &sets {
            let data = load(d, delimiter, false, m)?;
            m.datasets.push(DatasetRecord {
                name: data.name.clone(),
                load: data.summary,
                seminal: None,
                window: None,
                tuning: None,
                metrics: Vec::new(),
            });
            for (cutoff, snap) in data.net.yearly_snapshots()? {
                t.row([
                    data.name.as_str(),
                    &cutoff.format("%Y-%m-%d").to_string(),
                    &snap.len().to_string(),
                    &snap.edge_count().to_string(),
                    &snap.median_indegree(None).map_or_else(|| "NA".into(), fmt_f64),
                    &snap.predating_citations().to_string(),
                ])?;
            }
        }
        t.finish()?;
        Ok(format!("snapshot statistics -> {}", m.out_dir().display()))
    })
}
