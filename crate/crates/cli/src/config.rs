//! Run configuration: a TOML file with one section per concern, overridden
//! by command-line flags. The effective configuration is stored in every
//! manifest so a run can be replayed from it.

use std::path::{Path, PathBuf};

use citeval_core::synth::SynthParams;
use citeval_core::{EvalConfig, Metric, MetricConfig, MetricSpec, DAYS_PER_YEAR};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub input: InputSection,
    pub solver: SolverSection,
    pub metric: MetricSections,
    pub tuning: TuningSection,
    pub synth: SynthSection,
    pub datasets: Vec<DatasetConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    pub nodes: PathBuf,
    pub edges: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seminal: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Metric labels; an `R` prefix selects the rescaled variant.
    pub metrics: Vec<String>,
    pub z: Vec<f64>,
    pub groups: usize,
    /// Rescaling window; `N / 600` rounded to even when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    pub workers: usize,
    /// Seeds the synthetic generator and the null-model sampling.
    pub seed: u64,
    pub snapshots: bool,
    pub null_replicates: usize,
    pub out: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            metrics: MetricSpec::all().iter().map(MetricSpec::label).collect(),
            z: vec![0.01],
            groups: 40,
            window: None,
            workers: 1,
            seed: 1,
            snapshots: false,
            null_replicates: citeval_core::eval::DEFAULT_NULL_REPLICATES,
            out: PathBuf::from("citeval-out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    /// Field delimiter of node, edge and seminal files.
    pub delimiter: String,
}

impl Default for InputSection {
    fn default() -> Self {
        Self { delimiter: "\t".into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let m = MetricConfig::default();
        Self { tolerance: m.tolerance, max_iterations: m.max_iterations }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricSections {
    #[serde(rename = "P")]
    pub pagerank: PageRankSection,
    #[serde(rename = "T")]
    pub citerank: CiteRankSection,
    #[serde(rename = "CI")]
    pub collective_influence: CiSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PageRankSection {
    pub damping: f64,
}

impl Default for PageRankSection {
    fn default() -> Self {
        Self { damping: MetricConfig::default().damping }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CiteRankSection {
    pub damping: f64,
    pub tau_years: f64,
}

impl Default for CiteRankSection {
    fn default() -> Self {
        let m = MetricConfig::default();
        Self { damping: m.damping, tau_years: m.tau_days / DAYS_PER_YEAR }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CiSection {
    pub level: usize,
}

impl Default for CiSection {
    fn default() -> Self {
        Self { level: MetricConfig::default().ci_level }
    }
}

/// CiteRank grid search; the selected point replaces `[metric.T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningSection {
    pub enabled: bool,
    pub dampings: Vec<f64>,
    pub tau_years: Vec<f64>,
    pub window_years: f64,
}

impl Default for TuningSection {
    fn default() -> Self {
        Self {
            enabled: false,
            dampings: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            tau_years: vec![0.5, 1.0, 1.5, 2.0, 2.6, 3.0, 4.0, 6.0, 8.0],
            window_years: 2.0,
        }
    }
}

/// Generator parameters; the seed comes from `[run]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub nodes: usize,
    pub start_year: i32,
    pub years: u32,
    pub growth: f64,
    pub attachment_offset: f64,
    pub references: usize,
    pub aging_years: f64,
    pub quality_sigma: f64,
    pub seminal: usize,
    pub seminal_pool: f64,
    pub seminal_skew: f64,
}

impl Default for SynthSection {
    fn default() -> Self {
        let p = SynthParams::default();
        Self {
            nodes: p.nodes,
            start_year: p.start_year,
            years: p.years,
            growth: p.growth,
            attachment_offset: p.attachment_offset,
            references: p.references,
            aging_years: p.aging_days / DAYS_PER_YEAR,
            quality_sigma: p.quality_sigma,
            seminal: p.seminal,
            seminal_pool: p.seminal_pool,
            seminal_skew: p.seminal_skew,
        }
    }
}

impl SynthSection {
    pub fn params(&self, seed: u64) -> SynthParams {
        SynthParams {
            nodes: self.nodes,
            start_year: self.start_year,
            years: self.years,
            growth: self.growth,
            attachment_offset: self.attachment_offset,
            references: self.references,
            aging_days: self.aging_years * DAYS_PER_YEAR,
            quality_sigma: self.quality_sigma,
            seed,
            seminal: self.seminal,
            seminal_pool: self.seminal_pool,
            seminal_skew: self.seminal_skew,
        }
    }
}

/// Flags shared by all subcommands; each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML config file, or a manifest.json from an earlier run to replay.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Comma-separated metric labels, e.g. C,RC,P,RP,AgeR.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    pub metrics: Option<Vec<String>>,
    /// Comma-separated top fractions.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    pub z: Option<Vec<f64>>,
    /// Number of age groups.
    #[arg(long, global = true, value_name = "G")]
    pub groups: Option<usize>,
    /// Rescaling window (even).
    #[arg(long, global = true, value_name = "W")]
    pub window: Option<usize>,
    /// Worker threads for metric computation.
    #[arg(long, global = true, value_name = "K")]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Node file; replaces the configured datasets together with --edges.
    #[arg(long, global = true, value_name = "PATH", requires = "edges")]
    pub nodes: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH", requires = "nodes")]
    pub edges: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH", requires = "nodes")]
    pub seminal: Option<PathBuf>,
    /// Evaluate on yearly snapshots (age curves).
    #[arg(long, global = true)]
    pub snapshots: bool,
    /// Select CiteRank parameters by grid search before ranking.
    #[arg(long, global = true)]
    pub tune: bool,
}

impl RunConfig {
    /// Reads a TOML config or the `config` entry of a manifest. Relative
    /// dataset paths are taken relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            let manifest: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("{}: invalid manifest: {e}", path.display())))?;
            let config = manifest
                .get("config")
                .cloned()
                .ok_or_else(|| CliError::usage(format!("{}: manifest has no `config` entry", path.display())))?;
            serde_json::from_value(config)
                .map_err(|e| CliError::usage(format!("{}: invalid manifest config: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        for d in &mut cfg.datasets {
            d.nodes = base.join(&d.nodes);
            d.edges = base.join(&d.edges);
            d.seminal = d.seminal.as_ref().map(|s| base.join(s));
        }
        Ok(cfg)
    }

    /// Loads the configured file (if any) and applies the flags.
    pub fn from_overrides(o: &Overrides) -> Result<Self> {
        let mut cfg = match &o.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        cfg.apply(o);
        // Absolute input paths keep a stored config valid from any directory.
        let absolute =
            |p: &Path| std::path::absolute(p).map_err(|e| CliError::usage(format!("bad path {}: {e}", p.display())));
        for d in &mut cfg.datasets {
            d.nodes = absolute(&d.nodes)?;
            d.edges = absolute(&d.edges)?;
            d.seminal = d.seminal.as_deref().map(absolute).transpose()?;
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let run = &mut self.run;
        if let Some(m) = &o.metrics {
            run.metrics = m.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        }
        if let Some(z) = &o.z {
            run.z = z.clone();
        }
        if let Some(g) = o.groups {
            run.groups = g;
        }
        if o.window.is_some() {
            run.window = o.window;
        }
        if let Some(k) = o.workers {
            run.workers = k;
        }
        if let Some(s) = o.seed {
            run.seed = s;
        }
        if let Some(out) = &o.out {
            run.out = out.clone();
        }
        run.snapshots |= o.snapshots;
        self.tuning.enabled |= o.tune;
        if let (Some(nodes), Some(edges)) = (&o.nodes, &o.edges) {
            let name = nodes.file_stem().map_or_else(|| "data".to_string(), |s| s.to_string_lossy().into_owned());
            self.datasets =
                vec![DatasetConfig { name, nodes: nodes.clone(), edges: edges.clone(), seminal: o.seminal.clone() }];
        }
    }

    /// Requested metrics in order, without repeats.
    pub fn metric_specs(&self) -> Result<Vec<MetricSpec>> {
        let mut specs: Vec<MetricSpec> = Vec::new();
        for label in &self.run.metrics {
            let spec: MetricSpec =
                label.parse().map_err(|e: citeval_core::MetricError| CliError::usage(e.to_string()))?;
            if !specs.contains(&spec) {
                specs.push(spec);
            }
        }
        if specs.is_empty() {
            return Err(CliError::usage("no metrics requested"));
        }
        Ok(specs)
    }

    /// Solver settings plus the parameters of `metric`.
    pub fn metric_config(&self, metric: Metric) -> MetricConfig {
        let mut cfg = MetricConfig {
            tolerance: self.solver.tolerance,
            max_iterations: self.solver.max_iterations,
            ci_level: self.metric.collective_influence.level,
            ..MetricConfig::default()
        };
        match metric {
            Metric::PageRank => cfg.damping = self.metric.pagerank.damping,
            Metric::CiteRank => {
                cfg.damping = self.metric.citerank.damping;
                cfg.tau_days = self.metric.citerank.tau_years * DAYS_PER_YEAR;
            }
            _ => {}
        }
        cfg
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            fractions: self.run.z.clone(),
            groups: self.run.groups,
            null_replicates: self.run.null_replicates,
            seed: self.run.seed,
        }
    }

    pub fn delimiter(&self) -> Result<u8> {
        match self.input.delimiter.as_bytes() {
            [b] if b.is_ascii() => Ok(*b),
            _ => Err(CliError::usage(format!(
                "delimiter must be a single ASCII character, got {:?}",
                self.input.delimiter
            ))),
        }
    }

    /// Checks everything that does not depend on the data.
    pub fn validate(&self) -> Result<()> {
        let specs = self.metric_specs()?;
        self.eval_config().validate()?;
        if self.run.z.is_empty() {
            return Err(CliError::usage("at least one top fraction is required"));
        }
        if self.run.workers == 0 {
            return Err(CliError::usage("workers must be at least 1"));
        }
        if self.run.null_replicates == 0 {
            return Err(CliError::usage("null_replicates must be at least 1"));
        }
        if let Some(w) = self.run.window {
            if w < 2 || w % 2 != 0 {
                return Err(CliError::usage(format!("rescaling window must be an even number >= 2, got {w}")));
            }
        }
        self.delimiter()?;
        for spec in &specs {
            self.metric_config(spec.metric).validate()?;
        }
        if self.tuning.enabled {
            let t = &self.tuning;
            if t.dampings.is_empty() || t.tau_years.is_empty() {
                return Err(CliError::usage("tuning grids must be non-empty"));
            }
            if !(t.window_years > 0.0) {
                return Err(CliError::usage("tuning window must be positive"));
            }
            if t.dampings.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
                return Err(CliError::usage("tuning dampings must lie in (0, 1)"));
            }
            if t.tau_years.iter().any(|&y| !(y > 0.0)) {
                return Err(CliError::usage("tuning timescales must be positive"));
            }
        }
        let mut names: Vec<&str> = self.datasets.iter().map(|d| d.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::usage("dataset names must be unique"));
        }
        Ok(())
    }

    /// Fails with a usage error unless every referenced input exists.
    pub fn check_inputs(&self, need_seminal: bool) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(CliError::usage("no dataset given: use --nodes/--edges or [[datasets]] in the config"));
        }
        for d in &self.datasets {
            let mut paths = vec![&d.nodes, &d.edges];
            match (&d.seminal, need_seminal) {
                (Some(s), _) => paths.push(s),
                (None, true) => return Err(CliError::usage(format!("dataset `{}` has no seminal file", d.name))),
                (None, false) => {}
            }
            if let Some(missing) = paths.into_iter().find(|p| !p.is_file()) {
                return Err(CliError::usage(format!("input file not found: {}", missing.display())));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_request_every_variant() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.metric_specs().unwrap().len(), 18);
        cfg.validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.run.window = Some(200);
        cfg.datasets.push(DatasetConfig {
            name: "x".into(),
            nodes: "n.tsv".into(),
            edges: "e.tsv".into(),
            seminal: None,
        });
        let back: RunConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn sections_parse() {
        let cfg: RunConfig = toml::from_str(
            "[run]\nmetrics = [\"P\", \"RT\"]\nz = [0.005, 0.01]\n\n[metric.T]\ntau_years = 1.5\n\n[metric.CI]\nlevel = 1\n",
        )
        .unwrap();
        assert_eq!(cfg.run.z, vec![0.005, 0.01]);
        assert_eq!(cfg.metric_config(Metric::CiteRank).tau_days, 1.5 * DAYS_PER_YEAR);
        assert_eq!(cfg.metric_config(Metric::CollectiveInfluence).ci_level, 1);
        assert_eq!(cfg.metric_config(Metric::PageRank).damping, 0.5);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("[run]\nmetricz = []\n").is_err());
    }

    #[test]
    fn bad_metric_names_are_usage_errors() {
        for bad in ["Q", "RYCCP", "RAgeR"] {
            let mut cfg = RunConfig::default();
            cfg.run.metrics = vec![bad.into()];
            assert_eq!(cfg.validate().unwrap_err().exit_code(), 1, "{bad}");
        }
    }

    #[test]
    fn flags_override_file() {
        let mut cfg = RunConfig::default();
        let o = Overrides {
            metrics: Some(vec!["C".into(), " RP".into(), "C".into()]),
            z: Some(vec![0.02]),
            seed: Some(9),
            nodes: Some("dir/aps.tsv".into()),
            edges: Some("dir/cites.tsv".into()),
            ..Default::default()
        };
        cfg.apply(&o);
        assert_eq!(cfg.metric_specs().unwrap().len(), 2);
        assert_eq!((cfg.run.z.as_slice(), cfg.run.seed), (&[0.02][..], 9));
        assert_eq!(cfg.datasets[0].name, "aps");
    }

    #[test]
    fn odd_window_rejected() {
        let mut cfg = RunConfig::default();
        cfg.run.window = Some(101);
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 1);
    }
}
