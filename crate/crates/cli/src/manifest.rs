use std::path::{Path, PathBuf};
use std::time::Instant;

use citeval_core::metrics::CiteRankTuning;
use citeval_core::LoadSummary;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::sha256_file;
use crate::pipeline::MetricRun;

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path, shown_as: String) -> Result<Self> {
        let bytes = std::fs::metadata(path).map_err(|e| CliError::io(path, e))?.len();
        Ok(Self { path: shown_as, bytes, sha256: sha256_file(path)? })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetRecord {
    pub name: String,
    pub load: LoadSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seminal: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuning: Option<CiteRankTuning>,
    pub metrics: Vec<MetricRun>,
}

/// Record of one invocation, written as `manifest.json` in the output
/// directory. `config` alone is enough to replay the run.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub inputs: Vec<FileDigest>,
    pub datasets: Vec<DatasetRecord>,
    pub outputs: Vec<FileDigest>,
    pub status: String,
    pub exit_code: u8,
    pub seconds: f64,
    #[serde(skip)]
    started: Option<Instant>,
    #[serde(skip)]
    written: Vec<PathBuf>,
}

impl Manifest {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            inputs: Vec::new(),
            datasets: Vec::new(),
            outputs: Vec::new(),
            status: String::new(),
            exit_code: 0,
            seconds: 0.0,
            started: Some(Instant::now()),
            written: Vec::new(),
        }
    }

    pub fn out_dir(&self) -> &Path {
        &self.config.run.out
    }

    /// Path of an output file inside the output directory, remembered for
    /// the checksum list.
    pub fn output(&mut self, relative: impl AsRef<Path>) -> PathBuf {
        let path = self.out_dir().join(relative);
        self.written.push(path.clone());
        path
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        if self.inputs.iter().any(|d| Path::new(&d.path) == path) {
            return Ok(());
        }
        self.inputs.push(FileDigest::of(path, path.display().to_string())?);
        Ok(())
    }

    /// Writes `config.toml` and `manifest.json`, recording the error the run
    /// ended with, if any.
    pub fn finish(mut self, error: Option<&CliError>) -> Result<()> {
        let out = self.out_dir().to_path_buf();
        std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
        let config_path = out.join("config.toml");
        std::fs::write(&config_path, self.config.to_toml()).map_err(|e| CliError::io(&config_path, e))?;
        self.written.push(config_path);
        let mut written = std::mem::take(&mut self.written);
        written.sort();
        written.dedup();
        for path in written.iter().filter(|p| p.is_file()) {
            let shown = path.strip_prefix(&out).unwrap_or(path).display().to_string();
            self.outputs.push(FileDigest::of(path, shown)?);
        }
        (self.status, self.exit_code) = match error {
            None => ("ok".to_string(), 0),
            Some(e) => (e.to_string(), e.exit_code()),
        };
        self.seconds = self.started.map_or(0.0, |s| s.elapsed().as_secs_f64());
        let path = out.join("manifest.json");
        let json = serde_json::to_string_pretty(&self).expect("manifest serializes");
        std::fs::write(&path, json + "\n").map_err(|e| CliError::io(&path, e))
    }
}
