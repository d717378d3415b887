use std::path::{Path, PathBuf};

use citeval_core::synth::SynthError;
use citeval_core::{EvalError, MetricError, NetworkError, RescaleError};
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const DATA: u8 = 2;
    pub const NOT_CONVERGED: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad configuration or a missing input path.
    #[error("{0}")]
    Usage(String),
    /// A malformed row in an input file.
    #[error("{}:{line}: {message}", path.display())]
    Row { path: PathBuf, line: u64, message: String },
    /// Well-formed input that cannot be processed.
    #[error("{0}")]
    Data(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{metric} did not converge within {iterations} iterations (residual {residual:e})")]
    NotConverged { metric: String, iterations: usize, residual: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::NotConverged { .. } => exit::NOT_CONVERGED,
            CliError::Row { .. } | CliError::Data(_) | CliError::Io { .. } => exit::DATA,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::NotConverged { metric, iterations, residual } => {
                CliError::NotConverged { metric: metric.to_string(), iterations, residual }
            }
            MetricError::InvalidConfig(_)
            | MetricError::UnknownMetric(_)
            | MetricError::NotRescalable(_)
            | MetricError::Rescale(RescaleError::InvalidWindow(_))
            | MetricError::Rescale(RescaleError::WindowTooLarge { .. }) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Metric(m) => m.into(),
            EvalError::Network(n) => n.into(),
            EvalError::InvalidFraction(_) | EvalError::EmptyTop { .. } | EvalError::InvalidGroups { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
