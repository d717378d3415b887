//! Command-line harness around `citeval-core`: reads node, edge and seminal
//! files, computes rankings, evaluates them and writes tab-delimited tables
//! plus a JSON manifest that is enough to replay the run.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod pipeline;

use std::ffi::OsString;

use clap::{Parser, Subcommand};

pub use config::{Overrides, RunConfig};
pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "citeval", version, about = "Rank citation networks and evaluate rankings against seminal nodes")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    /// Do not print the run summary.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic growing network with a planted seminal set.
    Synth(commands::SynthArgs),
    /// Write one score file per metric.
    Rank,
    /// IR, NIR, bias, similarity and (with --snapshots) age curves.
    Evaluate,
    /// Age histograms of the top-ranked nodes and their sigma ratio.
    Bias,
    /// Spearman correlation between metrics.
    Similarity,
    /// Statistics of the yearly snapshots.
    Snapshots,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match dispatch(&cli) {
        Ok(summary) => {
            if !cli.quiet && !summary.is_empty() {
                println!("{}", summary.trim_end());
            }
            exit::OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let cfg = RunConfig::from_overrides(&cli.overrides)?;
    match &cli.command {
        Command::Synth(args) => commands::synth(cfg, args),
        Command::Rank => commands::rank(cfg),
        Command::Evaluate => commands::evaluate(cfg),
        Command::Bias => commands::bias(cfg),
        Command::Similarity => commands::similarity(cfg),
        Command::Snapshots => commands::snapshots(cfg),
    }
}
