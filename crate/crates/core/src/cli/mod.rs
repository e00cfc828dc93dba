//! Command-line front end: flag and config-file resolution, seeding, output
//! files and run manifests.

mod commands;
mod config;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use commands::{EstimateKSettings, FitSettings, ForecastSettings, SimulateSettings};
pub use config::{load_config, ConfigFile};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "fabayes", version, about = "Factor-adjusted Bayesian sparse regression")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random stream of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for replicates, folds and windows (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML settings file or a run manifest; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulation benchmark over replicates.
    Simulate(commands::SimulateArgs),
    /// Decompose a panel and run the sampler on one response.
    Fit(commands::FitArgs),
    /// Rolling-window one-step-ahead forecasts.
    Forecast(commands::ForecastArgs),
    /// Eigenvalue-ratio estimate of the number of factors.
    EstimateK(commands::EstimateKArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Fit(_) => "fit",
            Command::Forecast(_) => "forecast",
            Command::EstimateK(_) => "estimate-k",
        }
    }
}

/// Written next to every set of outputs; `--config <manifest>` replays it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub output_paths: Vec<String>,
    pub tool_version: String,
    /// Quantities chosen during the run, such as an estimated `k`.
    #[serde(default)]
    pub derived: serde_json::Map<String, serde_json::Value>,
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match root(&e) {
            Error::Io { .. } | Error::Parse { .. } | Error::MissingValue { .. } | Error::Config(_) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn root(e: &Error) -> &Error {
    match e {
        Error::Replicate { source, .. } | Error::Window { source, .. } => root(source),
        other => other,
    }
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let file = match &cli.global.config {
        Some(path) => Some(load_config(path, cli.command.name())?),
        None => None,
    };
    let seed = cli
        .global
        .seed
        .or(file.as_ref().and_then(|f| f.seed))
        .unwrap_or(DEFAULT_SEED);
    let settings = file.map(|f| f.settings);
    let out = Output::new(&cli.global.out_dir, cli.command.name())?;
    match cli.command {
        Command::Simulate(a) => commands::simulate(a, settings, seed, out),
        Command::Fit(a) => commands::fit(a, settings, seed, out),
        Command::Forecast(a) => commands::forecast(a, settings, seed, out),
        Command::EstimateK(a) => commands::estimate_k_cmd(a, settings, seed, out),
    }
}

/// Output files of one command, all named after it.
pub(crate) struct Output {
    dir: PathBuf,
    stem: String,
    written: Vec<String>,
}

impl Output {
    fn new(dir: &Path, command: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: command.replace('-', "_"),
            written: Vec::new(),
        })
    }

    pub(crate) fn path(&self, ext: &str) -> PathBuf {
        self.dir.join(format!("{}.{ext}", self.stem))
    }

    pub(crate) fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(path, bytes).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path.display().to_string());
        Ok(())
    }

    pub(crate) fn write_json<S: Serialize>(&mut self, ext: &str, value: &S) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::runtime(e.to_string()))?;
        text.push('\n');
        let path = self.path(ext);
        self.write(&path, text.as_bytes())
    }

    pub(crate) fn finish<S: Serialize>(
        mut self,
        command: &str,
        settings: &S,
        seed: u64,
        derived: serde_json::Map<String, serde_json::Value>,
    ) -> Result<(), CliError> {
        let manifest = RunManifest {
            command: command.into(),
            config: serde_json::to_value(settings).map_err(|e| CliError::runtime(e.to_string()))?,
            seed,
            output_paths: self.written.clone(),
            tool_version: TOOL_VERSION.into(),
            derived,
        };
        self.write_json("manifest.json", &manifest)
    }
}
