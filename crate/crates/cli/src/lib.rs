//! Command-line driver for the liouville-lab experiments.
//!
//! Every run writes its data tables plus a `manifest.json` into the output
//! directory. Data files depend only on the resolved configuration, so a
//! rerun with the same seed reproduces them byte for byte.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{
    Cli, ConfigFile, ExperimentKind, OutputFormat, Parameters, RunConfig, OUT_DIR_ENV,
};
use experiments::ExperimentOutput;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub data_files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub summary: Value,
}

/// Seeded generator with a separate stream per experiment.
pub fn experiment_rng(seed: u64, kind: ExperimentKind) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(kind.stream());
    rng
}

fn execute(config: &RunConfig) -> Result<ExperimentOutput, CliError> {
    let mut rng = experiment_rng(config.seed, config.experiment);
    match &config.parameters {
        Parameters::HaarCheck(p) => experiments::haar_check(p, &mut rng),
        Parameters::Classical(p) => experiments::classical(p, &mut rng),
        Parameters::Wigner(p) => experiments::wigner(p),
        Parameters::Ergodic(p) => experiments::ergodic(p),
        Parameters::Pumping(p) => experiments::pumping(p),
        Parameters::Metric(p) => experiments::metric(p, &mut rng),
    }
}

/// Runs one experiment. Data files and the manifest are written even when
/// a numerical failure is reported afterwards.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    if config.parameters.kind() != config.experiment {
        return Err(CliError::Config(
            "experiment and parameters disagree".into(),
        ));
    }
    std::fs::create_dir_all(&config.out_dir)?;
    let started = Instant::now();
    let output = execute(config)?;
    let mut data_files = Vec::with_capacity(output.tables.len());
    for table in &output.tables {
        data_files.push(table.write(&config.out_dir, config.format)?);
    }
    let manifest = config.out_dir.join("manifest.json");
    let doc = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "started_unix_seconds": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
        "data_files": output.tables.iter().map(|t| t.file_name(config.format)).collect::<Vec<_>>(),
        "summary": output.summary,
        "failure": output.failure,
    });
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    std::fs::write(&manifest, text)?;
    if let Some(msg) = output.failure {
        return Err(CliError::Numerical(msg));
    }
    Ok(RunReport {
        data_files,
        manifest,
        summary: output.summary,
    })
}
