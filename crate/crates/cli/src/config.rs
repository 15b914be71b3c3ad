//! Run configuration: command-line flags, an optional JSON file layered on
//! top, and the `LIOUVILLE_LAB_OUT` override.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUT_DIR: &str = "out";
pub const OUT_DIR_ENV: &str = "LIOUVILLE_LAB_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    HaarCheck,
    Classical,
    Wigner,
    Ergodic,
    Pumping,
    Metric,
}

impl ExperimentKind {
    /// Independent RNG stream per experiment.
    pub fn stream(self) -> u64 {
        self as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Harmonic,
    Quartic,
    Pendulum,
    Damped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Free,
    Harmonic,
    Quartic,
    /// Polynomial from `coeffs`.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct HaarCheckParams {
    /// Random (fixed, point) pairs to check.
    #[arg(long, default_value_t = HaarCheckParams::DEFAULT.samples)]
    pub samples: usize,
    /// Central-difference step.
    #[arg(long, default_value_t = HaarCheckParams::DEFAULT.step)]
    pub step: f64,
    /// Draws with sin θ or sin θ′ below this are resampled.
    #[arg(long, default_value_t = HaarCheckParams::DEFAULT.min_sin)]
    pub min_sin: f64,
}

impl HaarCheckParams {
    pub const DEFAULT: Self = Self {
        samples: 100,
        step: 1e-5,
        min_sin: 1e-2,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalParams {
    #[arg(long, value_enum, default_value_t = ClassicalParams::DEFAULT.system)]
    pub system: SystemKind,
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.mass)]
    pub mass: f64,
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.omega)]
    pub omega: f64,
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.k2)]
    pub k2: f64,
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.k4)]
    pub k4: f64,
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.length)]
    pub length: f64,
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.gravity)]
    pub gravity: f64,
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.stiffness)]
    pub stiffness: f64,
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.gamma)]
    pub gamma: f64,
    /// Total time.
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.t)]
    pub t: f64,
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.dt)]
    pub dt: f64,
    /// Integration steps between output rows.
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.stride)]
    pub stride: usize,
    /// Ensemble size for density transport.
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.ensemble)]
    pub ensemble: usize,
    /// Ensemble spread around (p, q) = (0, 1).
    #[arg(long, default_value_t = ClassicalParams::DEFAULT.sigma)]
    pub sigma: f64,
}

impl ClassicalParams {
    pub const DEFAULT: Self = Self {
        system: SystemKind::Quartic,
        mass: 1.0,
        omega: 1.0,
        k2: 1.0,
        k4: 0.4,
        length: 1.0,
        gravity: 1.0,
        stiffness: 1.0,
        gamma: 0.5,
        t: 50.0,
        dt: 1e-3,
        stride: 100,
        ensemble: 16,
        sigma: 0.3,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct WignerParams {
    #[arg(long, value_enum, default_value_t = WignerParams::DEFAULT.potential)]
    pub potential: PotentialKind,
    #[arg(long, default_value_t = WignerParams::DEFAULT.k2)]
    pub k2: f64,
    #[arg(long, default_value_t = WignerParams::DEFAULT.k4)]
    pub k4: f64,
    /// Polynomial coefficients c0,c1,… for `--potential custom` (degree ≤ 6).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Vec<f64>,
    /// Initial coherent-state centre.
    #[arg(long, default_value_t = WignerParams::DEFAULT.q0, allow_hyphen_values = true)]
    pub q0: f64,
    #[arg(long, default_value_t = WignerParams::DEFAULT.p0, allow_hyphen_values = true)]
    pub p0: f64,
    #[arg(long, default_value_t = WignerParams::DEFAULT.hbar)]
    pub hbar: f64,
    /// Grid points on [-12, 12), a power of two ≥ 128.
    #[arg(long, default_value_t = WignerParams::DEFAULT.points)]
    pub points: usize,
    #[arg(long, default_value_t = WignerParams::DEFAULT.t)]
    pub t: f64,
    #[arg(long, default_value_t = WignerParams::DEFAULT.dt)]
    pub dt: f64,
    /// Solver steps between output rows.
    #[arg(long, default_value_t = WignerParams::DEFAULT.stride)]
    pub stride: usize,
}

impl WignerParams {
    pub const DEFAULT: Self = Self {
        potential: PotentialKind::Quartic,
        k2: 1.0,
        k4: 0.4,
        coeffs: Vec::new(),
        q0: 2.0,
        p0: 0.0,
        hbar: 1.0,
        points: 512,
        t: 1.0,
        dt: 4e-5,
        stride: 1250,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ErgodicParams {
    #[arg(long, default_value_t = ErgodicParams::DEFAULT.phi, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = ErgodicParams::DEFAULT.theta)]
    pub theta: f64,
    #[arg(long, default_value_t = ErgodicParams::DEFAULT.omega, allow_hyphen_values = true)]
    pub omega: f64,
    /// Orbit samples U^0 … U^(n-1).
    #[arg(long, default_value_t = ErgodicParams::DEFAULT.n)]
    pub n: usize,
    /// Bins per axis.
    #[arg(long, default_value_t = ErgodicParams::DEFAULT.bins)]
    pub bins: usize,
}

impl ErgodicParams {
    pub const DEFAULT: Self = Self {
        phi: 0.0,
        theta: 1.0,
        omega: 0.0,
        n: 100_000,
        bins: 20,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct PumpingParams {
    #[arg(long, default_value_t = PumpingParams::DEFAULT.phi, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = PumpingParams::DEFAULT.theta)]
    pub theta: f64,
    #[arg(long, default_value_t = PumpingParams::DEFAULT.omega, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, default_value_t = PumpingParams::DEFAULT.n)]
    pub n: usize,
    /// Rows are written for n = 1 and every multiple of `stride`.
    #[arg(long, default_value_t = PumpingParams::DEFAULT.stride)]
    pub stride: usize,
}

impl PumpingParams {
    pub const DEFAULT: Self = Self {
        phi: 1.0,
        theta: 1.0,
        omega: 0.0,
        n: 1_000_000,
        stride: 1000,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct MetricParams {
    /// Generator U for the quantum side.
    #[arg(long, default_value_t = MetricParams::DEFAULT.phi, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = MetricParams::DEFAULT.theta)]
    pub theta: f64,
    #[arg(long, default_value_t = MetricParams::DEFAULT.omega, allow_hyphen_values = true)]
    pub omega: f64,
    /// Discrete steps for the invariance check.
    #[arg(long, default_value_t = MetricParams::DEFAULT.steps)]
    pub steps: usize,
    /// Classical system for the contrast series.
    #[arg(long, value_enum, default_value_t = MetricParams::DEFAULT.system)]
    pub system: SystemKind,
    #[arg(long, default_value_t = MetricParams::DEFAULT.t)]
    pub t: f64,
    #[arg(long, default_value_t = MetricParams::DEFAULT.dt)]
    pub dt: f64,
    #[arg(long, default_value_t = MetricParams::DEFAULT.stride)]
    pub stride: usize,
}

impl MetricParams {
    pub const DEFAULT: Self = Self {
        phi: 0.7,
        theta: 1.0,
        omega: -0.3,
        steps: 1_000_000,
        system: SystemKind::Quartic,
        t: 50.0,
        dt: 1e-3,
        stride: 100,
    };
}

macro_rules! impl_default {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                Self::DEFAULT.clone()
            }
        }
    )*};
}
impl_default!(
    HaarCheckParams,
    ClassicalParams,
    WignerParams,
    ErgodicParams,
    PumpingParams,
    MetricParams
);

#[derive(Debug, Clone, PartialEq, Serialize, Subcommand)]
#[serde(untagged)]
pub enum Parameters {
    /// Finite-difference check of SO(3) left-translation Jacobians.
    HaarCheck(HaarCheckParams),
    /// Flow-map Jacobians, density transport and pair distances.
    Classical(ClassicalParams),
    /// Wigner evolution and the Moyal compressibility metric.
    Wigner(WignerParams),
    /// Orbit occupancy against the invariant measure.
    Ergodic(ErgodicParams),
    /// Upper-level occupancy series and its long-time average.
    Pumping(PumpingParams),
    /// Distance preservation under unitary evolution.
    Metric(MetricParams),
}

impl Parameters {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Parameters::HaarCheck(_) => ExperimentKind::HaarCheck,
            Parameters::Classical(_) => ExperimentKind::Classical,
            Parameters::Wigner(_) => ExperimentKind::Wigner,
            Parameters::Ergodic(_) => ExperimentKind::Ergodic,
            Parameters::Pumping(_) => ExperimentKind::Pumping,
            Parameters::Metric(_) => ExperimentKind::Metric,
        }
    }

    pub fn defaults(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::HaarCheck => Parameters::HaarCheck(Default::default()),
            ExperimentKind::Classical => Parameters::Classical(Default::default()),
            ExperimentKind::Wigner => Parameters::Wigner(Default::default()),
            ExperimentKind::Ergodic => Parameters::Ergodic(Default::default()),
            ExperimentKind::Pumping => Parameters::Pumping(Default::default()),
            ExperimentKind::Metric => Parameters::Metric(Default::default()),
        }
    }

    fn from_value(kind: ExperimentKind, v: Value) -> Result<Self, serde_json::Error> {
        Ok(match kind {
            ExperimentKind::HaarCheck => Parameters::HaarCheck(serde_json::from_value(v)?),
            ExperimentKind::Classical => Parameters::Classical(serde_json::from_value(v)?),
            ExperimentKind::Wigner => Parameters::Wigner(serde_json::from_value(v)?),
            ExperimentKind::Ergodic => Parameters::Ergodic(serde_json::from_value(v)?),
            ExperimentKind::Pumping => Parameters::Pumping(serde_json::from_value(v)?),
            ExperimentKind::Metric => Parameters::Metric(serde_json::from_value(v)?),
        })
    }
}

/// Fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub parameters: Parameters,
}

impl RunConfig {
    pub fn new(parameters: Parameters) -> Self {
        Self {
            experiment: parameters.kind(),
            seed: DEFAULT_SEED,
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
            format: OutputFormat::Csv,
            parameters,
        }
    }

    /// Layers a JSON document over `self`: top-level keys replace, and
    /// `parameters` keys replace individual parameters. Switching the
    /// experiment starts from that experiment's defaults.
    pub fn overlay(self, file: ConfigFile) -> Result<Self, CliError> {
        let experiment = file.experiment.unwrap_or(self.experiment);
        let base = if experiment == self.experiment {
            self.parameters
        } else {
            Parameters::defaults(experiment)
        };
        let mut merged =
            serde_json::to_value(&base).map_err(|e| CliError::Config(e.to_string()))?;
        if let (Some(over), Value::Object(into)) = (file.parameters, &mut merged) {
            into.extend(over);
        }
        let parameters = Parameters::from_value(experiment, merged)
            .map_err(|e| CliError::Config(format!("parameters: {e}")))?;
        Ok(Self {
            experiment,
            seed: file.seed.unwrap_or(self.seed),
            out_dir: file.out_dir.unwrap_or(self.out_dir),
            format: file.format.unwrap_or(self.format),
            parameters,
        })
    }
}

/// Contents of a `--config` file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub parameters: Option<Map<String, Value>>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "liouville-lab",
    version,
    about = "Phase-space and group-space measure experiments"
)]
pub struct Cli {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (created if absent).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// JSON file whose keys override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Parameters>,
}

impl Cli {
    /// Flags, then the config file, then the environment.
    pub fn resolve(self, env_out_dir: Option<PathBuf>) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => Some(ConfigFile::read(path)?),
            None => None,
        };
        let parameters = match (self.command, file.as_ref().and_then(|f| f.experiment)) {
            (Some(p), _) => p,
            (None, Some(kind)) => Parameters::defaults(kind),
            (None, None) => return Err(CliError::Config("no experiment given".into())),
        };
        let mut config = RunConfig::new(parameters);
        config.seed = self.seed.unwrap_or(config.seed);
        config.out_dir = self.out_dir.unwrap_or(config.out_dir);
        config.format = self.format.unwrap_or(config.format);
        if let Some(file) = file {
            config = config.overlay(file)?;
        }
        if let Some(dir) = env_out_dir {
            config.out_dir = dir;
        }
        Ok(config)
    }
}
