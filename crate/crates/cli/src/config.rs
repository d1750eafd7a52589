//! Run configuration. Every struct rejects unknown keys so that a typo
//! fails loudly instead of silently falling back to a default.

use eprsim_core::control::GateParams;
use eprsim_core::measure::{CHSHSettings, WIGNER_ANGLES};
use eprsim_core::noise::NoiseConfig;
use eprsim_core::source::{DissociationMethod, DissociationSpec, GaussianPairState};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Chsh,
    Wigner,
    Fringes,
    Epr,
    Ghz,
    GatesVerify,
    Compile,
    Lint,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Chsh => "chsh",
            Experiment::Wigner => "wigner",
            Experiment::Fringes => "fringes",
            Experiment::Epr => "epr",
            Experiment::Ghz => "ghz",
            Experiment::GatesVerify => "gates-verify",
            Experiment::Compile => "compile",
            Experiment::Lint => "lint",
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File name stem; defaults to the experiment name.
    pub stem: Option<String>,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("results"),
            stem: None,
            format: Format::Both,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Free text carried into the outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Shots per setting; `0` selects analytic evaluation.
    #[serde(default)]
    pub shots: u64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub noise: NoiseConfig,
    /// Experiment-specific parameters, see the `*Params` types.
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        RunConfig {
            experiment,
            note: None,
            shots: 0,
            seed: None,
            noise: NoiseConfig::default(),
            params: Value::Null,
            output: OutputConfig::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Parses `params` into the experiment's parameter type, filling defaults.
    pub fn params<T: DeserializeOwned + Default>(&self) -> Result<T, CliError> {
        match &self.params {
            Value::Null => Ok(T::default()),
            v => serde_json::from_value(v.clone())
                .map_err(|e| CliError::Config(format!("params: {e}"))),
        }
    }

    pub fn stem(&self) -> &str {
        self.output
            .stem
            .as_deref()
            .unwrap_or(self.experiment.name())
    }

    pub fn check(&self) -> Result<(), CliError> {
        if self.shots > 0 && self.seed.is_none() {
            return Err(CliError::Config("`seed` is required when shots > 0".into()));
        }
        self.noise.validate()?;
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChshParams {
    pub settings: CHSHSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for WignerParams {
    fn default() -> Self {
        let (a, b, c) = WIGNER_ANGLES;
        WignerParams { a, b, c }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FringeParams {
    /// Phases per interferometer; the scan covers `grid_points²` pairs.
    pub grid_points: usize,
}

impl Default for FringeParams {
    fn default() -> Self {
        FringeParams { grid_points: 9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EprParams {
    pub dissociation: DissociationSpec,
    /// Molecular cloud size σ₀, µm.
    pub initial_size: f64,
    /// Imaging resolution, µm.
    pub sigma_img: f64,
    /// Time of flight, s.
    pub t_tof: f64,
    /// Overrides the dissociation model with an explicit Gaussian state
    /// (µm and ħ/µm).
    pub state: Option<GaussianPairState>,
}

impl Default for EprParams {
    fn default() -> Self {
        EprParams {
            dissociation: DissociationSpec {
                method: DissociationMethod::FieldSweep,
                timescale: 1e-3,
                mean_momentum: 200.0,
                momentum_spread: 0.02,
                binding_coupling: 1.0,
            },
            initial_size: 1e-4,
            sigma_img: 1.0,
            t_tof: 1.0,
            state: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GhzParams {
    pub labels: Vec<String>,
}

impl Default for GhzParams {
    fn default() -> Self {
        GhzParams {
            labels: ["ZZZZ", "XXXX", "XXYY", "YYYY", "ZIZI"]
                .map(String::from)
                .to_vec(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Scheme1,
    Scheme2,
    /// Scheme II with the phases taken at face value; fails verification.
    Scheme2Literal,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Scheme1 => "scheme1",
            Scheme::Scheme2 => "scheme2",
            Scheme::Scheme2Literal => "scheme2_literal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GatesParams {
    /// Grid of `2·half_steps + 1` angles spanning `[−2π, 2π]`, with θ = 0 at
    /// its centre. Ignored when `thetas` is given.
    pub half_steps: usize,
    pub thetas: Option<Vec<f64>>,
    pub schemes: Vec<Scheme>,
    pub targets: Vec<usize>,
    pub gate: GateParams,
    /// Static frequency offset (Hz) of sites outside the ramp windows.
    pub static_shift: f64,
    pub tolerance: f64,
}

impl Default for GatesParams {
    fn default() -> Self {
        GatesParams {
            half_steps: 50,
            thetas: None,
            schemes: vec![Scheme::Scheme1, Scheme::Scheme2],
            targets: vec![0],
            gate: GateParams {
                site_count: 3,
                ..GateParams::default()
            },
            static_shift: 250.0,
            tolerance: 1e-10,
        }
    }
}

impl GatesParams {
    pub fn grid(&self) -> Vec<f64> {
        if let Some(t) = &self.thetas {
            return t.clone();
        }
        let m = self.half_steps.max(1) as i64;
        (-m..=m)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 / m as f64)
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeqParams {
    /// Path to the `.seq` program, relative to the working directory.
    pub source: PathBuf,
    /// Rabi frequency (Hz) for pulses without `rabi`.
    pub rabi: Option<f64>,
    /// Edge duration (s) for ramps without `dur`.
    pub ramp_duration: Option<f64>,
}
