//! Experiment configuration (JSON).
//!
//! Top level: `scenario`, `model`, `sampler`, `recovery`, `trials`, `seed`,
//! `grid_density_factor`, `output`. The `scenario` tag selects the shapes of
//! `model`, `sampler` and `recovery`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use subnyq::sampling::SignRendering;
use subnyq::spectral::FrameRoot;
use subnyq::BandContent;

use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub scenario: Scenario,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Simulation grid rate as a multiple of the Nyquist rate.
    #[serde(default = "ten")]
    pub grid_density_factor: usize,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum Scenario {
    Mwc {
        model: MultibandModel,
        sampler: MwcSampler,
        #[serde(default)]
        recovery: MwcRecovery,
    },
    Pns {
        model: PnsModel,
        #[serde(default)]
        sampler: PnsSampler,
        #[serde(default)]
        recovery: PnsRecovery,
    },
    Rd {
        model: HarmonicModel,
        sampler: RdSampler,
        #[serde(default)]
        recovery: RdRecovery,
    },
    Fri {
        model: FriModel,
        #[serde(default)]
        sampler: FriSampler,
        #[serde(default)]
        recovery: FriRecovery,
    },
    Bounds {
        model: BoundsModel,
        sampler: BoundsSampler,
    },
    Density {
        model: DensityModel,
    },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Mwc { .. } => "mwc",
            Scenario::Pns { .. } => "pns",
            Scenario::Rd { .. } => "rd",
            Scenario::Fri { .. } => "fri",
            Scenario::Bounds { .. } => "bounds",
            Scenario::Density { .. } => "density",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputConfig {
    /// Directory for `trials.csv`, `timings.csv` and `summary.json`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

/// Real multiband input with `bands` (= N, even) bands of width `band_width`
/// and carriers drawn per trial inside the MWC's covered band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultibandModel {
    pub f_nyq: f64,
    pub bands: usize,
    pub band_width: f64,
    #[serde(default = "gaussian_content")]
    pub content: BandContent<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MwcSampler {
    pub channels: usize,
    /// `M = 2L + 1`; `f_p = f_nyq / M`.
    pub chips: usize,
    /// Samples per channel `T`; the record lasts `T / f_p`.
    pub samples_per_channel: usize,
    #[serde(default)]
    pub pattern_seed: u64,
    #[serde(default)]
    pub rendering: SignRendering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MwcRecovery {
    /// Defaults to `2N`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparsity_bound: Option<usize>,
    pub eig_tol: f64,
    pub residual_tol: f64,
    pub frame: FrameRoot,
    pub symmetrize: bool,
    pub nmse_tol: f64,
}

impl Default for MwcRecovery {
    fn default() -> Self {
        Self {
            sparsity_bound: None,
            eig_tol: 1e-12,
            residual_tol: 1e-9,
            frame: FrameRoot::Eigen,
            symmetrize: true,
            nmse_tol: 1e-4,
        }
    }
}

/// Real bandpass input on the open band `(f_lower, f_upper)`; each trial draws
/// one transmission of width `fill · B` at a random position inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnsModel {
    pub f_lower: f64,
    pub f_upper: f64,
    #[serde(default = "default_fill")]
    pub fill: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PnsSampler {
    /// `N_s` samples per channel.
    pub samples_per_channel: usize,
    /// Second-channel delay `φ`; chosen by grid search when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
}

impl Default for PnsSampler {
    fn default() -> Self {
        Self {
            samples_per_channel: 64,
            phase: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PnsRecovery {
    pub nmse_tol: f64,
}

impl Default for PnsRecovery {
    fn default() -> Self {
        Self { nmse_tol: 1e-6 }
    }
}

/// `tones` random tones on the `W`-point grid, each displaced by `mismatch`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicModel {
    pub tone_grid_size: usize,
    pub tones: usize,
    #[serde(default)]
    pub mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdSampler {
    pub rate: usize,
    /// Fixed chipping sequence; a fresh one per trial when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chip_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RdRecovery {
    pub residual_tol: f64,
    pub nmse_tol: f64,
}

impl Default for RdRecovery {
    fn default() -> Self {
        Self {
            residual_tol: 1e-9,
            nmse_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriModel {
    pub pulses: usize,
    #[serde(default = "unit")]
    pub period: f64,
    /// Minimum circular delay gap as a fraction of `τ / L`.
    #[serde(default = "default_gap")]
    pub min_separation: f64,
    #[serde(default)]
    pub real: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    #[default]
    Lowpass,
    /// Sum of sincs with unit weights.
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FriSampler {
    pub kernel: KernelKind,
    /// Index pairs beyond `±L`: `K = −(L + extra_pairs)..=L + extra_pairs`.
    pub extra_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FriRecovery {
    /// Bound on the delay error, relative to `τ`.
    pub delay_tol: f64,
    pub amplitude_tol: f64,
}

impl Default for FriRecovery {
    fn default() -> Self {
        Self {
            delay_tol: 1e-6,
            amplitude_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsModel {
    pub f_nyq: f64,
    pub bands: usize,
    pub band_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSampler {
    pub channels: usize,
    pub f_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// `r`-node Gauss-Legendre rule on every chip.
    #[default]
    GaussLegendre,
    /// `r` equally spaced midpoints per chip.
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    pub chips: usize,
    #[serde(default)]
    pub pattern_seed: u64,
    pub densities: Vec<usize>,
    #[serde(default)]
    pub rule: QuadratureRule,
}

fn one() -> usize {
    1
}

fn ten() -> usize {
    10
}

fn unit() -> f64 {
    1.0
}

fn default_fill() -> f64 {
    0.8
}

fn default_gap() -> f64 {
    0.25
}

fn gaussian_content() -> BandContent<f64> {
    BandContent::Gaussian { amplitude: 1.0 }
}

/// Top level as read from disk; sections are decoded once the scenario is
/// known so that errors keep their field path.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    scenario: String,
    model: Option<Value>,
    sampler: Option<Value>,
    recovery: Option<Value>,
    #[serde(default = "one")]
    trials: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "ten")]
    grid_density_factor: usize,
    #[serde(default)]
    output: OutputConfig,
}

fn section<T: DeserializeOwned>(name: &str, v: Option<Value>) -> Result<T, HarnessError> {
    let v = v.ok_or_else(|| bad(name, "missing section"))?;
    serde_path_to_error::deserialize(v).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." { name.to_string() } else { format!("{name}.{inner}") };
        bad(&path, e.into_inner().to_string())
    })
}

fn section_or_default<T: DeserializeOwned + Default>(name: &str, v: Option<Value>) -> Result<T, HarnessError> {
    match v {
        Some(v) => section(name, Some(v)),
        None => Ok(T::default()),
    }
}

fn bad(path: &str, msg: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        path: path.to_string(),
        message: msg.into(),
    }
}

fn positive(path: &str, v: f64) -> Result<(), HarnessError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(path, "must be a positive number"))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let env: Envelope = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            bad(&path, e.into_inner().to_string())
        })?;
        let scenario = match env.scenario.as_str() {
            "mwc" => Scenario::Mwc {
                model: section("model", env.model)?,
                sampler: section("sampler", env.sampler)?,
                recovery: section_or_default("recovery", env.recovery)?,
            },
            "pns" => Scenario::Pns {
                model: section("model", env.model)?,
                sampler: section_or_default("sampler", env.sampler)?,
                recovery: section_or_default("recovery", env.recovery)?,
            },
            "rd" => Scenario::Rd {
                model: section("model", env.model)?,
                sampler: section("sampler", env.sampler)?,
                recovery: section_or_default("recovery", env.recovery)?,
            },
            "fri" => Scenario::Fri {
                model: section("model", env.model)?,
                sampler: section_or_default("sampler", env.sampler)?,
                recovery: section_or_default("recovery", env.recovery)?,
            },
            "bounds" => Scenario::Bounds {
                model: section("model", env.model)?,
                sampler: section("sampler", env.sampler)?,
            },
            "density" => Scenario::Density {
                model: section("model", env.model)?,
            },
            other => {
                return Err(bad(
                    "scenario",
                    format!("unknown scenario `{other}`, expected one of mwc, pns, rd, fri, bounds, density"),
                ))
            }
        };
        let cfg = ExperimentConfig {
            scenario,
            trials: env.trials,
            seed: env.seed,
            grid_density_factor: env.grid_density_factor,
            output: env.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Field-level checks beyond what the schema enforces.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(bad("trials", "must be at least 1"));
        }
        if self.grid_density_factor == 0 {
            return Err(bad("grid_density_factor", "must be at least 1"));
        }
        match &self.scenario {
            Scenario::Mwc { model, sampler, recovery } => {
                positive("model.f_nyq", model.f_nyq)?;
                positive("model.band_width", model.band_width)?;
                if model.bands == 0 || model.bands % 2 != 0 {
                    return Err(bad("model.bands", "must be a positive even number"));
                }
                if matches!(model.content, BandContent::Constant { .. }) {
                    return Err(bad("model.content", "constant content needs on-bin carriers; use gaussian or zero"));
                }
                if sampler.chips % 2 == 0 {
                    return Err(bad("sampler.chips", "must be odd"));
                }
                if sampler.channels == 0 {
                    return Err(bad("sampler.channels", "must be positive"));
                }
                if sampler.samples_per_channel == 0 {
                    return Err(bad("sampler.samples_per_channel", "must be positive"));
                }
                if let Some(k) = recovery.sparsity_bound {
                    if k > sampler.channels {
                        return Err(bad("recovery.sparsity_bound", "cannot exceed the channel count"));
                    }
                }
                positive("recovery.nmse_tol", recovery.nmse_tol)?;
            }
            Scenario::Pns { model, sampler, recovery } => {
                positive("model.f_lower", model.f_lower)?;
                if !(model.f_upper > model.f_lower) {
                    return Err(bad("model.f_upper", "must exceed f_lower"));
                }
                if !(model.fill > 0.0 && model.fill < 1.0) {
                    return Err(bad("model.fill", "must lie in (0, 1)"));
                }
                if sampler.samples_per_channel == 0 {
                    return Err(bad("sampler.samples_per_channel", "must be positive"));
                }
                if let Some(phi) = sampler.phase {
                    let ts = 1.0 / (model.f_upper - model.f_lower);
                    if !(phi > 0.0 && phi < ts) {
                        return Err(bad("sampler.phase", "must lie in (0, 1/B)"));
                    }
                }
                positive("recovery.nmse_tol", recovery.nmse_tol)?;
            }
            Scenario::Rd { model, sampler, recovery } => {
                if model.tone_grid_size == 0 || model.tones == 0 {
                    return Err(bad("model", "tone_grid_size and tones must be positive"));
                }
                if !(0.0..=0.5).contains(&model.mismatch) {
                    return Err(bad("model.mismatch", "must lie in [0, 0.5]"));
                }
                if sampler.rate == 0 || model.tone_grid_size % sampler.rate != 0 {
                    return Err(bad("sampler.rate", "must divide tone_grid_size"));
                }
                if model.tones > sampler.rate {
                    return Err(bad("model.tones", "cannot exceed the measurement count"));
                }
                positive("recovery.nmse_tol", recovery.nmse_tol)?;
            }
            Scenario::Fri { model, recovery, .. } => {
                if model.pulses == 0 {
                    return Err(bad("model.pulses", "must be positive"));
                }
                positive("model.period", model.period)?;
                if !(model.min_separation > 0.0 && model.min_separation <= 1.0) {
                    return Err(bad("model.min_separation", "must lie in (0, 1]"));
                }
                positive("recovery.delay_tol", recovery.delay_tol)?;
                positive("recovery.amplitude_tol", recovery.amplitude_tol)?;
            }
            Scenario::Bounds { model, sampler } => {
                positive("model.f_nyq", model.f_nyq)?;
                positive("model.band_width", model.band_width)?;
                if model.bands == 0 {
                    return Err(bad("model.bands", "must be positive"));
                }
                positive("sampler.f_s", sampler.f_s)?;
            }
            Scenario::Density { model } => {
                if model.chips == 0 {
                    return Err(bad("model.chips", "must be positive"));
                }
                if model.densities.is_empty() || model.densities.contains(&0) {
                    return Err(bad("model.densities", "need at least one density, each at least 1"));
                }
                if model.densities.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(bad("model.densities", "must be strictly increasing"));
                }
            }
        }
        Ok(())
    }
}
