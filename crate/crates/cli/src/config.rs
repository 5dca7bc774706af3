//! Configuration schema and validation for the experiment runner.
//!
//! Configs are TOML, versioned through `schema_version`. Frequencies are
//! given in Hz (cycles per second) and converted to angular rates
//! internally; all times are in seconds. Validation is fail-fast but
//! complete: every violated precondition is reported in one pass before
//! any computation starts.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use su11_core::engine::StepConfig;
use su11_core::model::modes::ModePair;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    PhaseDiagram,
    TransientSqueeze,
    HeisenbergScaling,
    PumpDepletion,
    GrowthLaw,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::PhaseDiagram => "phase-diagram",
            Experiment::TransientSqueeze => "transient-squeeze",
            Experiment::HeisenbergScaling => "heisenberg-scaling",
            Experiment::PumpDepletion => "pump-depletion",
            Experiment::GrowthLaw => "growth-law",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "phase-diagram" => Experiment::PhaseDiagram,
            "transient-squeeze" => Experiment::TransientSqueeze,
            "heisenberg-scaling" => Experiment::HeisenbergScaling,
            "pump-depletion" => Experiment::PumpDepletion,
            "growth-law" => Experiment::GrowthLaw,
            _ => return None,
        })
    }
}

// Raw on-disk schema. Every section is optional and falls back to the
// hardware-inspired defaults below.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    /// Optional redundant experiment name; must match the subcommand.
    experiment: Option<String>,
    #[serde(default)]
    modes: RawModes,
    #[serde(default)]
    drive: RawDrive,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModes {
    /// Signal frequency in Hz.
    #[serde(default = "default_omega_s")]
    omega_s_hz: f64,
    /// Idler frequency in Hz.
    #[serde(default = "default_omega_i")]
    omega_i_hz: f64,
    /// Signal linewidth in Hz.
    #[serde(default = "default_gamma_s")]
    gamma_s_hz: f64,
    /// Idler linewidth in Hz.
    #[serde(default = "default_gamma_i")]
    gamma_i_hz: f64,
}

fn default_omega_s() -> f64 {
    1.233e6
}
fn default_omega_i() -> f64 {
    1.466e6
}
fn default_gamma_s() -> f64 {
    0.083
}
fn default_gamma_i() -> f64 {
    0.108
}

impl Default for RawModes {
    fn default() -> Self {
        Self {
            omega_s_hz: default_omega_s(),
            omega_i_hz: default_omega_i(),
            gamma_s_hz: default_gamma_s(),
            gamma_i_hz: default_gamma_i(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    /// Center drive strength (pump power over threshold power).
    #[serde(default = "default_mu")]
    mu: f64,
    /// Run-to-run spread of the drive strength.
    #[serde(default = "default_mu_spread")]
    mu_spread: f64,
    /// Thermal envelope scale of the three-mode model.
    #[serde(default = "default_epsilon")]
    thermal_amplitude: f64,
}

fn default_mu() -> f64 {
    38.0
}
fn default_mu_spread() -> f64 {
    5.0
}
fn default_epsilon() -> f64 {
    1e-3
}

impl Default for RawDrive {
    fn default() -> Self {
        Self {
            mu: default_mu(),
            mu_spread: default_mu_spread(),
            thermal_amplitude: default_epsilon(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    /// Drive strengths to sweep.
    #[serde(default)]
    mu: Vec<f64>,
    /// Amplifier pulse lengths to sweep, in seconds.
    #[serde(default)]
    t_pa: Vec<f64>,
    /// Stopping parameters k (pulse ends k floors above the squeezing floor).
    #[serde(default)]
    k: Vec<f64>,
    /// Coherent envelope seeds for the depletion study.
    #[serde(default)]
    seed_amp: Vec<f64>,
    /// Coherent signal seed for phase sensing.
    #[serde(default = "default_alpha_s")]
    alpha_s: f64,
}

fn default_alpha_s() -> f64 {
    1000.0
}

impl Default for RawGrid {
    fn default() -> Self {
        Self {
            mu: Vec::new(),
            t_pa: Vec::new(),
            k: Vec::new(),
            seed_amp: Vec::new(),
            alpha_s: default_alpha_s(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    /// Ensemble size (runs per grid point / measurement windows).
    #[serde(default = "default_ensemble")]
    ensemble: u64,
    #[serde(default)]
    base_seed: u64,
    /// Integrator step in seconds; omit for an automatic stable choice.
    dt: Option<f64>,
    /// Measurement window length in seconds.
    tau_m: Option<f64>,
    /// Output directory (overridable with --out).
    #[serde(default = "default_out_dir")]
    out_dir: PathBuf,
}

fn default_ensemble() -> u64 {
    236
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("su11-out")
}

impl Default for RawRun {
    fn default() -> Self {
        Self {
            ensemble: default_ensemble(),
            base_seed: 0,
            dt: None,
            tau_m: None,
            out_dir: default_out_dir(),
        }
    }
}

/// Fully validated run description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Signal/idler pair with angular rates (no coherent seeds).
    pub modes: ModePair,
    pub mu: f64,
    pub mu_spread: f64,
    pub thermal_amplitude: f64,
    pub mu_grid: Vec<f64>,
    pub t_pa_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub seed_grid: Vec<f64>,
    pub alpha_s: f64,
    pub ensemble: u64,
    pub base_seed: u64,
    /// Explicit step, if the config pinned one.
    pub dt: Option<f64>,
    pub tau_m: Option<f64>,
    pub out_dir: PathBuf,
    /// SHA-256 of the config file bytes, for provenance.
    pub config_sha256: String,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub runs: Option<u64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path, experiment: Experiment, overrides: &Overrides) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| {
            CliError::Validation(vec![format!("cannot read config {}: {e}", path.display())])
        })?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Validation(vec!["config is not valid UTF-8".into()]))?;
        let raw: RawConfig = toml::from_str(&text)
            .map_err(|e| CliError::Validation(vec![format!("config parse error: {e}")]))?;
        let sha = hex::encode(Sha256::digest(&bytes));
        Self::from_raw(raw, experiment, overrides, sha)
    }

    fn from_raw(
        raw: RawConfig,
        experiment: Experiment,
        overrides: &Overrides,
        config_sha256: String,
    ) -> Result<Self, CliError> {
        let mut errors = Vec::new();

        if raw.schema_version != SCHEMA_VERSION {
            errors.push(format!(
                "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
                raw.schema_version
            ));
        }
        if let Some(name) = &raw.experiment {
            match Experiment::from_name(name) {
                Some(kind) if kind == experiment => {}
                Some(kind) => errors.push(format!(
                    "config declares experiment \"{}\" but \"{}\" was requested",
                    kind.name(),
                    experiment.name()
                )),
                None => errors.push(format!("unknown experiment \"{name}\" in config")),
            }
        }

        let tau = std::f64::consts::TAU;
        let modes = ModePair::new(
            tau * raw.modes.omega_s_hz,
            tau * raw.modes.omega_i_hz,
            tau * raw.modes.gamma_s_hz,
            tau * raw.modes.gamma_i_hz,
        );
        let modes = match modes {
            Ok(m) => Some(m),
            Err(e) => {
                errors.push(format!("modes: {e}"));
                None
            }
        };

        let drive = &raw.drive;
        if !drive.mu.is_finite() || drive.mu < 0.0 {
            errors.push(format!("drive.mu must be >= 0, got {}", drive.mu));
        }
        if !drive.mu_spread.is_finite() || drive.mu_spread < 0.0 {
            errors.push(format!(
                "drive.mu_spread must be >= 0, got {}",
                drive.mu_spread
            ));
        }
        if !drive.thermal_amplitude.is_finite() || drive.thermal_amplitude < 0.0 {
            errors.push(format!(
                "drive.thermal_amplitude must be >= 0, got {}",
                drive.thermal_amplitude
            ));
        }

        let grid = &raw.grid;
        for (name, values) in [("grid.mu", &grid.mu), ("grid.t_pa", &grid.t_pa)] {
            for (i, v) in values.iter().enumerate() {
                if !v.is_finite() {
                    errors.push(format!("{name}[{i}] must be finite, got {v}"));
                }
            }
        }
        if !grid.alpha_s.is_finite() || grid.alpha_s <= 0.0 {
            errors.push(format!(
                "grid.alpha_s must be positive, got {}",
                grid.alpha_s
            ));
        }

        let ensemble = overrides.runs.unwrap_or(raw.run.ensemble);
        if ensemble < 2 {
            errors.push(format!(
                "run.ensemble must be at least 2 for variance estimates, got {ensemble}"
            ));
        }
        let base_seed = overrides.seed.unwrap_or(raw.run.base_seed);

        if let Some(dt) = raw.run.dt {
            if !dt.is_finite() || dt <= 0.0 {
                errors.push(format!("run.dt must be positive, got {dt}"));
            }
        }
        if let Some(tm) = raw.run.tau_m {
            if !tm.is_finite() || tm <= 0.0 {
                errors.push(format!("run.tau_m must be positive, got {tm}"));
            }
        }

        // Experiment-specific grid preconditions.
        match experiment {
            Experiment::PhaseDiagram => {
                if grid.mu.is_empty() {
                    errors.push("phase-diagram needs a nonempty grid.mu".into());
                } else {
                    for (i, &m) in grid.mu.iter().enumerate() {
                        if m == 1.0 {
                            errors.push(format!(
                                "grid.mu[{i}] = 1 sits exactly on threshold, where no \
                                 steady state exists"
                            ));
                        } else if !(m >= 0.0) {
                            errors.push(format!("grid.mu[{i}] must be >= 0, got {m}"));
                        }
                    }
                    let below = grid.mu.iter().any(|&m| m < 1.0);
                    let above = grid.mu.iter().any(|&m| m > 1.0);
                    if !(below && above) {
                        errors.push(
                            "phase-diagram grid.mu must span both sides of the threshold mu = 1"
                                .into(),
                        );
                    }
                }
                if raw.run.tau_m.is_none() {
                    errors.push(
                        "phase-diagram needs run.tau_m (finite measurement windows)".into(),
                    );
                }
                // Above-threshold fluctuations are reported relative to the
                // thermal scale, so it cannot vanish.
                if grid.mu.iter().any(|&m| m > 1.0) && !(raw.drive.thermal_amplitude > 0.0) {
                    errors.push(format!(
                        "drive.thermal_amplitude must be positive to normalize \
                         above-threshold fluctuations, got {}",
                        raw.drive.thermal_amplitude
                    ));
                }
            }
            Experiment::TransientSqueeze => {
                if drive.mu <= 0.0 {
                    errors.push(format!(
                        "transient-squeeze needs drive.mu > 0, got {}",
                        drive.mu
                    ));
                }
            }
            Experiment::HeisenbergScaling => {
                if grid.mu.len() < 3 {
                    errors.push(format!(
                        "heisenberg-scaling fits a scaling exponent and needs at least \
                         3 grid.mu points, got {}",
                        grid.mu.len()
                    ));
                }
                if grid.k.is_empty() {
                    errors.push("heisenberg-scaling needs a nonempty grid.k".into());
                }
                if let (Some(&k), false) = (grid.k.first(), grid.mu.is_empty()) {
                    if !k.is_finite() || k <= 0.0 {
                        errors.push(format!("grid.k[0] must be positive, got {k}"));
                    } else {
                        for (i, &m) in grid.mu.iter().enumerate() {
                            if !(k * m > 1.0) {
                                errors.push(format!(
                                    "grid.mu[{i}] = {m} gives k*mu <= 1: no positive pulse length"
                                ));
                            }
                        }
                        // The gain sweep must cover at least two decades.
                        let gains: Vec<f64> = grid
                            .mu
                            .iter()
                            .filter(|&&m| k * m > 1.0 && m > 0.0)
                            .map(|&m| (k * m).powf(m / (1.0 + m)))
                            .collect();
                        if gains.len() >= 2 {
                            let lo = gains.iter().cloned().fold(f64::INFINITY, f64::min);
                            let hi = gains.iter().cloned().fold(0.0f64, f64::max);
                            if (hi / lo).log10() < 2.0 {
                                errors.push(format!(
                                    "grid.mu spans only {:.2} decades of G^2; need >= 2",
                                    (hi / lo).log10()
                                ));
                            }
                        }
                    }
                }
                if grid.alpha_s < 10.0 {
                    errors.push(format!(
                        "grid.alpha_s = {} is too small for the mean-field sensitivity \
                         formula (need >= 10)",
                        grid.alpha_s
                    ));
                }
                for (i, &t) in grid.t_pa.iter().enumerate() {
                    if !(t > 0.0) {
                        errors.push(format!("grid.t_pa[{i}] must be positive, got {t}"));
                    }
                }
            }
            Experiment::PumpDepletion => {
                if grid.mu.is_empty() {
                    errors.push("pump-depletion needs a nonempty grid.mu".into());
                }
                for (i, &m) in grid.mu.iter().enumerate() {
                    if !(m > 1.0) {
                        errors.push(format!(
                            "pump-depletion grid.mu[{i}] must be above threshold (> 1), got {m}"
                        ));
                    }
                }
                if grid.seed_amp.is_empty() {
                    errors.push("pump-depletion needs a nonempty grid.seed_amp".into());
                }
                for (i, &s) in grid.seed_amp.iter().enumerate() {
                    if !s.is_finite() || s < 0.0 {
                        errors.push(format!("grid.seed_amp[{i}] must be >= 0, got {s}"));
                    }
                }
            }
            Experiment::GrowthLaw => {
                if grid.mu.len() < 3 {
                    errors.push(format!(
                        "growth-law fits rate and amplitude laws and needs at least \
                         3 grid.mu points, got {}",
                        grid.mu.len()
                    ));
                }
                for (i, &m) in grid.mu.iter().enumerate() {
                    if !(m > 1.0) {
                        errors.push(format!(
                            "growth-law grid.mu[{i}] must be above threshold (> 1), got {m}"
                        ));
                    }
                }
            }
        }

        // With the grid known, a pinned dt must satisfy the stability bound
        // for the stiffest grid point.
        if let (Some(dt), Some(m)) = (raw.run.dt, &modes) {
            if dt > 0.0 {
                let mu_max = mu_ceiling(experiment, drive.mu, drive.mu_spread, &grid.mu);
                let bound = StepConfig::max_stable_dt(m.gamma_bar(), mu_max);
                if dt > bound {
                    errors.push(format!(
                        "run.dt = {dt} exceeds the stable bound {bound:.3e} s for the \
                         largest drive in this config"
                    ));
                }
            }
        }

        if !errors.is_empty() {
            return Err(CliError::Validation(errors));
        }

        Ok(Self {
            experiment,
            modes: modes.expect("validated above"),
            mu: drive.mu,
            mu_spread: drive.mu_spread,
            thermal_amplitude: drive.thermal_amplitude,
            mu_grid: grid.mu.clone(),
            t_pa_grid: grid.t_pa.clone(),
            k_grid: grid.k.clone(),
            seed_grid: grid.seed_amp.clone(),
            alpha_s: grid.alpha_s,
            ensemble,
            base_seed,
            dt: raw.run.dt,
            tau_m: raw.run.tau_m,
            out_dir: overrides.out.clone().unwrap_or(raw.run.out_dir),
            config_sha256,
        })
    }

    /// Mean angular damping rate of the pair.
    pub fn gamma_bar(&self) -> f64 {
        self.modes.gamma_bar()
    }

    /// Step for a segment whose drive never exceeds `mu_max`: the pinned
    /// value if the config set one, otherwise half the stability bound.
    pub fn step_for(&self, mu_max: f64) -> f64 {
        let auto = 0.5 * StepConfig::max_stable_dt(self.gamma_bar(), mu_max);
        match self.dt {
            Some(dt) => dt.min(auto * 2.0),
            None => auto,
        }
    }
}

/// Largest drive any run of this experiment can see (spread draws are
/// clipped at three sigma).
pub fn mu_ceiling(experiment: Experiment, mu: f64, mu_spread: f64, mu_grid: &[f64]) -> f64 {
    let grid_max = mu_grid.iter().cloned().fold(0.0f64, f64::max);
    match experiment {
        Experiment::TransientSqueeze => mu + 3.0 * mu_spread,
        _ => grid_max.max(1.0),
    }
}
