//! The five experiments: each maps a validated config to a tidy dataset,
//! and separately maps a dataset to its figures, so replotting never
//! re-simulates.

pub mod depletion;
pub mod growth;
pub mod heisenberg;
pub mod phase_diagram;
pub mod transient;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use su11_core::engine::Trajectory;
use su11_core::estimators::{ensemble_variance, VarianceEstimate};

use crate::config::{Experiment, ExperimentConfig};
use crate::dataset::DataSet;
use crate::plot::Figure;
use crate::CliError;

pub(crate) const INV_RT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn run(cfg: &ExperimentConfig) -> Result<DataSet, CliError> {
    match cfg.experiment {
        Experiment::PhaseDiagram => phase_diagram::run(cfg),
        Experiment::TransientSqueeze => transient::run(cfg),
        Experiment::HeisenbergScaling => heisenberg::run(cfg),
        Experiment::PumpDepletion => depletion::run(cfg),
        Experiment::GrowthLaw => growth::run(cfg),
    }
}

/// Figures for a dataset, keyed by file stem (`fig_<stem>.svg`).
pub fn figures(ds: &DataSet) -> Result<Vec<(String, Figure)>, CliError> {
    let kind = Experiment::from_name(&ds.experiment).ok_or_else(|| {
        CliError::Runtime(format!("dataset names unknown experiment {:?}", ds.experiment))
    })?;
    Ok(match kind {
        Experiment::PhaseDiagram => phase_diagram::figures(ds),
        Experiment::TransientSqueeze => transient::figures(ds),
        Experiment::HeisenbergScaling => heisenberg::figures(ds),
        Experiment::PumpDepletion => depletion::figures(ds),
        Experiment::GrowthLaw => growth::figures(ds),
    })
}

/// Squeezed cross-quadrature sample of one run at index `j`.
pub(crate) fn x_minus(t: &Trajectory, j: usize) -> f64 {
    (t.signal[j].re - t.idler[j].re) * INV_RT2
}

/// Antisqueezed cross-quadrature sample of one run at index `j`.
pub(crate) fn x_plus(t: &Trajectory, j: usize) -> f64 {
    (t.signal[j].re + t.idler[j].re) * INV_RT2
}

/// Ensemble variance of a per-run functional at one recorded index.
pub(crate) fn variance_at<F>(runs: &[Trajectory], f: F) -> Result<VarianceEstimate, CliError>
where
    F: Fn(&Trajectory) -> f64,
{
    let samples: Vec<f64> = runs.iter().map(f).collect();
    Ok(ensemble_variance(&samples)?)
}

/// Per-run drive strengths mu + spread * z with z clipped at three sigma,
/// deterministic in the seed.
pub(crate) fn jittered_drives(center: f64, spread: f64, n: u64, seed: u64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            center + spread * z.clamp(-3.0, 3.0)
        })
        .collect()
}

/// Sorted (x, y) pairs for line series (stable under grid order changes).
pub(crate) fn sorted_xy(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}
