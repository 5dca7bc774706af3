//! Pump depletion from coherent seeding, against the quadratic prediction.
//!
//! A seeded pair drains the pump as it amplifies: the fractional drive
//! drop eta grows like G^2 s_s s_i / mu0 at the squeezing-saturation pulse
//! length. The experiment measures eta per (drive, seed) grid point both
//! deterministically and with thermal noise, and records the squeezing
//! trajectory with and without the depletion back-action.

use num_complex::Complex64;
use rayon::prelude::*;

use su11_core::engine::{
    integrate_three_mode, three_mode_ensemble, two_mode_ensemble, PulseSequence, StepConfig,
    ThreeModeParams, Trajectory,
};
use su11_core::estimators::{ensemble_variance, eta_predicted, pump_depletion_factor};
use su11_core::model::analytic::squeezed_variance_t;

use crate::config::ExperimentConfig;
use crate::dataset::{DataSet, Provenance};
use crate::plot::{Figure, Series};
use crate::CliError;

use super::{variance_at, x_minus};

struct PointResult {
    mu0: f64,
    seed: f64,
    t_pa: f64,
    eta_sat: f64,
    eta_asym: f64,
    eta_det: f64,
    eta_mc: (f64, f64),
    /// (time, depleted variance, std error) per recorded index.
    depleted: Vec<(f64, f64, f64)>,
}

fn point(cfg: &ExperimentConfig, mu0: f64, seed: f64, index: u64) -> Result<PointResult, CliError> {
    let gamma = cfg.gamma_bar();
    let k = cfg.k_grid.first().copied().unwrap_or(10.0);
    let t_pa = (k * mu0).ln() / (gamma * (1.0 + mu0));
    let dt = cfg.step_for(mu0);
    let steps = (t_pa / dt).ceil() as usize;
    let step = StepConfig::new(dt).with_stride((steps / 24).max(1));
    let seq = PulseSequence::constant_drive(mu0, t_pa)?;
    let s = Complex64::new(seed, 0.0);

    let predicted = eta_predicted(mu0, seed, seed)?;

    let det_params = ThreeModeParams::new(cfg.modes.gamma_s, cfg.modes.gamma_i, 200.0 * gamma, mu0)
        .with_seeds(s, s)
        .with_thermal_amplitude(0.0);
    let det_traj = integrate_three_mode(&det_params, &seq, &step, cfg.base_seed)?;
    let eta_det = pump_depletion_factor(&det_traj)?;

    let eps = cfg.thermal_amplitude;
    let noisy = det_params.with_thermal_amplitude(eps);
    let ens = three_mode_ensemble(
        &noisy,
        &seq,
        &step,
        cfg.ensemble,
        cfg.base_seed.wrapping_add(index),
    )?;
    let etas: Result<Vec<f64>, su11_core::Error> =
        ens.runs.iter().map(pump_depletion_factor).collect();
    let etas = etas?;
    let mean = etas.iter().sum::<f64>() / etas.len() as f64;
    let se = (ensemble_variance(&etas)?.value / etas.len() as f64).sqrt();

    // Squeezing trajectory with the depletion back-action, thermal units.
    let scale = if eps > 0.0 { eps * eps } else { 1.0 };
    let times = &ens.runs[0].times;
    let mut depleted = Vec::with_capacity(times.len());
    for (j, &t) in times.iter().enumerate() {
        let v = variance_at(&ens.runs, |r: &Trajectory| x_minus(r, j))?;
        depleted.push((t, v.value / scale, v.std_error / scale));
    }

    Ok(PointResult {
        mu0,
        seed,
        t_pa,
        eta_sat: predicted.at_saturation,
        eta_asym: predicted.asymptotic,
        eta_det,
        eta_mc: (mean, se),
        depleted,
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<DataSet, CliError> {
    let gamma = cfg.gamma_bar();
    let grid: Vec<(f64, f64)> = cfg
        .mu_grid
        .iter()
        .flat_map(|&m| cfg.seed_grid.iter().map(move |&s| (m, s)))
        .collect();
    let results: Result<Vec<PointResult>, CliError> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(m, s))| point(cfg, m, s, 10_000 * (1 + i as u64)))
        .collect();
    let results = results?;

    let mut ds = DataSet::new(
        "pump-depletion",
        &["mu0", "seed_amp", "time"],
        Provenance::new(&cfg.config_sha256, cfg.base_seed),
    );

    for r in &results {
        let key = [r.mu0, r.seed, r.t_pa];
        ds.push(&key, "eta_predicted_saturation", r.eta_sat, None)?;
        ds.push(&key, "eta_predicted_asymptotic", r.eta_asym, None)?;
        ds.push(&key, "eta_measured_det", r.eta_det, None)?;
        ds.push(&key, "eta_measured_mc", r.eta_mc.0, Some(r.eta_mc.1))?;
        for &(t, v, e) in &r.depleted {
            ds.push(
                &[r.mu0, r.seed, t],
                "squeezed_variance_depleted_mc",
                v,
                Some(e),
            )?;
        }
    }

    // Depletion-free reference per drive value: the linear pair under the
    // same pulse, plus the closed form.
    for &mu0 in &cfg.mu_grid {
        let k = cfg.k_grid.first().copied().unwrap_or(10.0);
        let t_pa = (k * mu0).ln() / (gamma * (1.0 + mu0));
        let dt = cfg.step_for(mu0);
        let steps = (t_pa / dt).ceil() as usize;
        let step = StepConfig::new(dt).with_stride((steps / 24).max(1));
        let seq = PulseSequence::constant_drive(mu0, t_pa)?;
        let ens = two_mode_ensemble(
            &cfg.modes,
            &seq,
            &step,
            cfg.ensemble,
            cfg.base_seed.wrapping_add(500_000),
        )?;
        for (j, &t) in ens.runs[0].times.iter().enumerate() {
            let v = variance_at(&ens.runs, |r: &Trajectory| x_minus(r, j))?;
            ds.push(
                &[mu0, -1.0, t],
                "squeezed_variance_ideal_mc",
                v.value,
                Some(v.std_error),
            )?;
            ds.push(
                &[mu0, -1.0, t],
                "squeezed_variance_analytic",
                squeezed_variance_t(mu0, gamma, t)?,
                None,
            )?;
        }
    }
    Ok(ds)
}

pub fn figures(ds: &DataSet) -> Vec<(String, Figure)> {
    // eta vs seed amplitude (log axes drop the zero-seed control point).
    let eta_series = |q: &str, label: &str, as_line: bool| {
        let mut pts: Vec<(f64, f64)> = ds
            .rows
            .iter()
            .filter(|r| r.quantity == q)
            .map(|r| (r.params[1], r.value))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if as_line {
            Series::line(label, pts)
        } else {
            Series::points(label, pts, None)
        }
    };
    let eta = Figure::new(
        "Pump depletion vs seed amplitude",
        "seed amplitude",
        "depletion eta",
    )
    .log_log()
    .with(eta_series("eta_predicted_saturation", "predicted", true))
    .with(eta_series("eta_measured_det", "deterministic", false))
    .with(eta_series("eta_measured_mc", "thermal ensemble", false));

    // Squeezing with/without back-action at the largest seed.
    let s_max = ds
        .rows
        .iter()
        .filter(|r| r.quantity == "squeezed_variance_depleted_mc")
        .map(|r| r.params[1])
        .fold(f64::NEG_INFINITY, f64::max);
    let time_series = |q: &str, seed_key: Option<f64>| -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = ds
            .rows
            .iter()
            .filter(|r| r.quantity == q && seed_key.is_none_or(|s| r.params[1] == s))
            .map(|r| (r.params[2], r.value))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts
    };
    let squeezing = Figure::new(
        "Squeezing with pump depletion",
        "time (s)",
        "squeezed variance",
    )
    .log_y()
    .with(Series::line(
        "no depletion, theory",
        time_series("squeezed_variance_analytic", None),
    ))
    .with(Series::points(
        "no depletion, simulated",
        time_series("squeezed_variance_ideal_mc", None),
        None,
    ))
    .with(Series::points(
        "depleted, largest seed",
        time_series("squeezed_variance_depleted_mc", Some(s_max)),
        None,
    ));

    vec![
        ("depletion_eta".to_owned(), eta),
        ("depletion_squeezing".to_owned(), squeezing),
    ]
}
