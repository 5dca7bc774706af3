//! Above-threshold growth law: rate and saturation of self-oscillation.
//!
//! From a small coherent seed the signal amplitude grows at gamma (mu-1)/2
//! and saturates at sqrt(mu-1) once pump depletion balances the gain. The
//! experiment fits both laws across the drive grid.

use num_complex::Complex64;
use rayon::prelude::*;

use su11_core::engine::{three_mode_ensemble, PulseSequence, StepConfig, ThreeModeParams};
use su11_core::estimators::{ensemble_variance, fit_line, fit_power_law};
use su11_core::model::analytic::amplitude_growth_rate;

use crate::config::ExperimentConfig;
use crate::dataset::{DataSet, Provenance};
use crate::plot::{Figure, Series};
use crate::CliError;

use super::sorted_xy;

struct PointResult {
    steady: (f64, f64),
    rate: (f64, f64),
}

fn point(cfg: &ExperimentConfig, mu0: f64, index: u64) -> Result<PointResult, CliError> {
    let gamma = cfg.gamma_bar();
    let seed_amp = cfg.seed_grid.first().copied().unwrap_or(0.03);
    let a_star = (mu0 - 1.0).sqrt();
    let t_sat = 2.0 * (a_star / seed_amp).ln() / (gamma * (mu0 - 1.0));
    let horizon = 2.5 * t_sat;
    let dt = cfg.step_for(mu0);
    let steps = (horizon / dt).ceil() as usize;
    let step = StepConfig::new(dt).with_stride((steps / 400).max(1));
    let params = ThreeModeParams::new(cfg.modes.gamma_s, cfg.modes.gamma_i, 200.0 * gamma, mu0)
        .with_seeds(
            Complex64::new(seed_amp, 0.0),
            Complex64::new(seed_amp, 0.0),
        )
        .with_thermal_amplitude(cfg.thermal_amplitude);
    let seq = PulseSequence::constant_drive(mu0, horizon)?;
    let ens = three_mode_ensemble(
        &params,
        &seq,
        &step,
        cfg.ensemble,
        cfg.base_seed.wrapping_add(index),
    )?;

    let len = ens.runs[0].len();
    let times = &ens.runs[0].times;
    let mean_norm: Vec<f64> = (0..len)
        .map(|j| {
            ens.runs.iter().map(|r| r.signal[j].norm()).sum::<f64>() / ens.runs.len() as f64
        })
        .collect();

    // Steady amplitude: per-run tail mean, averaged across the ensemble.
    let tail = len - len / 5;
    let per_run: Vec<f64> = ens
        .runs
        .iter()
        .map(|r| {
            r.signal[tail..].iter().map(|a| a.norm()).sum::<f64>() / (len - tail) as f64
        })
        .collect();
    let steady_mean = per_run.iter().sum::<f64>() / per_run.len() as f64;
    let steady_se = (ensemble_variance(&per_run)?.value / per_run.len() as f64).sqrt();

    // Growth rate from the linear stretch of the mean log-amplitude: past
    // the fast transient, still well below saturation.
    let mean_log: Vec<f64> = (0..len)
        .map(|j| {
            ens.runs.iter().map(|r| r.signal[j].norm().ln()).sum::<f64>() / ens.runs.len() as f64
        })
        .collect();
    let t_lo = 3.0 / (gamma * (1.0 + mu0));
    let (ts, ls): (Vec<f64>, Vec<f64>) = (0..len)
        .filter(|&j| times[j] >= t_lo && mean_norm[j] <= 0.15 * a_star)
        .map(|j| (times[j], mean_log[j]))
        .unzip();
    if ts.len() < 3 {
        return Err(CliError::Runtime(format!(
            "growth window at mu0 = {mu0} has only {} samples; seed too large?",
            ts.len()
        )));
    }
    let fit = fit_line(&ts, &ls)?;

    Ok(PointResult {
        steady: (steady_mean, steady_se),
        rate: (fit.exponent, fit.uncertainty),
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<DataSet, CliError> {
    let gamma = cfg.gamma_bar();
    let results: Result<Vec<PointResult>, CliError> = cfg
        .mu_grid
        .par_iter()
        .enumerate()
        .map(|(i, &mu0)| point(cfg, mu0, i as u64))
        .collect();
    let results = results?;

    let mut ds = DataSet::new(
        "growth-law",
        &["mu0"],
        Provenance::new(&cfg.config_sha256, cfg.base_seed),
    );
    for (&mu0, r) in cfg.mu_grid.iter().zip(&results) {
        ds.push(&[mu0], "steady_amplitude_mc", r.steady.0, Some(r.steady.1))?;
        ds.push(&[mu0], "steady_amplitude_analytic", (mu0 - 1.0).sqrt(), None)?;
        ds.push(&[mu0], "growth_rate_mc", r.rate.0, Some(r.rate.1))?;
        ds.push(
            &[mu0],
            "growth_rate_analytic",
            amplitude_growth_rate(mu0, gamma)?,
            None,
        )?;
    }

    let x: Vec<f64> = cfg.mu_grid.iter().map(|&m| m - 1.0).collect();
    let a: Vec<f64> = results.iter().map(|r| r.steady.0).collect();
    let exp_fit = fit_power_law(&x, &a, None)?;
    ds.push(&[0.0], "amplitude_exponent_fit", exp_fit.exponent, Some(exp_fit.uncertainty))?;

    let rates: Vec<f64> = results.iter().map(|r| r.rate.0).collect();
    let rate_fit = fit_line(&cfg.mu_grid, &rates)?;
    ds.push(&[0.0], "rate_slope_fit", rate_fit.exponent, Some(rate_fit.uncertainty))?;
    ds.push(&[0.0], "rate_slope_analytic", 0.5 * gamma, None)?;
    Ok(ds)
}

pub fn figures(ds: &DataSet) -> Vec<(String, Figure)> {
    let shifted = |q: &str| -> Vec<(f64, f64)> {
        ds.rows
            .iter()
            .filter(|r| r.quantity == q && r.params[0] > 1.0)
            .map(|r| (r.params[0] - 1.0, r.value))
            .collect()
    };
    let amplitude = Figure::new(
        "Steady amplitude above threshold",
        "mu - 1",
        "signal amplitude",
    )
    .log_log()
    .with(Series::line("sqrt(mu - 1)", sorted_xy(shifted("steady_amplitude_analytic"))))
    .with(Series::points("simulated", sorted_xy(shifted("steady_amplitude_mc")), None));

    let series = |q: &str| -> Vec<(f64, f64)> {
        ds.series("mu0", q).into_iter().map(|(x, y, _)| (x, y)).collect()
    };
    let rate_pts = ds.series("mu0", "growth_rate_mc");
    let errs = rate_pts.iter().map(|&(_, _, e)| e.unwrap_or(0.0)).collect();
    let rate = Figure::new("Growth rate vs drive", "mu", "rate (1/s)")
        .with(Series::line(
            "gamma (mu - 1) / 2",
            sorted_xy(series("growth_rate_analytic")),
        ))
        .with(Series::points(
            "fitted",
            rate_pts.into_iter().map(|(x, y, _)| (x, y)).collect(),
            Some(errs),
        ));

    vec![
        ("growth_amplitude".to_owned(), amplitude),
        ("growth_rate".to_owned(), rate),
    ]
}
