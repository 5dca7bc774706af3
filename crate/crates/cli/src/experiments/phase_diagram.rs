//! Steady-state squeezing phase diagram across the oscillation threshold.
//!
//! Below threshold the cross-quadrature channels are measured; above it the
//! amplitude sum/difference fluctuations around the self-oscillating state.
//! Every simulated value is a windowed (finite measurement time) variance,
//! compared against both the bare steady-state theory and its spectral
//! truncation to frequencies at or above the window rate omega_m = 2 pi /
//! tau_m — near threshold the two differ strongly, which is the point.

use num_complex::Complex64;
use rayon::prelude::*;

use su11_core::engine::{
    integrate_three_mode_stream, integrate_two_mode_stream, PulseSequence, StepConfig,
    ThreeModeParams, Trajectory,
};
use su11_core::estimators::windowed_variance_series;
use su11_core::model::analytic::truncated_ou_variance;

use crate::config::ExperimentConfig;
use crate::dataset::{DataSet, Provenance};
use crate::plot::{Figure, Series};
use crate::CliError;

use super::{sorted_xy, INV_RT2};

type PointRows = Vec<(&'static str, f64, Option<f64>)>;

pub fn run(cfg: &ExperimentConfig) -> Result<DataSet, CliError> {
    let tau_m = cfg.tau_m.expect("validated: phase-diagram requires tau_m");
    let results: Result<Vec<PointRows>, CliError> = cfg
        .mu_grid
        .par_iter()
        .enumerate()
        .map(|(idx, &mu)| {
            if mu < 1.0 {
                below_threshold(cfg, mu, idx as u64, tau_m)
            } else {
                above_threshold(cfg, mu, idx as u64, tau_m)
            }
        })
        .collect();
    let results = results?;

    let mut ds = DataSet::new(
        "phase-diagram",
        &["mu"],
        Provenance::new(&cfg.config_sha256, cfg.base_seed),
    );
    for (&mu, rows) in cfg.mu_grid.iter().zip(&results) {
        for (quantity, value, err) in rows {
            ds.push(&[mu], quantity, *value, *err)?;
        }
    }
    Ok(ds)
}

/// Steady record long enough for `n_windows` measurement windows after the
/// slowest channel (rate `lambda_slow`) has equilibrated, sampled uniformly.
struct SteadyRecord {
    trajectory: Trajectory,
    dt_eff: f64,
    start: usize,
}

fn steady_record<F>(
    cfg: &ExperimentConfig,
    mu: f64,
    lambda_slow: f64,
    tau_m: f64,
    integrate: F,
) -> Result<SteadyRecord, CliError>
where
    F: FnOnce(&PulseSequence, &StepConfig) -> Result<Trajectory, su11_core::error::Error>,
{
    let dt = cfg.step_for(mu);
    let burn = 16.0 / lambda_slow;
    let wanted = burn + (cfg.ensemble as f64 + 1.0) * tau_m;
    // Sample stride targeting >= 64 points per window, with the total an
    // exact stride multiple so the recorded grid stays uniform.
    let stride = ((tau_m / (64.0 * dt)).floor() as usize).max(1);
    let n_steps = ((wanted / dt).ceil() as usize).div_ceil(stride) * stride;
    let total = n_steps as f64 * dt;
    let seq = PulseSequence::constant_drive(mu, total)?;
    let step = StepConfig::new(dt).with_stride(stride);
    let trajectory = integrate(&seq, &step)?;
    let dt_eff = dt * stride as f64;
    let start = (burn / dt_eff).ceil() as usize;
    Ok(SteadyRecord {
        trajectory,
        dt_eff,
        start,
    })
}

fn windowed<G>(rec: &SteadyRecord, tau_m: f64, sample: G) -> Result<(f64, f64), CliError>
where
    G: Fn(&Trajectory, usize) -> f64,
{
    let series: Vec<f64> = (rec.start..rec.trajectory.len())
        .map(|j| sample(&rec.trajectory, j))
        .collect();
    let est = windowed_variance_series(&series, rec.dt_eff, tau_m)?;
    Ok((est.value, est.std_error))
}

fn below_threshold(
    cfg: &ExperimentConfig,
    mu: f64,
    point: u64,
    tau_m: f64,
) -> Result<PointRows, CliError> {
    let gamma = cfg.gamma_bar();
    let lam_sq = 0.5 * gamma * (1.0 + mu);
    let lam_amp = 0.5 * gamma * (1.0 - mu);

    let mut rows: PointRows = vec![
        ("squeezed_steady_analytic", 1.0 / (1.0 + mu), None),
        ("antisqueezed_steady_analytic", 1.0 / (1.0 - mu), None),
        (
            "squeezed_windowed_analytic",
            truncated_ou_variance(lam_sq, gamma, tau_m)?,
            None,
        ),
        (
            "antisqueezed_windowed_analytic",
            truncated_ou_variance(lam_amp, gamma, tau_m)?,
            None,
        ),
    ];

    let rec = steady_record(cfg, mu, lam_amp, tau_m, |seq, step| {
        integrate_two_mode_stream(&cfg.modes, seq, step, cfg.base_seed, point)
    })?;
    let (v, e) = windowed(&rec, tau_m, |t, j| {
        (t.signal[j].re - t.idler[j].re) * INV_RT2
    })?;
    rows.push(("squeezed_windowed_mc", v, Some(e)));
    let (v, e) = windowed(&rec, tau_m, |t, j| {
        (t.signal[j].re + t.idler[j].re) * INV_RT2
    })?;
    rows.push(("antisqueezed_windowed_mc", v, Some(e)));
    Ok(rows)
}

fn above_threshold(
    cfg: &ExperimentConfig,
    mu: f64,
    point: u64,
    tau_m: f64,
) -> Result<PointRows, CliError> {
    let gamma = cfg.gamma_bar();
    let lam_sum = gamma * (mu - 1.0);
    let eps = cfg.thermal_amplitude;
    let cold_sum = truncated_ou_variance(lam_sum, gamma, tau_m)?;

    let mut rows: PointRows = vec![
        ("amplitude_difference_steady_analytic", 0.5, None),
        (
            "amplitude_sum_steady_analytic",
            mu / (2.0 * (mu - 1.0)),
            None,
        ),
        (
            "amplitude_sum_cold_steady_analytic",
            1.0 / (2.0 * (mu - 1.0)),
            None,
        ),
        (
            "amplitude_difference_windowed_analytic",
            truncated_ou_variance(gamma, gamma, tau_m)?,
            None,
        ),
        ("amplitude_sum_windowed_analytic", mu * cold_sum, None),
        ("amplitude_sum_cold_windowed_analytic", cold_sum, None),
    ];

    let a_star = Complex64::new((mu - 1.0).sqrt(), 0.0);
    let lam_slow = gamma * (mu - 1.0).min(1.0);
    let base = ThreeModeParams::new(
        cfg.modes.gamma_s,
        cfg.modes.gamma_i,
        200.0 * gamma,
        mu,
    )
    .with_seeds(a_star, a_star)
    .with_thermal_amplitude(eps);

    let r_diff = |t: &Trajectory, j: usize| (t.signal[j].norm() - t.idler[j].norm()) * INV_RT2;
    let r_sum = |t: &Trajectory, j: usize| (t.signal[j].norm() + t.idler[j].norm()) * INV_RT2;

    let rec = steady_record(cfg, mu, lam_slow, tau_m, |seq, step| {
        integrate_three_mode_stream(&base, seq, step, cfg.base_seed, point)
    })?;
    let (v, e) = windowed(&rec, tau_m, r_diff)?;
    rows.push((
        "amplitude_difference_windowed_mc",
        v / (eps * eps),
        Some(e / (eps * eps)),
    ));
    let (v, e) = windowed(&rec, tau_m, r_sum)?;
    rows.push((
        "amplitude_sum_windowed_mc",
        v / (eps * eps),
        Some(e / (eps * eps)),
    ));

    // Frozen substrate bath: the amplitude-sum channel loses its extra 1/2.
    let mut cold = base;
    cold.substrate_temp_ratio = 0.0;
    let rec = steady_record(cfg, mu, lam_slow, tau_m, |seq, step| {
        integrate_three_mode_stream(&cold, seq, step, cfg.base_seed, point + 1000)
    })?;
    let (v, e) = windowed(&rec, tau_m, r_sum)?;
    rows.push((
        "amplitude_sum_cold_windowed_mc",
        v / (eps * eps),
        Some(e / (eps * eps)),
    ));
    Ok(rows)
}

pub fn figures(ds: &DataSet) -> Vec<(String, Figure)> {
    let line = |quantity: &str, label: &str| {
        Series::line(
            label,
            sorted_xy(
                ds.series("mu", quantity)
                    .into_iter()
                    .map(|(x, y, _)| (x, y))
                    .collect(),
            ),
        )
    };
    let pts = |quantity: &str, label: &str| {
        let data = ds.series("mu", quantity);
        let errs = data.iter().map(|&(_, _, e)| e.unwrap_or(0.0)).collect();
        Series::points(
            label,
            data.into_iter().map(|(x, y, _)| (x, y)).collect(),
            Some(errs),
        )
    };

    let below = Figure::new(
        "Below-threshold squeezing vs drive",
        "drive mu",
        "quadrature variance",
    )
    .log_y()
    .with(line("squeezed_steady_analytic", "squeezed, steady theory"))
    .with(line("antisqueezed_steady_analytic", "antisqueezed, steady theory"))
    .with(line("squeezed_windowed_analytic", "squeezed, windowed theory"))
    .with(line(
        "antisqueezed_windowed_analytic",
        "antisqueezed, windowed theory",
    ))
    .with(pts("squeezed_windowed_mc", "squeezed, simulated"))
    .with(pts("antisqueezed_windowed_mc", "antisqueezed, simulated"));

    let above = Figure::new(
        "Above-threshold amplitude fluctuations",
        "drive mu",
        "amplitude variance",
    )
    .log_y()
    .with(line(
        "amplitude_difference_windowed_analytic",
        "difference, windowed theory",
    ))
    .with(line(
        "amplitude_sum_windowed_analytic",
        "sum (warm substrate), windowed theory",
    ))
    .with(line(
        "amplitude_sum_cold_windowed_analytic",
        "sum (cold substrate), windowed theory",
    ))
    .with(pts("amplitude_difference_windowed_mc", "difference, simulated"))
    .with(pts("amplitude_sum_windowed_mc", "sum (warm), simulated"))
    .with(pts("amplitude_sum_cold_windowed_mc", "sum (cold), simulated"));

    vec![
        ("phase_diagram_below".to_owned(), below),
        ("phase_diagram_above".to_owned(), above),
    ]
}
