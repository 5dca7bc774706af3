//! Transient squeezing through one pump pulse and the free decay after it.
//!
//! The drive is strong (mu ~ 38), so the squeezed cross-quadrature reaches
//! its floor 1/(1+mu) within a fraction of gamma^-1 while the antisqueezed
//! one grows explosively; shot-to-shot drive jitter widens the observed
//! band. After the pulse both channels relax back to the thermal variance
//! at the bare rate gamma.

use rayon::prelude::*;

use su11_core::engine::{integrate_two_mode_stream, PulseSequence, Segment, StepConfig, Trajectory};
use su11_core::estimators::{fit_line, squeezing_db};
use su11_core::model::analytic::{amplified_variance_t, squeezed_variance_t};

use crate::config::{mu_ceiling, Experiment, ExperimentConfig};
use crate::dataset::{DataSet, Provenance};
use crate::plot::{Figure, Series};
use crate::CliError;

use super::{jittered_drives, variance_at, x_minus, x_plus};

const DRIVE_SALT: u64 = 0x6a69_7474;

fn pulse_time(mu: f64, gamma: f64) -> f64 {
    (10.0 * mu).ln() / (gamma * (1.0 + mu))
}

/// Squeezed-channel variance at `t`: pulse closed form, then exponential
/// relaxation of the end-of-pulse value back to 1 at rate gamma.
fn v_squeezed(mu: f64, gamma: f64, t: f64, t_pulse: f64) -> Result<f64, CliError> {
    if t <= t_pulse {
        Ok(squeezed_variance_t(mu, gamma, t)?)
    } else {
        let end = squeezed_variance_t(mu, gamma, t_pulse)?;
        Ok(1.0 + (end - 1.0) * (-gamma * (t - t_pulse)).exp())
    }
}

fn v_amplified(mu: f64, gamma: f64, t: f64, t_pulse: f64) -> Result<f64, CliError> {
    if t <= t_pulse {
        Ok(amplified_variance_t(mu, gamma, t)?)
    } else {
        let end = amplified_variance_t(mu, gamma, t_pulse)?;
        Ok(1.0 + (end - 1.0) * (-gamma * (t - t_pulse)).exp())
    }
}

fn ensemble(
    cfg: &ExperimentConfig,
    drives: &[f64],
    seq_for: impl Fn(f64) -> Result<PulseSequence, su11_core::Error> + Sync,
    step: &StepConfig,
    seed: u64,
) -> Result<Vec<Trajectory>, CliError> {
    let runs: Result<Vec<Trajectory>, su11_core::Error> = drives
        .par_iter()
        .enumerate()
        .map(|(i, &mu_i)| {
            let seq = seq_for(mu_i)?;
            integrate_two_mode_stream(&cfg.modes, &seq, step, seed, i as u64)
        })
        .collect();
    Ok(runs?)
}

pub fn run(cfg: &ExperimentConfig) -> Result<DataSet, CliError> {
    let gamma = cfg.gamma_bar();
    let mu = cfg.mu;
    let spread = cfg.mu_spread;
    let t_pulse = pulse_time(mu, gamma);
    let t_decay = 4.0 / gamma;
    let total = t_pulse + t_decay;

    let mu_max = mu_ceiling(Experiment::TransientSqueeze, mu, spread, &cfg.mu_grid);
    let dt = cfg.step_for(mu_max);
    let steps = (total / dt).ceil() as usize;
    let step = StepConfig::new(dt).with_stride((steps / 150).max(1));

    let drives = jittered_drives(mu, spread, cfg.ensemble, cfg.base_seed ^ DRIVE_SALT);
    let seq_for = |mu_i: f64| {
        PulseSequence::new(vec![
            Segment::Pa {
                mu: mu_i,
                duration: t_pulse,
            },
            Segment::Dwell {
                duration: t_decay,
                sensing_phase: 0.0,
            },
        ])
    };
    let runs = ensemble(cfg, &drives, seq_for, &step, cfg.base_seed)?;
    let control_drives = vec![0.0; cfg.ensemble as usize];
    let control = ensemble(
        cfg,
        &control_drives,
        seq_for,
        &step,
        cfg.base_seed.wrapping_add(1),
    )?;

    let mut ds = DataSet::new(
        "transient-squeeze",
        &["time"],
        Provenance::new(&cfg.config_sha256, cfg.base_seed),
    );

    let times = runs[0].times.clone();
    let mut squeezed_mc = Vec::with_capacity(times.len());
    for (j, &t) in times.iter().enumerate() {
        let sq = variance_at(&runs, |r| x_minus(r, j))?;
        let amp = variance_at(&runs, |r| x_plus(r, j))?;
        let thermal = variance_at(&control, |r| x_minus(r, j))?;
        squeezed_mc.push((t, sq.value));
        ds.push(&[t], "squeezed_variance_mc", sq.value, Some(sq.std_error))?;
        ds.push(&[t], "antisqueezed_variance_mc", amp.value, Some(amp.std_error))?;
        ds.push(&[t], "thermal_variance_mc", thermal.value, Some(thermal.std_error))?;
        for (suffix, mu_a) in [("", mu), ("_mu_lo", mu - spread), ("_mu_hi", mu + spread)] {
            ds.push(
                &[t],
                &format!("squeezed_analytic{suffix}"),
                v_squeezed(mu_a, gamma, t, t_pulse)?,
                None,
            )?;
            ds.push(
                &[t],
                &format!("antisqueezed_analytic{suffix}"),
                v_amplified(mu_a, gamma, t, t_pulse)?,
                None,
            )?;
        }
    }

    // Deepest squeezing reached, in dB (negative = below thermal).
    let (t_min, v_min) = squeezed_mc
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one recorded sample");
    ds.push(&[t_min], "min_squeezing_db", squeezing_db(v_min, 1.0)?, None)?;

    // Relaxation rate from the recovery of the squeezed channel:
    // ln(1 - V) decays linearly at -gamma once the pump is off.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    // The cap at 0.8 keeps 1 - V safely positive under ensemble noise.
    for &(t, v) in &squeezed_mc {
        if t > t_pulse && v < 0.8 {
            xs.push(t - t_pulse);
            ys.push((1.0 - v).ln());
        }
    }
    if xs.len() >= 3 {
        let fit = fit_line(&xs, &ys)?;
        ds.push(
            &[t_pulse],
            "decay_rate_fit",
            -fit.exponent,
            Some(fit.uncertainty),
        )?;
        ds.push(&[t_pulse], "decay_rate_analytic", gamma, None)?;
    }
    Ok(ds)
}

pub fn figures(ds: &DataSet) -> Vec<(String, Figure)> {
    let line = |q: &str, label: &str| {
        Series::line(
            label,
            ds.series("time", q).into_iter().map(|(x, y, _)| (x, y)).collect(),
        )
    };
    let pts = |q: &str, label: &str| {
        let data = ds.series("time", q);
        let errs = data.iter().map(|&(_, _, e)| e.unwrap_or(0.0)).collect();
        Series::points(
            label,
            data.into_iter().map(|(x, y, _)| (x, y)).collect(),
            Some(errs),
        )
    };

    let variances = Figure::new(
        "Transient squeezing and recovery",
        "time (s)",
        "quadrature variance",
    )
    .log_y()
    .with(line("squeezed_analytic", "squeezed, theory"))
    .with(line("antisqueezed_analytic", "antisqueezed, theory"))
    .with(line("squeezed_analytic_mu_lo", "squeezed, drive - spread"))
    .with(line("squeezed_analytic_mu_hi", "squeezed, drive + spread"))
    .with(pts("squeezed_variance_mc", "squeezed, simulated"))
    .with(pts("antisqueezed_variance_mc", "antisqueezed, simulated"))
    .with(pts("thermal_variance_mc", "undriven control"));

    let mut db_pts = Vec::new();
    for (t, v, _) in ds.series("time", "squeezed_variance_mc") {
        if v > 0.0 {
            db_pts.push((t, 10.0 * v.log10()));
        }
    }
    let db_theory: Vec<(f64, f64)> = ds
        .series("time", "squeezed_analytic")
        .into_iter()
        .filter(|&(_, v, _)| v > 0.0)
        .map(|(t, v, _)| (t, 10.0 * v.log10()))
        .collect();
    let db = Figure::new("Squeezing depth", "time (s)", "squeezing (dB)")
        .with(Series::line("theory", db_theory))
        .with(Series::points("simulated", db_pts, None));

    vec![
        ("transient_variance".to_owned(), variances),
        ("transient_db".to_owned(), db),
    ]
}
