//! Ensemble statistics of the stochastic engines against the closed-form
//! results of the linear envelope model.
//!
//! All runs use a matched pair at unit damping rate, so segment times are
//! gamma t directly and thermal variances are 1 per quadrature. Monte-Carlo
//! checks use 3 standard errors plus a small slack for the O(dt) weak bias
//! of the Euler scheme.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use su11_core::engine::{
    integrate_two_mode, run_ensemble, run_interferometer_sequence_stream, three_mode_ensemble,
    two_mode_ensemble, InterferometerConfig, PulseSequence, Segment, StepConfig, ThreeModeParams,
    Trajectory,
};
use su11_core::estimators::{
    ensemble_variance, fit_line, windowed_variance_series, VarianceEstimate,
};
use su11_core::model::analytic::{
    above_threshold_amplitude, amplified_variance_t, critical_amplified_variance_t,
    mean_output_quadrature, squeezed_variance_t, truncated_ou_variance,
};
use su11_core::model::modes::ModePair;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Matched pair at unit damping, no coherent seed.
fn unit_pair() -> ModePair {
    ModePair::matched(1.0).unwrap()
}

fn seeded_pair(alpha_s: f64, alpha_i: f64) -> ModePair {
    ModePair::with_seeds(1.0, 2.0, 1.0, 1.0, c(alpha_s), c(alpha_i)).unwrap()
}

/// Cross quadratures (x_s -/+ x_i)/sqrt(2) of every run at sample index `j`.
fn cross_samples(runs: &[Trajectory], j: usize) -> (Vec<f64>, Vec<f64>) {
    let minus = runs
        .iter()
        .map(|t| (t.signal[j].re - t.idler[j].re) * FRAC_1_SQRT_2)
        .collect();
    let plus = runs
        .iter()
        .map(|t| (t.signal[j].re + t.idler[j].re) * FRAC_1_SQRT_2)
        .collect();
    (minus, plus)
}

fn assert_close(est: &VarianceEstimate, predicted: f64, slack: f64, label: &str) {
    let tol = 3.0 * est.std_error + slack * predicted.abs();
    assert!(
        (est.value - predicted).abs() < tol,
        "{label}: got {}, expected {predicted} (tol {tol})",
        est.value
    );
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn undriven_modes_hold_unit_quadrature_variance() {
    let seq = PulseSequence::constant_drive(0.0, 1.0).unwrap();
    let step = StepConfig::new(0.01).with_stride(100);
    let ens = two_mode_ensemble(&unit_pair(), &seq, &step, 10_000, 11).unwrap();
    assert!(ens.is_complete());
    let last = ens.runs[0].len() - 1;
    for (name, samples) in [
        ("x_s", ens.runs.iter().map(|t| t.signal[last].re).collect::<Vec<_>>()),
        ("y_s", ens.runs.iter().map(|t| t.signal[last].im).collect()),
        ("x_i", ens.runs.iter().map(|t| t.idler[last].re).collect()),
        ("y_i", ens.runs.iter().map(|t| t.idler[last].im).collect()),
    ] {
        let v = ensemble_variance(&samples).unwrap();
        assert_close(&v, 1.0, 0.01, name);
    }
}

#[test]
fn transient_cross_variances_match_the_closed_forms() {
    let n = 10_000;
    for (idx, &mu) in [0.0, 0.5, 0.9, 2.0, 10.0, 38.0].iter().enumerate() {
        // Horizon 5/(1+mu): deep into saturation for the squeezed channel.
        let dt = 0.005 / (1.0 + mu);
        let seq = PulseSequence::constant_drive(mu, 5.0 / (1.0 + mu)).unwrap();
        let step = StepConfig::new(dt).with_stride(50);
        let ens = two_mode_ensemble(&unit_pair(), &seq, &step, n, 90 + idx as u64).unwrap();
        assert!(ens.is_complete());
        // Samples land every 50 steps: index j sits at (1+mu) t = 0.25 j.
        for j in [4usize, 10, 20] {
            let t = ens.runs[0].times[j];
            let (minus, plus) = cross_samples(&ens.runs, j);
            let v_minus = ensemble_variance(&minus).unwrap();
            let v_plus = ensemble_variance(&plus).unwrap();
            assert_close(
                &v_minus,
                squeezed_variance_t(mu, 1.0, t).unwrap(),
                0.01,
                &format!("squeezed channel, mu = {mu}, t = {t}"),
            );
            assert_close(
                &v_plus,
                amplified_variance_t(mu, 1.0, t).unwrap(),
                0.01,
                &format!("amplified channel, mu = {mu}, t = {t}"),
            );
        }
    }
}

#[test]
fn critical_drive_grows_diffusively() {
    // On threshold the amplified channel walks off linearly in time.
    let seq = PulseSequence::constant_drive(1.0, 2.5).unwrap();
    let step = StepConfig::new(0.0025).with_stride(100);
    let ens = two_mode_ensemble(&unit_pair(), &seq, &step, 10_000, 7).unwrap();
    for j in [5usize, 10] {
        let t = ens.runs[0].times[j];
        let (minus, plus) = cross_samples(&ens.runs, j);
        assert_close(
            &ensemble_variance(&plus).unwrap(),
            critical_amplified_variance_t(1.0, t).unwrap(),
            0.01,
            &format!("critical walk-off at t = {t}"),
        );
        assert_close(
            &ensemble_variance(&minus).unwrap(),
            squeezed_variance_t(1.0, 1.0, t).unwrap(),
            0.01,
            &format!("critical squeezed channel at t = {t}"),
        );
    }
}

#[test]
fn fast_beamsplitter_pulse_approaches_the_lossless_map() {
    // gamma t_bs = 1e-4: the finite-length pulse should reduce to the
    // instantaneous mixing map on the envelope means.
    let phi: f64 = 0.7;
    let (alpha_s, alpha_i) = (3.0, -1.0);
    let seq = PulseSequence::new(vec![
        Segment::Bs {
            angle: phi,
            duration: 1e-4,
        },
        Segment::Measure { duration: 1e-4 },
    ])
    .unwrap();
    let step = StepConfig::new(1e-4);
    let modes = seeded_pair(alpha_s, alpha_i);
    let config = InterferometerConfig::new(modes, seq, step);
    let ens = run_ensemble(&config, 10_000, 21).unwrap();
    let xs: Vec<f64> = ens.runs.iter().map(|r| r.x_s).collect();
    let xi: Vec<f64> = ens.runs.iter().map(|r| r.x_i).collect();
    let pred_s = phi.cos() * alpha_s + phi.sin() * alpha_i;
    let pred_i = phi.cos() * alpha_i - phi.sin() * alpha_s;
    let se = 1.0 / (xs.len() as f64).sqrt(); // thermal spread 1 per quadrature
    assert!(
        (mean(&xs) - pred_s).abs() < 3.0 * se + 1e-3,
        "signal mean {} vs map {pred_s}",
        mean(&xs)
    );
    assert!(
        (mean(&xi) - pred_i).abs() < 3.0 * se + 1e-3,
        "idler mean {} vs map {pred_i}",
        mean(&xi)
    );
    // Mixing a thermal state leaves each output at unit variance.
    assert_close(&ensemble_variance(&xs).unwrap(), 1.0, 0.01, "mixed x_s");
    assert_close(&ensemble_variance(&xi).unwrap(), 1.0, 0.01, "mixed x_i");
}

#[test]
fn three_mode_flow_reduces_to_the_two_mode_engine_below_threshold() {
    // Matched damping and an undepleted drive: after scaling out the
    // thermal amplitude, the three-mode statistics must agree with the
    // two-mode engine and with the closed forms.
    let mu = 0.8;
    let eps = 1e-3;
    let horizon = 2.0 / (1.0 + mu);
    let seq = PulseSequence::constant_drive(mu, horizon).unwrap();
    let step = StepConfig::new(0.002).with_stride(139);
    let n = 10_000;

    let params = ThreeModeParams::new(1.0, 1.0, 200.0, mu).with_thermal_amplitude(eps);
    let three = three_mode_ensemble(&params, &seq, &step, n, 33).unwrap();
    let two = two_mode_ensemble(&unit_pair(), &seq, &step, n, 34).unwrap();
    assert!(three.is_complete() && two.is_complete());

    let last = three.runs[0].len() - 1;
    assert_eq!(last, two.runs[0].len() - 1);
    let (minus3, plus3) = cross_samples(&three.runs, last);
    let (minus2, plus2) = cross_samples(&two.runs, last);
    let scale = eps * eps;
    for (label, raw3, s2, pred) in [
        (
            "squeezed",
            &minus3,
            ensemble_variance(&minus2).unwrap(),
            squeezed_variance_t(mu, 1.0, horizon).unwrap(),
        ),
        (
            "amplified",
            &plus3,
            ensemble_variance(&plus2).unwrap(),
            amplified_variance_t(mu, 1.0, horizon).unwrap(),
        ),
    ] {
        let v3 = ensemble_variance(raw3).unwrap();
        let scaled = v3.value / scale;
        let combined = 3.0 * ((v3.std_error / scale).powi(2) + s2.std_error.powi(2)).sqrt();
        assert!(
            (scaled - s2.value).abs() < combined,
            "{label}: three-mode {scaled} vs two-mode {}",
            s2.value
        );
        let v3_scaled = VarianceEstimate {
            value: scaled,
            std_error: v3.std_error / scale,
            n: v3.n,
        };
        assert_close(&v3_scaled, pred, 0.01, &format!("{label} vs closed form"));
    }
}

#[test]
fn seeded_mean_grows_at_the_analytic_rate() {
    // (x_s + x_i)/sqrt(2) is an eigenchannel of the matched pair: its mean
    // is alpha_s/sqrt(2) e^(gamma(mu-1)t/2) at every t, so the log-mean
    // slope reads the amplification rate directly.
    let mu = 2.0;
    let seq = PulseSequence::constant_drive(mu, 3.0).unwrap();
    let step = StepConfig::new(0.01 / 3.0).with_stride(45);
    let ens = two_mode_ensemble(&seeded_pair(5.0, 0.0), &seq, &step, 1_000, 55).unwrap();
    let len = ens.runs[0].len();
    let times: Vec<f64> = ens.runs[0].times.clone();
    let mut log_means = Vec::with_capacity(len);
    for j in 0..len {
        let m = mean(
            &ens.runs
                .iter()
                .map(|t| (t.signal[j].re + t.idler[j].re) * FRAC_1_SQRT_2)
                .collect::<Vec<_>>(),
        );
        log_means.push(m.ln());
    }
    let fit = fit_line(&times, &log_means).unwrap();
    let rate = 0.5 * (mu - 1.0);
    assert!(
        (fit.exponent - rate).abs() < 0.05 * rate,
        "growth rate {} vs gamma(mu-1)/2 = {rate}",
        fit.exponent
    );
    assert!(fit.r_squared > 0.99);
}

#[test]
fn saturated_amplitude_fluctuations_track_the_substrate_temperature() {
    // Above threshold, linearizing about |a| = sqrt(mu - 1): the amplitude
    // sum carries the substrate heating, the amplitude difference does not.
    let mu = 5.0;
    let eps = 1e-3;
    let n = 6_000;
    let seq = PulseSequence::constant_drive(mu, 10.0).unwrap();
    let step = StepConfig::new(0.01 / 6.0).with_stride(1000);
    for (rho, seed) in [(0.0, 61u64), (1.0, 62), (2.5, 63)] {
        let mut params = ThreeModeParams::new(1.0, 1.0, 200.0, mu)
            .with_seeds(c(0.05), c(0.05))
            .with_thermal_amplitude(eps);
        params.substrate_temp_ratio = rho;
        let ens = three_mode_ensemble(&params, &seq, &step, n, seed).unwrap();
        assert!(ens.is_complete());
        let last = ens.runs[0].len() - 1;
        let r_sum: Vec<f64> = ens
            .runs
            .iter()
            .map(|t| (t.signal[last].norm() + t.idler[last].norm()) * FRAC_1_SQRT_2)
            .collect();
        let r_diff: Vec<f64> = ens
            .runs
            .iter()
            .map(|t| (t.signal[last].norm() - t.idler[last].norm()) * FRAC_1_SQRT_2)
            .collect();
        // Mode baths contribute 1/(2(mu-1)) to the sum channel, the
        // substrate adds rho/2 on top; the difference channel sees only the
        // mode baths and holds the threshold value 1/2.
        let pred_sum = eps * eps * (0.5 / (mu - 1.0) + 0.5 * rho);
        let pred_diff = eps * eps * 0.5;
        assert_close(
            &ensemble_variance(&r_sum).unwrap(),
            pred_sum,
            0.02,
            &format!("amplitude sum at rho = {rho}"),
        );
        assert_close(
            &ensemble_variance(&r_diff).unwrap(),
            pred_diff,
            0.02,
            &format!("amplitude difference at rho = {rho}"),
        );
        // Self-oscillation amplitude itself.
        let r_mean = mean(&ens.runs.iter().map(|t| t.signal[last].norm()).collect::<Vec<_>>());
        let a0 = above_threshold_amplitude(mu).unwrap();
        assert!(
            (r_mean - a0).abs() < 0.01 * a0,
            "steady amplitude {r_mean} vs sqrt(mu-1) = {a0}"
        );
    }
}

#[test]
fn windowed_variance_recovers_the_spectral_truncation_of_an_ou_record() {
    // Single long undriven record: x_s is an OU process with relaxation
    // rate 1/2 and unit stationary variance. A window of length tau_m
    // keeps the spectral weight above 2 pi / tau_m.
    let lambda = 0.5;
    let tau_m = 2.0 * std::f64::consts::PI / lambda; // lambda tau_m = 2 pi
    let dt = tau_m / 1280.0;
    let duration = 1e4 * tau_m;
    let seq = PulseSequence::constant_drive(0.0, duration).unwrap();
    let step = StepConfig::new(dt).with_stride(4);
    let traj = integrate_two_mode(&unit_pair(), &seq, &step, 77).unwrap();

    // Drop the t = 0 sample: 3.2e6 evenly spaced points remain.
    let series: Vec<f64> = traj.signal[1..].iter().map(|a| a.re).collect();
    assert_eq!(series.len(), 3_200_000);
    let dt_eff = 4.0 * dt;

    let half = windowed_variance_series(&series, dt_eff, tau_m).unwrap();
    let pred_half = truncated_ou_variance(lambda, 1.0, tau_m).unwrap();
    assert!(
        (pred_half - 0.5).abs() < 1e-12,
        "lambda tau_m = 2 pi keeps exactly half the variance"
    );
    assert!(
        (half.value - pred_half).abs() < 0.05 * pred_half,
        "windowed variance {} vs truncated spectrum {pred_half}",
        half.value
    );
    // The window count fixes the reported precision.
    let m = (series.len() as f64 * dt_eff / tau_m).floor();
    assert!((half.std_error - half.value * (2.0 / m).sqrt()).abs() < 1e-12 * half.value);

    let quarter = windowed_variance_series(&series, dt_eff, tau_m / 4.0).unwrap();
    let pred_quarter = truncated_ou_variance(lambda, 1.0, tau_m / 4.0).unwrap();
    assert!(
        (quarter.value - pred_quarter).abs() < 0.08 * pred_quarter,
        "short-window variance {} vs truncated spectrum {pred_quarter}",
        quarter.value
    );
    assert!(quarter.value < half.value);
}

#[test]
fn interferometer_ensembles_replay_bit_for_bit() {
    let seq = PulseSequence::interferometer(2.0, 0.4, 0.2, 0.3, -0.5, 0.05, 0.1).unwrap();
    let mut config = InterferometerConfig::new(unit_pair(), seq, StepConfig::new(2e-3));
    config.readout_noise_var = 0.1;
    config.drive_jitter_std = 0.05;
    let a = run_ensemble(&config, 8, 501).unwrap();
    let b = run_ensemble(&config, 8, 501).unwrap();
    assert_eq!(a.runs, b.runs);
    let c = run_ensemble(&config, 8, 502).unwrap();
    assert!(a.runs.iter().zip(&c.runs).any(|(x, y)| x != y));
}

#[test]
fn halving_the_step_moves_statistics_by_less_than_the_monte_carlo_error() {
    let mu = 2.0;
    let horizon = 2.0 / 3.0;
    let seq = PulseSequence::constant_drive(mu, horizon).unwrap();
    let n = 10_000;
    let coarse = two_mode_ensemble(
        &unit_pair(),
        &seq,
        &StepConfig::new(0.01 / 3.0).with_stride(10_000),
        n,
        81,
    )
    .unwrap();
    let fine = two_mode_ensemble(
        &unit_pair(),
        &seq,
        &StepConfig::new(0.005 / 3.0).with_stride(10_000),
        n,
        82,
    )
    .unwrap();
    let last_c = coarse.runs[0].len() - 1;
    let last_f = fine.runs[0].len() - 1;
    let (minus_c, plus_c) = cross_samples(&coarse.runs, last_c);
    let (minus_f, plus_f) = cross_samples(&fine.runs, last_f);
    for (label, a, b) in [
        ("squeezed", minus_c, minus_f),
        ("amplified", plus_c, plus_f),
    ] {
        let va = ensemble_variance(&a).unwrap();
        let vb = ensemble_variance(&b).unwrap();
        let combined = (va.std_error.powi(2) + vb.std_error.powi(2)).sqrt();
        assert!(
            (va.value - vb.value).abs() < 3.0 * combined,
            "{label}: dt and dt/2 differ by more than the sampling error"
        );
    }
}

#[test]
fn dark_fringe_slope_matches_the_analytic_derivative() {
    // Common-random-number twins a phase delta apart straddling the dark
    // fringe; the per-run difference quotient estimates dX/dphi.
    let mu = 2.0;
    let t_pa = 2.0 / 3.0;
    let alpha = 50.0;
    let delta = 1e-3;
    let phi0 = -std::f64::consts::FRAC_PI_4;
    let step = StepConfig::new(2e-3);
    let build = |phi: f64| {
        let seq = PulseSequence::interferometer(mu, t_pa, 0.0, 0.0, phi, 1e-4, 1e-4).unwrap();
        InterferometerConfig::new(seeded_pair(alpha, 0.0), seq, step.clone())
    };
    let plus_cfg = build(phi0 + delta);
    let minus_cfg = build(phi0 - delta);
    let n = 2_000u64;
    let mut slopes = Vec::with_capacity(n as usize);
    for i in 0..n {
        let hi = run_interferometer_sequence_stream(&plus_cfg, 700, i).unwrap();
        let lo = run_interferometer_sequence_stream(&minus_cfg, 700, i).unwrap();
        slopes.push((hi.x_s - lo.x_s) / (2.0 * delta));
    }
    let m = mean(&slopes);
    let sd = ensemble_variance(&slopes).map(|v| v.value.sqrt()).unwrap_or(0.0);
    let se = sd / (slopes.len() as f64).sqrt();
    let pred = mean_output_quadrature(c(alpha), phi0, mu, 1.0, t_pa)
        .unwrap()
        .dx_dphi;
    assert!(
        (m - pred).abs() < 3.0 * se + 0.005 * pred.abs(),
        "slope {m} vs analytic {pred} (se {se})"
    );
}

#[test]
fn readout_is_linear_in_the_coherent_seed() {
    // Identical draws, geometrically spaced seeds: the run-by-run response
    // differences must scale exactly, and doubling the seed doubles the
    // deterministic part of the mean output.
    let seq = PulseSequence::interferometer(1.5, 0.5, 0.1, 0.3, 0.6, 1e-3, 1e-3).unwrap();
    let step = StepConfig::new(2e-3);
    let cfg = |a: f64| InterferometerConfig::new(seeded_pair(a, 0.0), seq.clone(), step.clone());
    let (c2, c4, c8) = (cfg(2.0), cfg(4.0), cfg(8.0));
    for i in 0..200u64 {
        let r2 = run_interferometer_sequence_stream(&c2, 900, i).unwrap();
        let r4 = run_interferometer_sequence_stream(&c4, 900, i).unwrap();
        let r8 = run_interferometer_sequence_stream(&c8, 900, i).unwrap();
        let d1 = r4.x_s - r2.x_s;
        let d2 = r8.x_s - r4.x_s;
        assert!(
            (d2 - 2.0 * d1).abs() <= 1e-9 * (1.0 + d1.abs()),
            "run {i}: seed response is not linear ({d1} then {d2})"
        );
    }
}

#[test]
fn sensing_phase_of_pi_flips_the_mean_readout() {
    // With no amplifier pulse and negligible segment lengths the readout
    // mean sits at the seed; a pi sensing kick negates it.
    let alpha = 5.0;
    let step = StepConfig::new(5e-3);
    let build = |phase: f64| {
        let seq = PulseSequence::interferometer(0.0, 0.0, 1e-3, phase, 0.0, 1e-3, 1e-3).unwrap();
        InterferometerConfig::new(seeded_pair(alpha, 0.0), seq, step.clone())
    };
    let base = run_ensemble(&build(0.0), 4_000, 1301).unwrap();
    let flipped = run_ensemble(&build(std::f64::consts::PI), 4_000, 1302).unwrap();
    let m0 = mean(&base.runs.iter().map(|r| r.x_s).collect::<Vec<_>>());
    let m1 = mean(&flipped.runs.iter().map(|r| r.x_s).collect::<Vec<_>>());
    let se = 1.0 / (4000f64).sqrt();
    assert!((m0 - alpha).abs() < 3.0 * se + 0.02, "unkicked mean {m0}");
    assert!((m1 + alpha).abs() < 3.0 * se + 0.02, "pi-kicked mean {m1}");
}
