//! Finite-measurement-window variance: the variance left in a record after
//! discarding fluctuations slower than the window length tau_m,
//!
//!   sigma^2 = 2 * integral_{2 pi / tau_m}^{inf} S(omega) d omega,
//!
//! realized by hard truncation of the record's periodogram below
//! omega_m = 2 pi / tau_m (two-sided). For an Ornstein-Uhlenbeck input this
//! reproduces the closed form (gamma / 2 lambda)(1 - (2/pi) arctan(omega_m
//! / lambda)) used as the oracle, and the tau_m -> record length limit is
//! the plain sample variance. The reported standard error counts the
//! windows of length tau_m the record holds.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::engine::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::estimators::{ensemble_variance, pairwise_sum, VarianceEstimate};

/// Windowed variance of a uniformly sampled series with spacing `dt`.
pub fn windowed_variance_series(x: &[f64], dt: f64, tau_m: f64) -> Result<VarianceEstimate> {
    let n = x.len();
    if n < 2 {
        return Err(Error::NotEnoughSamples { need: 2, got: n });
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sample spacing must be positive, got {dt}"
        )));
    }
    if !tau_m.is_finite() || tau_m <= 0.0 {
        return Err(Error::DegenerateWindow);
    }
    if let Some(idx) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite sample at index {idx}"
        )));
    }

    let duration = n as f64 * dt;
    if tau_m >= duration {
        // Single window: every retained frequency bin survives, leaving the
        // plain (mean-removed) sample variance.
        let mut v = ensemble_variance(x)?;
        v.std_error = v.value * 2.0f64.sqrt();
        return Ok(v);
    }

    let mean = pairwise_sum(x) / n as f64;
    let mut buf: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    // Bin k sits at |omega| = 2 pi min(k, n-k) / (n dt); keep it when that
    // is at least omega_m, i.e. min(k, n-k) >= n dt / tau_m.
    let k_min = n as f64 * dt / tau_m - 1e-9;
    let mut power = 0.0;
    for (k, f) in buf.iter().enumerate().skip(1) {
        let idx = k.min(n - k) as f64;
        if idx >= k_min {
            power += f.norm_sqr();
        }
    }
    // Parseval with the unbiased 1/(n-1) normalization, so the no-cutoff
    // limit matches ensemble_variance exactly.
    let value = power / (n as f64 * (n - 1) as f64);
    let windows = (duration / tau_m).floor().max(1.0);
    Ok(VarianceEstimate {
        value,
        std_error: value * (2.0 / windows).sqrt(),
        n,
    })
}

/// Windowed variance of a trajectory's signal X-quadrature. The record must
/// be uniformly sampled (integrate with a stride that divides each
/// segment's step count).
pub fn windowed_variance(traj: &Trajectory, tau_m: f64) -> Result<VarianceEstimate> {
    if traj.len() < 2 {
        return Err(Error::NotEnoughSamples {
            need: 2,
            got: traj.len(),
        });
    }
    let dt = traj.times[1] - traj.times[0];
    for pair in traj.times.windows(2) {
        if ((pair[1] - pair[0]) - dt).abs() > 1e-6 * dt {
            return Err(Error::InvalidParameter(
                "windowed variance needs a uniformly sampled record".into(),
            ));
        }
    }
    let series: Vec<f64> = traj.signal.iter().map(|a| a.re).collect();
    windowed_variance_series(&series, dt, tau_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_window_limit_is_the_sample_variance() {
        let x: Vec<f64> = (0..512).map(|i| ((i * 37) % 101) as f64 / 101.0).collect();
        let full = ensemble_variance(&x).unwrap();
        let win = windowed_variance_series(&x, 0.01, 512.0 * 0.01).unwrap();
        assert_eq!(win.value, full.value);
        // Shrinking the window strictly reduces the retained variance.
        let shorter = windowed_variance_series(&x, 0.01, 256.0 * 0.01).unwrap();
        assert!(shorter.value < full.value);
    }

    #[test]
    fn pure_tone_drops_once_the_cutoff_passes_it() {
        let n = 1024usize;
        let amp = std::f64::consts::SQRT_2;
        let x: Vec<f64> = (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * 8.0 * i as f64 / n as f64).sin())
            .collect();
        // Cutoff below bin 8 keeps the tone (variance 1)...
        let kept = windowed_variance_series(&x, 1.0, n as f64 / 7.5).unwrap();
        assert!((kept.value - n as f64 / (n as f64 - 1.0)).abs() < 1e-9);
        // ...cutoff above bin 8 removes all of it.
        let gone = windowed_variance_series(&x, 1.0, n as f64 / 8.5).unwrap();
        assert!(gone.value < 1e-12);
    }

    #[test]
    fn white_noise_loses_the_cut_fraction() {
        use rand::Rng;
        let mut rng = crate::engine::run_stream(99, 0);
        let n = 1 << 16;
        let x: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let full = ensemble_variance(&x).unwrap().value;
        // omega_m at 10% of the Nyquist range cuts ~10% of flat spectrum.
        let tau_m = 20.0; // dt = 1: k_min = 65536/20 ~ 3277 of 32768
        let win = windowed_variance_series(&x, 1.0, tau_m).unwrap();
        let expect = full * (1.0 - 2.0 * (n as f64 / tau_m) / n as f64);
        assert!(
            (win.value - expect).abs() < 0.02 * full,
            "windowed {} expected {expect}",
            win.value
        );
    }

    #[test]
    fn nonuniform_record_rejected() {
        let mut traj = Trajectory {
            times: vec![0.0, 0.1, 0.3],
            signal: vec![Complex::new(0.0, 0.0); 3],
            idler: vec![Complex::new(0.0, 0.0); 3],
            pump: None,
            mu: vec![0.0; 3],
            windows: Vec::new(),
            measured_means: None,
            seed: 0,
            stream: 0,
            dt: 0.1,
        };
        assert!(windowed_variance(&traj, 0.2).is_err());
        traj.times = vec![0.0, 0.1, 0.2];
        assert!(windowed_variance(&traj, 0.2).is_ok());
    }
}
