//! One interferometer shot: prepare coherent seeds with thermal noise,
//! drive the pulse sequence, and read out the measurement-window quadrature
//! averages, optionally with per-run drive jitter and additive readout
//! noise.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::engine::rng::run_stream;
use crate::engine::sequence::{PulseSequence, Segment};
use crate::engine::stepper::StepConfig;
use crate::engine::two_mode::integrate_two_mode_with_rng;
use crate::error::{Error, Result};
use crate::model::modes::ModePair;

/// Jitter draws are truncated at this many standard deviations so the step
/// bound can be validated once against a hard worst-case drive.
const JITTER_CLIP: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerConfig {
    pub modes: ModePair,
    pub sequence: PulseSequence,
    pub step: StepConfig,
    /// Additive Gaussian noise variance on each read-out quadrature.
    pub readout_noise_var: f64,
    /// Std of the shared per-run Gaussian drive error: every parametric
    /// segment's mu shifts by the same draw (clipped at +-6 sigma).
    pub drive_jitter_std: f64,
}

impl InterferometerConfig {
    pub fn new(modes: ModePair, sequence: PulseSequence, step: StepConfig) -> Self {
        Self {
            modes,
            sequence,
            step,
            readout_noise_var: 0.0,
            drive_jitter_std: 0.0,
        }
    }

    /// Worst-case drive any jittered run can present to the integrator.
    pub fn max_jittered_mu(&self) -> f64 {
        self.sequence.max_mu() + JITTER_CLIP * self.drive_jitter_std
    }

    pub fn validate(&self) -> Result<()> {
        self.modes.validate()?;
        if !self.sequence.has_measure() {
            return Err(Error::InvalidSequence(
                "interferometer sequence needs a measurement window".into(),
            ));
        }
        if !self.readout_noise_var.is_finite() || self.readout_noise_var < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "readout noise variance must be non-negative, got {}",
                self.readout_noise_var
            )));
        }
        if !self.drive_jitter_std.is_finite() || self.drive_jitter_std < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drive jitter std must be non-negative, got {}",
                self.drive_jitter_std
            )));
        }
        // Validate the step against the worst jittered drive, not just the
        // nominal one, so no run can fail the bound at random.
        let bound = StepConfig::max_stable_dt(self.modes.gamma_bar(), self.max_jittered_mu());
        if self.step.dt > bound * (1.0 + 1e-9) {
            return Err(Error::StepTooCoarse {
                dt: self.step.dt,
                bound,
            });
        }
        Ok(())
    }
}

/// Terminal read-out of one interferometer run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    pub x_s: f64,
    pub y_s: f64,
    pub x_i: f64,
    pub y_i: f64,
    /// Drive actually applied (nominal mu plus this run's jitter).
    pub mu: f64,
    pub seed: u64,
    pub stream: u64,
}

pub fn run_interferometer_sequence(
    config: &InterferometerConfig,
    seed: u64,
) -> Result<MeasurementRecord> {
    run_interferometer_sequence_stream(config, seed, 0)
}

pub fn run_interferometer_sequence_stream(
    config: &InterferometerConfig,
    seed: u64,
    stream: u64,
) -> Result<MeasurementRecord> {
    config.validate()?;
    let mut rng = run_stream(seed, stream);

    // Fixed draw layout regardless of configured noise levels, so runs with
    // different settings stay pairwise comparable (common random numbers):
    // jitter first, then the trajectory draws, then readout noise.
    let jitter_draw: f64 = rng.sample(StandardNormal);
    let shift = config.drive_jitter_std * jitter_draw.clamp(-JITTER_CLIP, JITTER_CLIP);

    let (sequence, mu_applied);
    if shift != 0.0 {
        let segments = config
            .sequence
            .segments()
            .iter()
            .map(|seg| match *seg {
                Segment::Pa { mu, duration } => Segment::Pa {
                    mu: (mu + shift).max(0.0),
                    duration,
                },
                other => other,
            })
            .collect();
        sequence = PulseSequence::new(segments)?;
        mu_applied = (config.sequence.max_mu() + shift).max(0.0);
    } else {
        sequence = config.sequence.clone();
        mu_applied = config.sequence.max_mu();
    }

    let traj = integrate_two_mode_with_rng(
        &config.modes,
        &sequence,
        &config.step,
        &mut rng,
        seed,
        stream,
    )?;
    let means = traj
        .measured_means
        .expect("validated sequence has a measurement window");

    let sd = config.readout_noise_var.sqrt();
    let mut read = |m: f64| {
        let xi: f64 = rng.sample(StandardNormal);
        m + sd * xi
    };
    Ok(MeasurementRecord {
        x_s: read(means[0]),
        y_s: read(means[1]),
        x_i: read(means[2]),
        y_i: read(means[3]),
        mu: mu_applied,
        seed,
        stream,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn config(mu: f64, alpha: f64) -> InterferometerConfig {
        let tp = 2.0 * std::f64::consts::PI;
        let modes = ModePair::with_seeds(
            tp * 1.233e6,
            tp * 1.466e6,
            tp * 0.083,
            tp * 0.108,
            Complex64::new(alpha, 0.0),
            Complex64::new(0.0, 0.0),
        )
        .unwrap();
        let seq =
            PulseSequence::interferometer(mu, 0.1, 0.05, 0.0, -std::f64::consts::FRAC_PI_4, 0.0, 0.02)
                .unwrap();
        let step = StepConfig::new(1e-4);
        InterferometerConfig::new(modes, seq, step)
    }

    #[test]
    fn sequence_without_measure_rejected() {
        let mut cfg = config(2.0, 5.0);
        cfg.sequence = PulseSequence::constant_drive(2.0, 0.5).unwrap();
        assert!(matches!(
            run_interferometer_sequence(&cfg, 1),
            Err(Error::InvalidSequence(_))
        ));
    }

    #[test]
    fn jitter_and_readout_noise_change_only_their_draws() {
        let base = config(5.0, 3.0);
        let plain = run_interferometer_sequence(&base, 42).unwrap();

        let mut noisy = base.clone();
        noisy.readout_noise_var = 1e-2;
        let read = run_interferometer_sequence(&noisy, 42).unwrap();
        // Same trajectory underneath: readout noise is additive at the end.
        assert!((read.x_s - plain.x_s).abs() < 1.0);
        assert_ne!(read.x_s, plain.x_s);
        assert_eq!(read.mu, plain.mu);

        let mut jittered = base.clone();
        jittered.drive_jitter_std = 0.5;
        let jit = run_interferometer_sequence(&jittered, 42).unwrap();
        assert_ne!(jit.mu, plain.mu);
        assert!((jit.mu - 5.0).abs() <= JITTER_CLIP * 0.5);
    }

    #[test]
    fn jitter_headroom_enters_step_validation() {
        let mut cfg = config(5.0, 3.0);
        // Step right at the nominal bound leaves no jitter headroom.
        cfg.step = StepConfig::new(StepConfig::max_stable_dt(cfg.modes.gamma_bar(), 5.0));
        cfg.drive_jitter_std = 2.0;
        assert!(matches!(
            run_interferometer_sequence(&cfg, 1),
            Err(Error::StepTooCoarse { .. })
        ));
    }
}
