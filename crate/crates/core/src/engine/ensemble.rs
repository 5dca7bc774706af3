//! Deterministically seeded ensembles, run in parallel.
//!
//! Run i of an ensemble draws from stream i of the base seed's counter
//! generator, so results are independent of scheduling order and
//! bit-identical across repeats; a divergent run is recorded with its
//! replay coordinates instead of being silently dropped.

use rayon::prelude::*;

use crate::engine::interferometer::{
    run_interferometer_sequence_stream, InterferometerConfig, MeasurementRecord,
};
use crate::engine::sequence::PulseSequence;
use crate::engine::stepper::StepConfig;
use crate::engine::three_mode::{integrate_three_mode_stream, ThreeModeParams};
use crate::engine::trajectory::Trajectory;
use crate::engine::two_mode::integrate_two_mode_stream;
use crate::error::{Error, Result};
use crate::model::modes::ModePair;

/// Replay coordinates of a run stopped by the divergence guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbortedRun {
    pub run_index: u64,
    pub seed: u64,
    pub stream: u64,
    pub step: usize,
    pub time: f64,
    pub guard: f64,
}

#[derive(Debug, Clone)]
pub struct Ensemble<T> {
    /// Completed runs, in run-index order (aborted runs excluded).
    pub runs: Vec<T>,
    pub base_seed: u64,
    pub n_runs: u64,
    /// Human-readable snapshot of the generating configuration.
    pub config: String,
    pub aborted: Vec<AbortedRun>,
}

impl<T> Ensemble<T> {
    pub fn is_complete(&self) -> bool {
        self.aborted.is_empty()
    }
}

/// Run closure `f` with streams 0..n_runs of `base_seed`, splitting
/// divergences out into the aborted list and failing on any other error.
fn collect_ensemble<T, F>(
    n_runs: u64,
    base_seed: u64,
    config: String,
    f: F,
) -> Result<Ensemble<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    if n_runs < 2 {
        return Err(Error::InvalidParameter(format!(
            "an ensemble needs at least 2 runs, got {n_runs}"
        )));
    }
    let results: Vec<(u64, Result<T>)> = (0..n_runs)
        .into_par_iter()
        .map(|i| (i, f(i)))
        .collect();

    let mut runs = Vec::with_capacity(n_runs as usize);
    let mut aborted = Vec::new();
    for (i, r) in results {
        match r {
            Ok(t) => runs.push(t),
            Err(Error::Diverged {
                step,
                time,
                guard,
                seed,
            }) => aborted.push(AbortedRun {
                run_index: i,
                seed,
                stream: i,
                step,
                time,
                guard,
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(Ensemble {
        runs,
        base_seed,
        n_runs,
        config,
        aborted,
    })
}

/// Interferometer shots with per-run seeding.
pub fn run_ensemble(
    config: &InterferometerConfig,
    n_runs: u64,
    base_seed: u64,
) -> Result<Ensemble<MeasurementRecord>> {
    config.validate()?;
    collect_ensemble(n_runs, base_seed, format!("{config:?}"), |i| {
        run_interferometer_sequence_stream(config, base_seed, i)
    })
}

/// Full two-mode trajectories with per-run seeding.
pub fn two_mode_ensemble(
    modes: &ModePair,
    seq: &PulseSequence,
    step: &StepConfig,
    n_runs: u64,
    base_seed: u64,
) -> Result<Ensemble<Trajectory>> {
    modes.validate()?;
    step.validate(modes.gamma_bar(), seq)?;
    let snapshot = format!("{modes:?} {seq:?} {step:?}");
    collect_ensemble(n_runs, base_seed, snapshot, |i| {
        integrate_two_mode_stream(modes, seq, step, base_seed, i)
    })
}

/// Full three-mode trajectories with per-run seeding.
pub fn three_mode_ensemble(
    params: &ThreeModeParams,
    seq: &PulseSequence,
    step: &StepConfig,
    n_runs: u64,
    base_seed: u64,
) -> Result<Ensemble<Trajectory>> {
    params.validate()?;
    let snapshot = format!("{params:?} {seq:?} {step:?}");
    collect_ensemble(n_runs, base_seed, snapshot, |i| {
        integrate_three_mode_stream(params, seq, step, base_seed, i)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::interferometer::InterferometerConfig;
    use num_complex::Complex64;

    fn modes() -> ModePair {
        let tp = 2.0 * std::f64::consts::PI;
        ModePair::with_seeds(
            tp * 1.233e6,
            tp * 1.466e6,
            tp * 0.083,
            tp * 0.108,
            Complex64::new(4.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn ensembles_are_order_independent_and_reproducible() {
        let seq = PulseSequence::interferometer(
            3.0,
            0.2,
            0.0,
            0.0,
            -std::f64::consts::FRAC_PI_4,
            0.0,
            0.05,
        )
        .unwrap();
        let cfg = InterferometerConfig::new(modes(), seq, StepConfig::new(1e-3));
        let a = run_ensemble(&cfg, 16, 77).unwrap();
        let b = run_ensemble(&cfg, 16, 77).unwrap();
        assert_eq!(a.runs, b.runs);
        assert!(a.is_complete());
        // Different base seed decorrelates.
        let c = run_ensemble(&cfg, 16, 78).unwrap();
        assert_ne!(a.runs, c.runs);
    }

    #[test]
    fn single_run_rejected() {
        let cfg = InterferometerConfig::new(
            modes(),
            PulseSequence::interferometer(1.0, 0.1, 0.0, 0.0, 0.0, 0.0, 0.05).unwrap(),
            StepConfig::new(1e-3),
        );
        assert!(run_ensemble(&cfg, 1, 1).is_err());
    }

    #[test]
    fn divergent_runs_are_flagged_with_replay_coordinates() {
        let seq = PulseSequence::constant_drive(4.0, 150.0).unwrap();
        let mut step = StepConfig::new(1e-3).with_stride(100);
        step.overflow_guard = 5.0;
        let ens = two_mode_ensemble(&modes(), &seq, &step, 4, 123).unwrap();
        assert!(!ens.is_complete());
        for ab in &ens.aborted {
            assert_eq!(ab.seed, 123);
            // Replay reproduces the divergence at the recorded step.
            let err = integrate_two_mode_stream(&modes(), &seq, &step, ab.seed, ab.stream)
                .expect_err("replay must diverge");
            match err {
                Error::Diverged { step: s, .. } => assert_eq!(s, ab.step),
                other => panic!("unexpected error {other:?}"),
            }
        }
        assert_eq!(ens.runs.len() + ens.aborted.len(), 4);
    }
}
