//! Shared error type for model evaluation, integration, and estimation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Raw gain pair fails the hyperbolic constraint G^2 - g^2 = 1.
    #[error("gain pair is not symplectic: (G+g)(G-g) - 1 = {defect:+.3e}")]
    NonSymplecticGains { defect: f64 },

    /// Drive sits exactly on threshold; steady-state branches are undefined
    /// there and the linear-growth transient form applies instead.
    #[error("drive ratio mu = 1 is the critical point; no steady state exists")]
    CriticalDrive,

    #[error("invalid pulse sequence: {0}")]
    InvalidSequence(String),

    /// Integrator step too coarse for the fastest rate in the run.
    #[error("step dt = {dt:.3e} s exceeds the stability bound {bound:.3e} s")]
    StepTooCoarse { dt: f64, bound: f64 },

    /// Numerical blow-up. The run is abandoned, never silently truncated;
    /// the seed identifies the exact stream for replay.
    #[error("run diverged (|envelope| > {guard:.1e}) at step {step}, t = {time:.6e} s, seed {seed}")]
    Diverged {
        step: usize,
        time: f64,
        guard: f64,
        seed: u64,
    },

    /// Depletion diagnostics need the pump envelope, which only three-mode
    /// trajectories record.
    #[error("trajectory has no pump record; pump depletion needs a three-mode run")]
    MissingPumpRecord,

    #[error("not enough samples: need at least {need}, got {got}")]
    NotEnoughSamples { need: usize, got: usize },

    /// Log-log fits only accept strictly positive data.
    #[error("nonpositive value at index {index} in {what}")]
    NonPositiveData { what: &'static str, index: usize },

    #[error("fit window is degenerate: all abscissae coincide")]
    DegenerateWindow,

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed trajectory file: {0}")]
    MalformedTrajectory(String),
}

pub type Result<T> = std::result::Result<T, Error>;
