//! Stochastic trajectory engine: pulse sequences, Euler-Maruyama steppers
//! for the two-mode linear system and the three-mode pump-depletion system,
//! and ensemble drivers with deterministic per-run seeding.

pub mod ensemble;
pub mod interferometer;
pub mod rng;
pub mod sequence;
mod stepper;
pub mod three_mode;
pub mod trajectory;
pub mod two_mode;

pub use ensemble::{run_ensemble, three_mode_ensemble, two_mode_ensemble, AbortedRun, Ensemble};
pub use interferometer::{
    run_interferometer_sequence, run_interferometer_sequence_stream, InterferometerConfig,
    MeasurementRecord,
};
pub use rng::{child_seed, run_stream};
pub use sequence::{PulseSequence, Segment};
pub use stepper::StepConfig;
pub use three_mode::{integrate_three_mode, integrate_three_mode_stream, ThreeModeParams};
pub use trajectory::{SegmentWindow, Trajectory};
pub use two_mode::{integrate_two_mode, integrate_two_mode_stream};
