//! Physical model layer: mode parameters, Gaussian pulse maps, and the
//! closed-form envelope dynamics they generate.

pub mod analytic;
pub mod gaussian;
pub mod modes;

pub use analytic::{
    amplified_variance_t, amplitude_growth_rate, critical_amplified_variance_t,
    mean_output_quadrature, mismatch_time_constants, phase_sensitivity, squeezed_variance_t,
    steady_state_phase_diagram, above_threshold_amplitude, truncated_ou_variance, MeanOutput,
    MismatchTimeConstants, SensitivityPoint, SteadyState, Substrate,
};
pub use gaussian::{
    apply_bs_map, apply_pa_map, pa_pulse_gains, CrossVariances, GaussianState, PaGains, Quadrature,
};
pub use modes::{MismatchParams, ModePair, PumpDrive};
