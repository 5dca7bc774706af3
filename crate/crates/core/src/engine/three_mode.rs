//! Three-mode slow-flow dynamics with an explicit pump (substrate) mode.
//!
//! In the normalized slow-flow variables the driven pump obeys
//!
//!   2 dA_S/dt = gamma_S [ -A_S + i A_s A_i + i F_S(t) ],    F_S = mu(t),
//!
//! and feeds the parametric coupling i conj(A_i) A_S back into the signal
//! and idler equations. Amplitudes are measured in the characteristic
//! (self-oscillation) scale: the steady state above threshold is
//! |A_s| = sqrt(mu - 1) with |A_S| -> 1, and a thermal mode sits at
//! variance epsilon^2 per quadrature with epsilon << 1. With the pump two
//! to four decades faster than the modes it can be eliminated
//! algebraically (`adiabatic_pump`), leaving the effective drive
//! mu_eff = mu - a_s a_i whose saturation at 1 is the pump-depletion
//! mechanism; keeping the pump dynamical instead exposes the stiff rate
//! gamma_S to the step bound.
//!
//! Internally the idler envelope carries an extra sign (a_i = -A_i) so
//! that below threshold the equations reduce EXACTLY to the two-mode
//! linear system in its usual phase convention: one analysis pipeline
//! serves both engines. (With unequal linewidths the reduction is exact
//! only at matched rates: here each mode's coupling carries its own
//! gamma_k/2 on the whole bracket, where the two-mode equation couples
//! through sqrt(gamma_s gamma_i)/2 - the forms agree to first order in
//! the damping mismatch.) The recorded drive channel mu(t) =
//! |mu - a_s a_i| (or |A_S| when the pump is dynamical) is the depletion
//! diagnostic.
//!
//! The substrate force noise is shared: the same complex white draw enters
//! both mode equations through the pump, with intensity 2 rho epsilon^2 /
//! gamma_bar per quadrature (rho = `substrate_temp_ratio`). At rho = 1 the
//! above-threshold amplitude-sum variance saturates at epsilon^2 mu /
//! (2 (mu - 1)), bounded below by epsilon^2 / 2; a cold substrate (rho = 0)
//! leaves only the mode baths, giving epsilon^2 / (2 (mu - 1)).

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::engine::rng::run_stream;
use crate::engine::sequence::PulseSequence;
use crate::engine::stepper::{drive_sequence, standard_complex, EnvelopeSystem, StepConfig};
use crate::engine::trajectory::Trajectory;
use crate::error::{Error, Result};

/// Parameters of the three-mode system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeModeParams {
    /// Signal linewidth (rad/s).
    pub gamma_s: f64,
    /// Idler linewidth (rad/s).
    pub gamma_i: f64,
    /// Pump (substrate) linewidth gamma_S (rad/s), far above the mode rates.
    pub gamma_pump: f64,
    /// Nominal drive relative to threshold; pulse segments set the
    /// instantaneous drive, this documents the run and seeds helpers.
    pub mu0: f64,
    /// Initial signal envelope (characteristic units).
    pub seed_s: Complex64,
    /// Initial idler envelope (characteristic units).
    pub seed_i: Complex64,
    /// Substrate force-noise intensity relative to the mode baths.
    pub substrate_temp_ratio: f64,
    /// Eliminate the pump algebraically (valid for gamma_S >> gamma_{s,i}).
    pub adiabatic_pump: bool,
    /// Thermal amplitude epsilon: undriven quadrature variance is epsilon^2.
    pub thermal_amplitude: f64,
}

impl ThreeModeParams {
    pub fn new(gamma_s: f64, gamma_i: f64, gamma_pump: f64, mu0: f64) -> Self {
        Self {
            gamma_s,
            gamma_i,
            gamma_pump,
            mu0,
            seed_s: Complex64::new(0.0, 0.0),
            seed_i: Complex64::new(0.0, 0.0),
            substrate_temp_ratio: 1.0,
            adiabatic_pump: true,
            thermal_amplitude: 1e-3,
        }
    }

    pub fn with_seeds(mut self, seed_s: Complex64, seed_i: Complex64) -> Self {
        self.seed_s = seed_s;
        self.seed_i = seed_i;
        self
    }

    pub fn with_thermal_amplitude(mut self, epsilon: f64) -> Self {
        self.thermal_amplitude = epsilon;
        self
    }

    pub fn gamma_bar(&self) -> f64 {
        0.5 * (self.gamma_s + self.gamma_i)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [
            ("gamma_s", self.gamma_s),
            ("gamma_i", self.gamma_i),
            ("gamma_pump", self.gamma_pump),
        ] {
            if !g.is_finite() || g <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {g}"
                )));
            }
        }
        if !self.mu0.is_finite() || self.mu0 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drive mu0 must be non-negative, got {}",
                self.mu0
            )));
        }
        if !(self.seed_s.is_finite() && self.seed_i.is_finite()) {
            return Err(Error::InvalidParameter("seeds must be finite".into()));
        }
        if !self.substrate_temp_ratio.is_finite() || self.substrate_temp_ratio < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "substrate temperature ratio must be non-negative, got {}",
                self.substrate_temp_ratio
            )));
        }
        if !self.thermal_amplitude.is_finite() || self.thermal_amplitude < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "thermal amplitude must be non-negative, got {}",
                self.thermal_amplitude
            )));
        }
        let separation = self.gamma_pump / self.gamma_s.max(self.gamma_i);
        if self.adiabatic_pump && separation < 100.0 {
            return Err(Error::InvalidParameter(format!(
                "adiabatic pump needs gamma_pump / max(gamma_s, gamma_i) >= 100, got {separation:.1}"
            )));
        }
        Ok(())
    }
}

pub(crate) struct ThreeModeState {
    a_s: Complex64,
    a_i: Complex64,
    /// Pump envelope A_S; tracked only when the pump is dynamical.
    pump: Complex64,
    /// Reduced rates gamma / gamma_bar.
    gs: f64,
    gi: f64,
    g_pump: f64,
    epsilon: f64,
    /// Substrate noise amplitude: sqrt(gamma_bar * force intensity).
    substrate_amp: f64,
    adiabatic: bool,
}

impl ThreeModeState {
    /// Thermal start around the seeds, same draw order as the two-mode
    /// system (X_s, Y_s, X_i, Y_i); the pump starts on its undepleted
    /// adiabatic value for the opening drive.
    pub(crate) fn init(params: &ThreeModeParams, mu_first: f64, rng: &mut ChaCha8Rng) -> Self {
        let gbar = params.gamma_bar();
        let eps = params.thermal_amplitude;
        let a_s = params.seed_s + eps * standard_complex(rng);
        let a_i = params.seed_i + eps * standard_complex(rng);
        Self {
            a_s,
            a_i,
            pump: Complex64::new(0.0, 1.0) * (mu_first - a_s * a_i),
            gs: params.gamma_s / gbar,
            gi: params.gamma_i / gbar,
            g_pump: params.gamma_pump / gbar,
            epsilon: eps,
            substrate_amp: eps * (2.0 * params.substrate_temp_ratio).sqrt(),
            adiabatic: params.adiabatic_pump,
        }
    }
}

impl EnvelopeSystem for ThreeModeState {
    const HAS_PUMP: bool = true;

    fn euler_step(&mut self, mu: f64, dtau: f64, rng: &mut ChaCha8Rng) {
        let noise_s = (self.gs * dtau).sqrt() * self.epsilon * standard_complex(rng);
        let noise_i = (self.gi * dtau).sqrt() * self.epsilon * standard_complex(rng);
        // Shared substrate force draw, scaled to a per-step increment.
        let force = (self.substrate_amp * dtau.sqrt()) * standard_complex(rng);

        if self.adiabatic {
            // Pump follows instantly: A_S = i (mu - a_s a_i + force noise).
            // The deterministic part drives both modes; the force noise
            // enters them directly as the pump's zero-lag transfer.
            let drive = mu - self.a_s * self.a_i;
            let drift_s = 0.5 * self.gs * (-self.a_s + self.a_i.conj() * drive);
            let drift_i = 0.5 * self.gi * (-self.a_i + self.a_s.conj() * drive);
            let kick_s = 0.5 * self.gs * self.a_i.conj() * force;
            let kick_i = 0.5 * self.gi * self.a_s.conj() * force;
            self.a_s += drift_s * dtau + kick_s + noise_s;
            self.a_i += drift_i * dtau + kick_i + noise_i;
            self.pump = Complex64::new(0.0, 1.0) * drive;
        } else {
            // Coupling through the dynamical pump: i conj(A_i) A_S becomes
            // -i conj(a_i) A_S in the sign-flipped idler variables.
            let minus_i = Complex64::new(0.0, -1.0);
            let drift_s =
                0.5 * self.gs * (-self.a_s + minus_i * self.a_i.conj() * self.pump);
            let drift_i =
                0.5 * self.gi * (-self.a_i + minus_i * self.a_s.conj() * self.pump);
            let drift_pump = 0.5
                * self.g_pump
                * (-self.pump + Complex64::new(0.0, 1.0) * (mu - self.a_s * self.a_i));
            let pump_noise = Complex64::new(0.0, 0.5 * self.g_pump) * force;
            self.a_s += drift_s * dtau + noise_s;
            self.a_i += drift_i * dtau + noise_i;
            self.pump += drift_pump * dtau + pump_noise;
        }
    }

    fn mix(&mut self, angle: f64) {
        let (sin, cos) = angle.sin_cos();
        let (s, i) = (self.a_s, self.a_i);
        self.a_s = cos * s + sin * i;
        self.a_i = cos * i - sin * s;
    }

    fn phase_kick(&mut self, phase: f64) {
        self.a_s *= Complex64::from_polar(1.0, phase);
    }

    fn signal(&self) -> Complex64 {
        self.a_s
    }

    fn idler(&self) -> Complex64 {
        self.a_i
    }

    fn pump(&self) -> Complex64 {
        self.pump
    }

    fn drive_magnitude(&self, mu: f64) -> f64 {
        if self.adiabatic {
            (mu - self.a_s * self.a_i).norm()
        } else {
            self.pump.norm()
        }
    }

    fn max_norm_sqr(&self) -> f64 {
        self.a_s.norm_sqr().max(self.a_i.norm_sqr())
    }
}

/// Integrate `seq` for one run seeded by `(seed, stream 0)`.
pub fn integrate_three_mode(
    params: &ThreeModeParams,
    seq: &PulseSequence,
    step: &StepConfig,
    seed: u64,
) -> Result<Trajectory> {
    integrate_three_mode_stream(params, seq, step, seed, 0)
}

/// Integrate run `stream` of the ensemble rooted at `seed`.
pub fn integrate_three_mode_stream(
    params: &ThreeModeParams,
    seq: &PulseSequence,
    step: &StepConfig,
    seed: u64,
    stream: u64,
) -> Result<Trajectory> {
    let mut rng = run_stream(seed, stream);
    integrate_three_mode_with_rng(params, seq, step, &mut rng, seed, stream)
}

pub(crate) fn integrate_three_mode_with_rng(
    params: &ThreeModeParams,
    seq: &PulseSequence,
    step: &StepConfig,
    rng: &mut ChaCha8Rng,
    seed: u64,
    stream: u64,
) -> Result<Trajectory> {
    params.validate()?;
    if !params.adiabatic_pump {
        // Stiffness guard: the dynamical pump adds the rate gamma_S.
        let bound = 0.01 / params.gamma_pump;
        if step.dt > bound * (1.0 + 1e-9) {
            return Err(Error::StepTooCoarse {
                dt: step.dt,
                bound,
            });
        }
    }
    let mu_first = seq.segments().first().map_or(0.0, |s| s.mu());
    let mut sys = ThreeModeState::init(params, mu_first, rng);
    drive_sequence(&mut sys, seq, step, params.gamma_bar(), rng, seed, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::sequence::PulseSequence;

    fn params(mu0: f64) -> ThreeModeParams {
        let tp = 2.0 * std::f64::consts::PI;
        ThreeModeParams::new(tp * 0.083, tp * 0.108, tp * 50.0, mu0)
    }

    #[test]
    fn stiff_pump_requires_adiabatic_or_fine_step() {
        let mut p = params(2.0);
        p.adiabatic_pump = false;
        let seq = PulseSequence::constant_drive(2.0, 0.5).unwrap();
        let step = StepConfig::new(StepConfig::max_stable_dt(p.gamma_bar(), 2.0));
        match integrate_three_mode(&p, &seq, &step, 1) {
            Err(Error::StepTooCoarse { .. }) => {}
            other => panic!("expected stiffness rejection, got {other:?}"),
        }
        let step = StepConfig::new(0.01 / p.gamma_pump).with_stride(50);
        integrate_three_mode(&p, &seq, &step, 1).unwrap();
    }

    #[test]
    fn scale_separation_enforced_for_adiabatic_runs() {
        let tp = 2.0 * std::f64::consts::PI;
        let p = ThreeModeParams::new(tp * 0.083, tp * 0.108, tp * 1.0, 2.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn deterministic_saturation_to_characteristic_amplitude() {
        // epsilon = 0 removes all noise: the seeded deterministic flow must
        // settle on |a_s| = sqrt(mu - 1) with the drive depleted to 1.
        let mu0 = 2.0;
        let p = params(mu0)
            .with_seeds(Complex64::new(0.05, 0.0), Complex64::new(0.05, 0.0))
            .with_thermal_amplitude(0.0);
        // Settling needs several 1/(gamma (mu-1)/2) growth times.
        let seq = PulseSequence::constant_drive(mu0, 400.0).unwrap();
        let step = StepConfig::new(StepConfig::max_stable_dt(p.gamma_bar(), mu0)).with_stride(100);
        let traj = integrate_three_mode(&p, &seq, &step, 7).unwrap();
        let a_end = traj.signal.last().unwrap().norm();
        assert!(
            (a_end - 1.0).abs() < 1e-3,
            "steady amplitude {a_end}, expected 1"
        );
        let mu_end = traj.mu.last().unwrap();
        assert!(
            (mu_end - 1.0).abs() < 1e-3,
            "steady drive {mu_end}, expected 1"
        );
        // The pump channel agrees with the recorded drive magnitude.
        let p_end = traj.pump.as_ref().unwrap().last().unwrap().norm();
        assert!((p_end - mu_end).abs() < 1e-12);
    }

    #[test]
    fn dynamical_pump_matches_adiabatic_fixed_point() {
        let mu0 = 3.0;
        let mut p = params(mu0)
            .with_seeds(Complex64::new(0.05, 0.0), Complex64::new(0.05, 0.0))
            .with_thermal_amplitude(0.0);
        p.adiabatic_pump = false;
        let seq = PulseSequence::constant_drive(mu0, 200.0).unwrap();
        let step = StepConfig::new(0.01 / p.gamma_pump).with_stride(1000);
        let traj = integrate_three_mode(&p, &seq, &step, 3).unwrap();
        let a_end = traj.signal.last().unwrap().norm();
        assert!(
            (a_end - (mu0 - 1.0).sqrt()).abs() < 1e-3,
            "steady amplitude {a_end}"
        );
        assert!((traj.mu.last().unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn below_threshold_stays_thermal_sized() {
        let p = params(0.5).with_thermal_amplitude(1e-3);
        let seq = PulseSequence::constant_drive(0.5, 20.0).unwrap();
        let step = StepConfig::new(StepConfig::max_stable_dt(p.gamma_bar(), 0.5)).with_stride(20);
        let traj = integrate_three_mode(&p, &seq, &step, 21).unwrap();
        // Amplified-quadrature scale: epsilon / sqrt(1 - mu) ~ 1.4e-3.
        for a in traj.signal.iter().chain(traj.idler.iter()) {
            assert!(a.norm() < 50e-3, "envelope left the thermal scale: {a}");
        }
    }
}
