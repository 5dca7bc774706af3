//! Pump-depletion diagnostics.
//!
//! A depletion factor eta means the envelope product has reached
//! |A_s A_i| = eta |F_S|: the pump loses that fraction of its drive to the
//! growing modes. The companion predictor evaluates the seeded, undepleted
//! growth at the squeezing-saturation pulse length t_PA = ln(10 mu0) /
//! (gamma (1 + mu0)), where the gain factor is (10 mu0)^((mu0-1)/(mu0+1)),
//! and its large-mu0 asymptote 10 * s0 * i0.

use crate::engine::sequence::Segment;
use crate::engine::trajectory::Trajectory;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepletionPrediction {
    /// eta at the saturation pulse length: gain * s0 * i0 / mu0.
    pub at_saturation: f64,
    /// Large-drive limit 10 * s0 * i0.
    pub asymptotic: f64,
}

/// Predicted depletion for seed magnitudes `seed_s`, `seed_i` under drive
/// `mu0`, at the squeezing-saturation pulse length.
pub fn eta_predicted(mu0: f64, seed_s: f64, seed_i: f64) -> Result<DepletionPrediction> {
    if !mu0.is_finite() || mu0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "drive mu0 must be positive, got {mu0}"
        )));
    }
    for (name, s) in [("seed_s", seed_s), ("seed_i", seed_i)] {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{name} must be a non-negative magnitude, got {s}"
            )));
        }
    }
    let gain_sq = (10.0 * mu0).powf((mu0 - 1.0) / (mu0 + 1.0));
    Ok(DepletionPrediction {
        at_saturation: gain_sq * seed_s * seed_i / mu0,
        asymptotic: 10.0 * seed_s * seed_i,
    })
}

/// Largest envelope-product-to-drive ratio max |A_s A_i| / mu0 reached in
/// the trajectory's driven parametric windows.
pub fn pump_depletion_factor(traj: &Trajectory) -> Result<f64> {
    if traj.pump.is_none() {
        return Err(Error::MissingPumpRecord);
    }
    let mut eta: Option<f64> = None;
    for w in &traj.windows {
        if let Segment::Pa { mu, .. } = w.segment {
            if mu > 0.0 {
                let mut peak: f64 = 0.0;
                for k in w.first_sample..=w.last_sample {
                    peak = peak.max((traj.signal[k] * traj.idler[k]).norm());
                }
                let e = peak / mu;
                eta = Some(eta.map_or(e, |cur| cur.max(e)));
            }
        }
    }
    eta.ok_or_else(|| Error::InvalidSequence("no driven parametric window in trajectory".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::sequence::PulseSequence;
    use crate::engine::three_mode::{integrate_three_mode, ThreeModeParams};
    use crate::engine::two_mode::integrate_two_mode;
    use crate::engine::StepConfig;
    use crate::model::modes::ModePair;
    use num_complex::Complex64;

    #[test]
    fn paper_scale_prediction() {
        let p = eta_predicted(38.0, 0.03, 0.03).unwrap();
        assert!((p.at_saturation - 0.00663660415700771).abs() < 1e-15);
        assert!((p.asymptotic - 0.009).abs() < 1e-15);
        assert!(p.at_saturation < p.asymptotic);
    }

    #[test]
    fn zero_seed_deterministic_run_has_no_depletion() {
        let tp = 2.0 * std::f64::consts::PI;
        let params = ThreeModeParams::new(tp * 0.083, tp * 0.108, tp * 50.0, 2.0)
            .with_thermal_amplitude(0.0);
        let seq = PulseSequence::constant_drive(2.0, 5.0).unwrap();
        let step = StepConfig::new(StepConfig::max_stable_dt(params.gamma_bar(), 2.0));
        let traj = integrate_three_mode(&params, &seq, &step, 1).unwrap();
        assert_eq!(pump_depletion_factor(&traj).unwrap(), 0.0);
    }

    #[test]
    fn depletion_requires_pump_record_and_drive() {
        let tp = 2.0 * std::f64::consts::PI;
        let modes = ModePair::new(tp * 1.233e6, tp * 1.466e6, tp * 0.083, tp * 0.108).unwrap();
        let seq = PulseSequence::constant_drive(2.0, 0.5).unwrap();
        let step = StepConfig::new(1e-3);
        let two = integrate_two_mode(&modes, &seq, &step, 1).unwrap();
        assert!(matches!(
            pump_depletion_factor(&two),
            Err(Error::MissingPumpRecord)
        ));

        let params = ThreeModeParams::new(tp * 0.083, tp * 0.108, tp * 50.0, 0.0)
            .with_seeds(Complex64::new(0.01, 0.0), Complex64::new(0.01, 0.0));
        let undriven = PulseSequence::new(vec![Segment::Dwell {
            duration: 1.0,
            sensing_phase: 0.0,
        }])
        .unwrap();
        let traj = integrate_three_mode(&params, &undriven, &step, 1).unwrap();
        assert!(matches!(
            pump_depletion_factor(&traj),
            Err(Error::InvalidSequence(_))
        ));
    }

    #[test]
    fn depletion_grows_with_seed_magnitude() {
        let tp = 2.0 * std::f64::consts::PI;
        let seq = PulseSequence::constant_drive(10.0, 1.5).unwrap();
        let mut last = 0.0;
        for s in [0.01, 0.02, 0.04] {
            let params = ThreeModeParams::new(tp * 0.083, tp * 0.108, tp * 50.0, 10.0)
                .with_seeds(Complex64::new(s, 0.0), Complex64::new(s, 0.0))
                .with_thermal_amplitude(0.0);
            let step = StepConfig::new(StepConfig::max_stable_dt(params.gamma_bar(), 10.0));
            let traj = integrate_three_mode(&params, &seq, &step, 3).unwrap();
            let eta = pump_depletion_factor(&traj).unwrap();
            assert!(eta > last, "eta {eta} after {last}");
            last = eta;
        }
    }
}
