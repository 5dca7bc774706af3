//! Declarative pulse sequences.
//!
//! A run is an ordered list of timed segments mirroring the experimental
//! timing diagram: a sum-frequency (amplifier) pulse, a free dwell carrying
//! the sensing phase, a difference-frequency (beamsplitter) pulse, and a
//! measurement window. Damping and thermal noise act throughout; the
//! segments only switch the pump couplings.

use crate::error::{Error, Result};

/// One timed element of a pulse sequence. All durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Sum-frequency pump at drive ratio `mu`: pair creation, two-mode
    /// squeezing. Zero duration is a no-op (the squeeze argument is
    /// mu gamma t / 2).
    Pa { mu: f64, duration: f64 },
    /// Free evolution; the signal envelope is rotated by `sensing_phase`
    /// over the segment (the interferometer's phase to be sensed).
    Dwell { duration: f64, sensing_phase: f64 },
    /// Difference-frequency pump mixing the modes by `angle` over the
    /// segment: a_s -> cos(angle) a_s + sin(angle) a_i and the idler
    /// counter-rotated. Zero duration applies the rotation instantaneously.
    Bs { angle: f64, duration: f64 },
    /// Readout: quadratures averaged over the window. Zero duration samples
    /// the instantaneous values.
    Measure { duration: f64 },
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match *self {
            Segment::Pa { duration, .. }
            | Segment::Dwell { duration, .. }
            | Segment::Bs { duration, .. }
            | Segment::Measure { duration } => duration,
        }
    }

    /// Drive ratio applied during the segment (zero unless pumping at the
    /// sum frequency).
    pub fn mu(&self) -> f64 {
        match *self {
            Segment::Pa { mu, .. } => mu,
            _ => 0.0,
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let d = self.duration();
        if !d.is_finite() || d < 0.0 {
            return Err(Error::InvalidSequence(format!(
                "segment {index}: duration must be >= 0, got {d}"
            )));
        }
        match *self {
            Segment::Pa { mu, .. } => {
                if !mu.is_finite() || mu < 0.0 {
                    return Err(Error::InvalidSequence(format!(
                        "segment {index}: drive ratio must be >= 0, got {mu}"
                    )));
                }
            }
            Segment::Dwell { sensing_phase, .. } => {
                if !sensing_phase.is_finite() {
                    return Err(Error::InvalidSequence(format!(
                        "segment {index}: sensing phase must be finite"
                    )));
                }
            }
            Segment::Bs { angle, .. } => {
                if !angle.is_finite() {
                    return Err(Error::InvalidSequence(format!(
                        "segment {index}: mixing angle must be finite"
                    )));
                }
            }
            Segment::Measure { .. } => {}
        }
        Ok(())
    }
}

/// Validated ordered segment list.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    segments: Vec<Segment>,
}

impl PulseSequence {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let mut measures = 0usize;
        for (i, seg) in segments.iter().enumerate() {
            seg.validate(i)?;
            if matches!(seg, Segment::Measure { .. }) {
                measures += 1;
            }
        }
        if measures > 1 {
            return Err(Error::InvalidSequence(format!(
                "at most one measurement window, got {measures}"
            )));
        }
        Ok(Self { segments })
    }

    /// The canonical interferometer timing: amplifier pulse, sensing dwell,
    /// beamsplitter pulse, measurement window.
    pub fn interferometer(
        mu: f64,
        t_pa: f64,
        dwell: f64,
        sensing_phase: f64,
        bs_angle: f64,
        t_bs: f64,
        t_measure: f64,
    ) -> Result<Self> {
        Self::new(vec![
            Segment::Pa { mu, duration: t_pa },
            Segment::Dwell {
                duration: dwell,
                sensing_phase,
            },
            Segment::Bs {
                angle: bs_angle,
                duration: t_bs,
            },
            Segment::Measure {
                duration: t_measure,
            },
        ])
    }

    /// A single constant-drive window (growth and steady-state studies).
    pub fn constant_drive(mu: f64, duration: f64) -> Result<Self> {
        Self::new(vec![Segment::Pa { mu, duration }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    /// Largest drive ratio over the sequence; sets the fastest contraction
    /// rate gamma (1 + mu) the integrator step must resolve.
    pub fn max_mu(&self) -> f64 {
        self.segments.iter().map(Segment::mu).fold(0.0, f64::max)
    }

    pub fn has_measure(&self) -> bool {
        self.segments
            .iter()
            .any(|s| matches!(s, Segment::Measure { .. }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interferometer_sequence_shape() {
        let seq = PulseSequence::interferometer(38.0, 0.13, 0.0, 0.0, -0.785, 0.01, 0.05).unwrap();
        assert_eq!(seq.segments().len(), 4);
        assert!((seq.total_duration() - 0.19).abs() < 1e-15);
        assert_eq!(seq.max_mu(), 38.0);
        assert!(seq.has_measure());
    }

    #[test]
    fn two_measure_windows_rejected() {
        let r = PulseSequence::new(vec![
            Segment::Measure { duration: 0.1 },
            Segment::Measure { duration: 0.1 },
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn negative_duration_rejected() {
        assert!(PulseSequence::new(vec![Segment::Dwell {
            duration: -1.0,
            sensing_phase: 0.0
        }])
        .is_err());
        assert!(PulseSequence::constant_drive(f64::NAN, 1.0).is_err());
    }
}
