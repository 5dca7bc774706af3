//! Shared segment-sequencing driver for the stochastic steppers.
//!
//! Both envelope systems (linear two-mode, three-mode with pump) evolve
//! through the same pulse-sequence machinery: strided recording with
//! guaranteed samples at every segment boundary, exact mode-mixing rotations
//! during beamsplitter segments, the sensing-phase kick at the end of a
//! dwell window, in-loop averaging over the measurement window, and the
//! divergence guard. The driver owns all of that; a system only supplies
//! its Euler-Maruyama step and instantaneous state.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::engine::sequence::{PulseSequence, Segment};
use crate::engine::trajectory::{SegmentWindow, Trajectory};
use crate::error::{Error, Result};

/// Integrator resolution and safety settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Step (seconds). Must satisfy dt <= 0.01 / (gamma_bar (1 + mu_max)).
    pub dt: f64,
    /// Record every n-th step (boundaries are always recorded).
    pub record_stride: usize,
    /// Envelope magnitude beyond which the run is declared divergent.
    pub overflow_guard: f64,
}

impl StepConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            record_stride: 1,
            overflow_guard: 1e6,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    /// Largest admissible step for mean rate `gamma_bar` and peak drive
    /// `mu_max`: one percent of the fastest relaxation time.
    pub fn max_stable_dt(gamma_bar: f64, mu_max: f64) -> f64 {
        0.01 / (gamma_bar * (1.0 + mu_max))
    }

    pub fn validate(&self, gamma_bar: f64, seq: &PulseSequence) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "step must be positive, got {}",
                self.dt
            )));
        }
        let bound = Self::max_stable_dt(gamma_bar, seq.max_mu());
        // Tolerate exact-bound steps computed from the same expression.
        if self.dt > bound * (1.0 + 1e-9) {
            return Err(Error::StepTooCoarse {
                dt: self.dt,
                bound,
            });
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter(
                "record stride must be >= 1".into(),
            ));
        }
        if !self.overflow_guard.is_finite() || self.overflow_guard <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "overflow guard must be positive, got {}",
                self.overflow_guard
            )));
        }
        Ok(())
    }
}

/// Unit complex Gaussian: independent N(0,1) real and imaginary parts,
/// real part drawn first (draw order is part of the determinism contract).
#[inline]
pub(crate) fn standard_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let x: f64 = rand::Rng::sample(rng, rand_distr::StandardNormal);
    let y: f64 = rand::Rng::sample(rng, rand_distr::StandardNormal);
    Complex64::new(x, y)
}

/// Number of Euler steps covering `duration`: exact multiples of `dt` keep
/// their count (guarding against `ceil` on 500.0000000000001), anything else
/// gets a short final step holding the remainder.
pub(crate) fn step_count(duration: f64, dt: f64) -> u64 {
    let ratio = duration / dt;
    let n = if (ratio - ratio.round()).abs() < 1e-9 {
        ratio.round()
    } else {
        ratio.ceil()
    };
    (n as u64).max(1)
}

/// One stochastic envelope system driven through a pulse sequence.
pub(crate) trait EnvelopeSystem {
    /// Whether trajectories carry a pump channel.
    const HAS_PUMP: bool;

    /// One Euler-Maruyama step of reduced length `dtau` = gamma_bar dt under
    /// drive `mu`. Must draw its noise in a fixed order.
    fn euler_step(&mut self, mu: f64, dtau: f64, rng: &mut ChaCha8Rng);

    /// Exact mode-mixing rotation by `angle`.
    fn mix(&mut self, angle: f64);

    /// Sensing-phase rotation of the signal envelope.
    fn phase_kick(&mut self, phase: f64);

    fn signal(&self) -> Complex64;
    fn idler(&self) -> Complex64;
    fn pump(&self) -> Complex64;

    /// Instantaneous drive magnitude recorded as the trajectory's mu(t).
    fn drive_magnitude(&self, mu: f64) -> f64;

    fn max_norm_sqr(&self) -> f64;
}

/// Sample channels accumulated during a run.
struct Channels {
    times: Vec<f64>,
    signal: Vec<Complex64>,
    idler: Vec<Complex64>,
    pump: Vec<Complex64>,
    mu: Vec<f64>,
}

impl Channels {
    fn with_capacity(cap: usize, has_pump: bool) -> Self {
        Self {
            times: Vec::with_capacity(cap),
            signal: Vec::with_capacity(cap),
            idler: Vec::with_capacity(cap),
            pump: if has_pump {
                Vec::with_capacity(cap)
            } else {
                Vec::new()
            },
            mu: Vec::with_capacity(cap),
        }
    }

    fn push<S: EnvelopeSystem>(&mut self, t: f64, sys: &S, mu: f64) {
        self.times.push(t);
        self.signal.push(sys.signal());
        self.idler.push(sys.idler());
        if S::HAS_PUMP {
            self.pump.push(sys.pump());
        }
        self.mu.push(sys.drive_magnitude(mu));
    }

    /// Replace the last sample's state in place (same-instant map).
    fn overwrite_last<S: EnvelopeSystem>(&mut self, sys: &S, mu: f64) {
        *self.signal.last_mut().unwrap() = sys.signal();
        *self.idler.last_mut().unwrap() = sys.idler();
        if S::HAS_PUMP {
            *self.pump.last_mut().unwrap() = sys.pump();
        }
        *self.mu.last_mut().unwrap() = sys.drive_magnitude(mu);
    }

    fn len(&self) -> usize {
        self.times.len()
    }
}

/// Drive `sys` through `seq`, recording a trajectory. The generator must
/// already be positioned past any caller-level draws (seeding, jitter).
pub(crate) fn drive_sequence<S: EnvelopeSystem>(
    sys: &mut S,
    seq: &PulseSequence,
    step: &StepConfig,
    gamma_bar: f64,
    rng: &mut ChaCha8Rng,
    seed: u64,
    stream: u64,
) -> Result<Trajectory> {
    step.validate(gamma_bar, seq)?;

    let guard_sq = step.overflow_guard * step.overflow_guard;
    let cap = 2
        + (seq.total_duration() / (step.dt * step.record_stride as f64)).ceil() as usize
        + 2 * seq.segments().len();
    let mut rec = Channels::with_capacity(cap, S::HAS_PUMP);
    let mut windows = Vec::with_capacity(seq.segments().len());
    let mut measured = None;

    let mu0 = seq.segments().first().map_or(0.0, Segment::mu);
    rec.push(0.0, sys, mu0);

    let mut t = 0.0;
    let mut global_step: usize = 0;

    for seg in seq.segments() {
        let start = t;
        let duration = seg.duration();
        let first_sample = rec.len() - 1; // boundary state is always recorded
        let seg_mu = seg.mu();

        // Per-step mixing angle for a finite-length beamsplitter pulse.
        let omega_mix = match *seg {
            Segment::Bs { angle, duration } if duration > 0.0 => angle / duration,
            _ => 0.0,
        };

        let mut acc = [0.0f64; 4];
        let mut acc_n = 0usize;
        let measuring = matches!(seg, Segment::Measure { .. });
        if measuring {
            let (s, i) = (sys.signal(), sys.idler());
            acc = [s.re, s.im, i.re, i.im];
            acc_n = 1;
        }

        if duration > 0.0 {
            let n_steps = step_count(duration, step.dt);
            let mut since_record = 0usize;
            for k in 0..n_steps {
                let dt_k = if k + 1 == n_steps {
                    duration - (n_steps - 1) as f64 * step.dt
                } else {
                    step.dt
                };
                debug_assert!(dt_k > 0.0);

                if omega_mix != 0.0 {
                    sys.mix(omega_mix * dt_k);
                }
                sys.euler_step(seg_mu, gamma_bar * dt_k, rng);

                global_step += 1;
                t = if k + 1 == n_steps {
                    start + duration
                } else {
                    start + (k + 1) as f64 * step.dt
                };

                let norm = sys.max_norm_sqr();
                if !norm.is_finite() || norm > guard_sq {
                    return Err(Error::Diverged {
                        step: global_step,
                        time: t,
                        guard: step.overflow_guard,
                        seed,
                    });
                }

                if measuring {
                    let (s, i) = (sys.signal(), sys.idler());
                    acc[0] += s.re;
                    acc[1] += s.im;
                    acc[2] += i.re;
                    acc[3] += i.im;
                    acc_n += 1;
                }

                since_record += 1;
                let boundary = k + 1 == n_steps;
                if since_record == step.record_stride || boundary {
                    // Dwell phase lands before the boundary sample below.
                    if !(boundary && matches!(seg, Segment::Dwell { .. })) {
                        rec.push(t, sys, seg_mu);
                    }
                    since_record = 0;
                }
            }
        }

        // Instantaneous segment actions.
        match *seg {
            Segment::Dwell { sensing_phase, .. } => {
                // The sensed phase rotates the signal envelope; applying it
                // at the window end is equivalent in law to a uniform
                // detuning, since damping and noise are phase-insensitive.
                if sensing_phase != 0.0 {
                    sys.phase_kick(sensing_phase);
                }
                if duration > 0.0 {
                    rec.push(start + duration, sys, seg_mu);
                } else {
                    // Same-instant state change: update the boundary sample.
                    rec.overwrite_last(sys, seg_mu);
                }
            }
            Segment::Bs { angle, duration } if duration == 0.0 => {
                sys.mix(angle);
                rec.overwrite_last(sys, seg_mu);
            }
            _ => {}
        }

        if measuring {
            measured = Some([
                acc[0] / acc_n as f64,
                acc[1] / acc_n as f64,
                acc[2] / acc_n as f64,
                acc[3] / acc_n as f64,
            ]);
        }

        windows.push(SegmentWindow {
            segment: *seg,
            start,
            end: start + duration,
            first_sample,
            last_sample: rec.len() - 1,
        });
        t = start + duration;
    }

    let traj = Trajectory {
        times: rec.times,
        signal: rec.signal,
        idler: rec.idler,
        pump: if S::HAS_PUMP { Some(rec.pump) } else { None },
        mu: rec.mu,
        windows,
        measured_means: measured,
        seed,
        stream,
        dt: step.dt,
    };
    debug_assert!(traj.validate().is_ok());
    Ok(traj)
}
