//! Trajectory records produced by the stochastic integrators.

use num_complex::Complex64;

use crate::engine::sequence::Segment;
use crate::error::{Error, Result};

/// Where a segment landed on the sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentWindow {
    pub segment: Segment,
    /// Segment start/end times (s).
    pub start: f64,
    pub end: f64,
    /// Inclusive index range of the recorded samples covering the segment;
    /// boundaries are always recorded, so first <= last.
    pub first_sample: usize,
    pub last_sample: usize,
}

/// One integrated run: sampled envelopes on a strictly increasing time grid.
///
/// `mu` is the instantaneous effective drive ratio per sample — the
/// configured segment drive for the linear engine, |A_pump| for the
/// three-mode engine (where depletion makes it dynamical). `pump` holds the
/// pump envelope when one is integrated.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub signal: Vec<Complex64>,
    pub idler: Vec<Complex64>,
    pub pump: Option<Vec<Complex64>>,
    pub mu: Vec<f64>,
    pub windows: Vec<SegmentWindow>,
    /// Quadrature means (X_s, Y_s, X_i, Y_i) over the measurement window,
    /// accumulated at full step resolution, when the sequence measures.
    pub measured_means: Option<[f64; 4]>,
    pub seed: u64,
    pub stream: u64,
    pub dt: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if self.signal.len() != n || self.idler.len() != n || self.mu.len() != n {
            return Err(Error::MalformedTrajectory(format!(
                "channel lengths disagree: {} times, {} signal, {} idler, {} mu",
                n,
                self.signal.len(),
                self.idler.len(),
                self.mu.len()
            )));
        }
        if let Some(p) = &self.pump {
            if p.len() != n {
                return Err(Error::MalformedTrajectory(format!(
                    "pump channel length {} != {}",
                    p.len(),
                    n
                )));
            }
        }
        for w in self.times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::MalformedTrajectory(format!(
                    "times must increase strictly, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let finite = self.times.iter().all(|t| t.is_finite())
            && self.signal.iter().all(|z| z.is_finite())
            && self.idler.iter().all(|z| z.is_finite())
            && self.mu.iter().all(|m| m.is_finite())
            && self
                .pump
                .as_ref()
                .map_or(true, |p| p.iter().all(|z| z.is_finite()));
        if !finite {
            return Err(Error::MalformedTrajectory("non-finite sample".into()));
        }
        Ok(())
    }

    /// The sample window of the measurement segment, if the sequence had one.
    pub fn measure_window(&self) -> Option<&SegmentWindow> {
        self.windows
            .iter()
            .find(|w| matches!(w.segment, Segment::Measure { .. }))
    }

    /// The first sum-frequency pump window, if any.
    pub fn pump_window(&self) -> Option<&SegmentWindow> {
        self.windows
            .iter()
            .find(|w| matches!(w.segment, Segment::Pa { .. }))
    }

    /// Sample index of the first time >= `t` (times are sorted).
    pub fn index_at(&self, t: f64) -> usize {
        self.times.partition_point(|&x| x < t)
    }
}
