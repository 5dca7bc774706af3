//! Gaussian states of the mode pair and the two pulsed symplectic maps.
//!
//! Basis order is (X_s, Y_s, X_i, Y_i) with a = X + iY. The pump at the sum
//! frequency generates hyperbolic (two-mode squeezing) mixing; the pump at
//! the difference frequency generates circular (beamsplitter) mixing.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerated asymmetry / negativity when validating a covariance matrix.
/// Roundoff in chained maps can push an eigenvalue slightly below zero.
pub const COVARIANCE_FLOOR: f64 = -1e-10;

/// Gain pair of a parametric-amplifier pulse: envelope map
/// `a_s -> G a_s + g a_i*`, `a_i -> G a_i + g a_s*` with
/// G = cosh(r), g = sinh(r).
///
/// The hyperbolic constraint G^2 - g^2 = 1 is what makes the map symplectic.
/// `defect()` evaluates it through the factored form (G+g)(G-g) = e^r e^-r;
/// the raw difference of squares loses all significance once cosh^2(r)
/// outgrows the 53-bit mantissa (r around 8), while the factored form stays
/// exact to roundoff out to any representable r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaGains {
    gain: f64,
    cross_gain: f64,
    squeeze: f64,
}

/// Gains of a pulse with integrated squeeze parameter `r`.
pub fn pa_pulse_gains(r: f64) -> Result<PaGains> {
    PaGains::from_squeeze(r)
}

/// Pair-pump map from raw gains; rejects a non-symplectic pair.
pub fn apply_pa_map(state: &GaussianState, gain: f64, cross_gain: f64) -> Result<GaussianState> {
    Ok(state.apply_pa(&PaGains::from_raw(gain, cross_gain)?))
}

/// Mode-mixing rotation by the angle `phi_bs`.
pub fn apply_bs_map(state: &GaussianState, phi_bs: f64) -> GaussianState {
    state.apply_bs(phi_bs)
}

impl PaGains {
    /// `r` is the integrated pump area: coupling x pump quadrature x t_PA / 2.
    pub fn from_squeeze(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squeeze parameter must be finite, got {r}"
            )));
        }
        // cosh(710) overflows f64; anything close is unusable anyway.
        if r.abs() > 700.0 {
            return Err(Error::InvalidParameter(format!(
                "squeeze parameter {r} overflows the gain representation"
            )));
        }
        Ok(Self {
            gain: r.cosh(),
            cross_gain: r.sinh(),
            squeeze: r,
        })
    }

    /// Accept an externally supplied gain pair, checking the hyperbolic
    /// constraint. The check runs on (G+g)(G-g) and widens with the roundoff
    /// floor of the squares, so legitimately large gains are not rejected for
    /// representation error alone.
    pub fn from_raw(gain: f64, cross_gain: f64) -> Result<Self> {
        if !gain.is_finite() || !cross_gain.is_finite() || gain < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "gain pair ({gain}, {cross_gain}) is not a hyperbolic pair"
            )));
        }
        let defect = (gain + cross_gain) * (gain - cross_gain) - 1.0;
        let tol = 1e-9 + 16.0 * f64::EPSILON * (gain * gain + cross_gain * cross_gain);
        if defect.abs() > tol {
            return Err(Error::NonSymplecticGains { defect });
        }
        Ok(Self {
            gain,
            cross_gain,
            squeeze: cross_gain.asinh(),
        })
    }

    /// Direct gain G = cosh(r).
    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Conjugate (cross) gain g = sinh(r).
    pub fn cross_gain(&self) -> f64 {
        self.cross_gain
    }

    pub fn squeeze(&self) -> f64 {
        self.squeeze
    }

    /// G + g = e^r, computed without cancellation.
    pub fn sum_factor(&self) -> f64 {
        self.squeeze.exp()
    }

    /// G - g = e^-r, computed without cancellation.
    pub fn difference_factor(&self) -> f64 {
        (-self.squeeze).exp()
    }

    /// Departure of (G+g)(G-g) from 1, in the stable factored form.
    pub fn defect(&self) -> f64 {
        self.sum_factor() * self.difference_factor() - 1.0
    }

    /// Symplectic matrix of the pulse on (X_s, Y_s, X_i, Y_i).
    pub fn matrix(&self) -> Matrix4<f64> {
        let (big_g, g) = (self.gain, self.cross_gain);
        Matrix4::new(
            big_g, 0.0, g, 0.0, //
            0.0, big_g, 0.0, -g, //
            g, 0.0, big_g, 0.0, //
            0.0, -g, 0.0, big_g,
        )
    }
}

/// Quadrature index into the 4-vector basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    SignalX = 0,
    SignalY = 1,
    IdlerX = 2,
    IdlerY = 3,
}

/// Variances of the cross-quadratures d± = (a_s ± a_i) / sqrt(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossVariances {
    pub x_plus: f64,
    pub y_plus: f64,
    pub x_minus: f64,
    pub y_minus: f64,
}

/// Mean vector and covariance of the pair over (X_s, Y_s, X_i, Y_i).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: Vector4<f64>,
    cov: Matrix4<f64>,
}

impl GaussianState {
    /// Both modes thermal: zero mean, unit variance per quadrature.
    pub fn thermal() -> Self {
        Self {
            mean: Vector4::zeros(),
            cov: Matrix4::identity(),
        }
    }

    /// Coherent seeds on top of the thermal noise floor.
    pub fn coherent(alpha_s: Complex64, alpha_i: Complex64) -> Self {
        Self {
            mean: Vector4::new(alpha_s.re, alpha_s.im, alpha_i.re, alpha_i.im),
            cov: Matrix4::identity(),
        }
    }

    pub fn from_parts(mean: Vector4<f64>, cov: Matrix4<f64>) -> Result<Self> {
        let state = Self { mean, cov };
        state.validate()?;
        Ok(state)
    }

    pub fn mean(&self) -> &Vector4<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix4<f64> {
        &self.cov
    }

    pub fn var(&self, q: Quadrature) -> f64 {
        let i = q as usize;
        self.cov[(i, i)]
    }

    /// Symmetry and positive semidefiniteness (to the numerical floor).
    pub fn validate(&self) -> Result<()> {
        if self.mean.iter().any(|m| !m.is_finite())
            || self.cov.iter().any(|c| !c.is_finite())
        {
            return Err(Error::InvalidParameter(
                "state contains non-finite entries".into(),
            ));
        }
        let scale = 1.0 + self.cov.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (self.cov[(i, j)] - self.cov[(j, i)]).abs() > 1e-9 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "covariance is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let eigs = self.cov.symmetric_eigenvalues();
        if eigs.iter().any(|&e| e < COVARIANCE_FLOOR * scale) {
            return Err(Error::InvalidParameter(format!(
                "covariance is not positive semidefinite (min eigenvalue {:.3e})",
                eigs.iter().cloned().fold(f64::INFINITY, f64::min)
            )));
        }
        Ok(())
    }

    fn transformed(&self, s: &Matrix4<f64>) -> Self {
        let mean = s * self.mean;
        let cov = s * self.cov * s.transpose();
        // Re-symmetrize: S C S^T picks up roundoff asymmetry in chains.
        let cov = 0.5 * (cov + cov.transpose());
        Self { mean, cov }
    }

    /// Apply a parametric-amplifier pulse with the given gains.
    pub fn apply_pa(&self, gains: &PaGains) -> Self {
        self.transformed(&gains.matrix())
    }

    /// Apply a beamsplitter pulse of mixing angle `angle`:
    /// `a_s -> cos a_s + sin a_i`, `a_i -> cos a_i - sin a_s`.
    /// At angle pi/2 the modes swap (idler picks up a sign).
    pub fn apply_bs(&self, angle: f64) -> Self {
        let (c, s) = (angle.cos(), angle.sin());
        let m = Matrix4::new(
            c, 0.0, s, 0.0, //
            0.0, c, 0.0, s, //
            -s, 0.0, c, 0.0, //
            0.0, -s, 0.0, c,
        );
        self.transformed(&m)
    }

    /// Variances of d± = (a_s ± a_i)/sqrt(2), the eigenmodes of the pump
    /// coupling. For the thermal input these are the squeezed/amplified
    /// channels: Y_d+ and X_d- squeeze, X_d+ and Y_d- amplify.
    pub fn cross_variances(&self) -> CrossVariances {
        let c = &self.cov;
        let pair = |i: usize, j: usize, sign: f64| {
            0.5 * (c[(i, i)] + c[(j, j)] + 2.0 * sign * c[(i, j)])
        };
        CrossVariances {
            x_plus: pair(0, 2, 1.0),
            y_plus: pair(1, 3, 1.0),
            x_minus: pair(0, 2, -1.0),
            y_minus: pair(1, 3, -1.0),
        }
    }
}
