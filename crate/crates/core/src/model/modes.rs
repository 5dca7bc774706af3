//! Mode-pair and drive parameter types.
//!
//! Amplitudes are thermal-normalized: an undriven mode in contact with its
//! bath relaxes to unit variance per quadrature of a = X + iY. Physical
//! zero-point lengths and masses never appear; the pump couplings enter only
//! through the drive ratio mu (pump amplitude over threshold), the squeeze
//! argument r, and the beamsplitter mixing angle.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The signal/idler mode pair: resonance frequencies, energy damping rates,
/// and coherent seed amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePair {
    /// Signal angular frequency (rad/s).
    pub omega_s: f64,
    /// Idler angular frequency (rad/s).
    pub omega_i: f64,
    /// Signal energy damping rate (rad/s).
    pub gamma_s: f64,
    /// Idler energy damping rate (rad/s).
    pub gamma_i: f64,
    /// Coherent seed of the signal envelope (thermal-normalized).
    pub alpha_s: Complex64,
    /// Coherent seed of the idler envelope (thermal-normalized).
    pub alpha_i: Complex64,
}

impl ModePair {
    /// Unseeded pair.
    pub fn new(omega_s: f64, omega_i: f64, gamma_s: f64, gamma_i: f64) -> Result<Self> {
        Self::with_seeds(
            omega_s,
            omega_i,
            gamma_s,
            gamma_i,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    pub fn with_seeds(
        omega_s: f64,
        omega_i: f64,
        gamma_s: f64,
        gamma_i: f64,
        alpha_s: Complex64,
        alpha_i: Complex64,
    ) -> Result<Self> {
        let pair = Self {
            omega_s,
            omega_i,
            gamma_s,
            gamma_i,
            alpha_s,
            alpha_i,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Matched pair: equal damping, arbitrary (distinct) frequencies.
    pub fn matched(gamma: f64) -> Result<Self> {
        Self::new(1.0, 2.0, gamma, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_s", self.omega_s),
            ("omega_i", self.omega_i),
            ("gamma_s", self.gamma_s),
            ("gamma_i", self.gamma_i),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if self.gamma_s <= 0.0 || self.gamma_i <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "damping rates must be positive, got gamma_s = {}, gamma_i = {}",
                self.gamma_s, self.gamma_i
            )));
        }
        if self.omega_s == self.omega_i {
            return Err(Error::InvalidParameter(format!(
                "modes must be nondegenerate, got omega_s = omega_i = {}",
                self.omega_s
            )));
        }
        if !self.alpha_s.is_finite() || !self.alpha_i.is_finite() {
            return Err(Error::InvalidParameter(
                "seed amplitudes must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Mean damping rate (gamma_s + gamma_i)/2.
    pub fn gamma_bar(&self) -> f64 {
        0.5 * (self.gamma_s + self.gamma_i)
    }

    /// Fractional damping mismatch (gamma_s - gamma_i)/(gamma_s + gamma_i).
    pub fn delta_gamma(&self) -> f64 {
        (self.gamma_s - self.gamma_i) / (self.gamma_s + self.gamma_i)
    }

    /// Fractional frequency mismatch (omega_s - omega_i)/(omega_s + omega_i).
    pub fn delta_omega(&self) -> f64 {
        (self.omega_s - self.omega_i) / (self.omega_s + self.omega_i)
    }

    pub fn mismatch(&self) -> MismatchParams {
        MismatchParams {
            delta_omega: self.delta_omega(),
            delta_gamma: self.delta_gamma(),
            gamma_bar: self.gamma_bar(),
        }
    }
}

/// Pump drive settings for one pulse pair: sum-frequency (amplifier) and
/// difference-frequency (beamsplitter) pulses.
///
/// The raw substrate amplitudes and couplings enter only through mu, the
/// squeeze argument r = gamma_bar mu t_pa / 2, and the mixing angle phi_bs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpDrive {
    /// Drive ratio X_S over its threshold value.
    pub mu: f64,
    /// Beamsplitter mixing angle (rad) accumulated over the BS pulse.
    pub phi_bs: f64,
    /// Amplifier pulse duration (s).
    pub t_pa: f64,
    /// Beamsplitter pulse duration (s).
    pub t_bs: f64,
}

impl PumpDrive {
    pub fn new(mu: f64, phi_bs: f64, t_pa: f64, t_bs: f64) -> Result<Self> {
        let drive = Self {
            mu,
            phi_bs,
            t_pa,
            t_bs,
        };
        drive.validate()?;
        Ok(drive)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || self.mu < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drive ratio mu must be >= 0, got {}",
                self.mu
            )));
        }
        if !self.phi_bs.is_finite() {
            return Err(Error::InvalidParameter(
                "mixing angle phi_bs must be finite".into(),
            ));
        }
        if !self.t_pa.is_finite() || self.t_pa < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pulse duration t_pa must be >= 0, got {}",
                self.t_pa
            )));
        }
        if !self.t_bs.is_finite() || self.t_bs < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pulse duration t_bs must be >= 0, got {}",
                self.t_bs
            )));
        }
        Ok(())
    }

    /// Squeeze argument r = gamma_bar mu t_pa / 2 of the lossless pulse map.
    pub fn squeeze_argument(&self, gamma_bar: f64) -> f64 {
        0.5 * gamma_bar * self.mu * self.t_pa
    }
}

/// Reduced mismatch parameters of an unequal mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchParams {
    /// (omega_s - omega_i)/(omega_s + omega_i).
    pub delta_omega: f64,
    /// (gamma_s - gamma_i)/(gamma_s + gamma_i).
    pub delta_gamma: f64,
    /// (gamma_s + gamma_i)/2 (rad/s).
    pub gamma_bar: f64,
}

impl MismatchParams {
    pub fn from_modes(modes: &ModePair) -> Result<Self> {
        modes.validate()?;
        Ok(modes.mismatch())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_gamma.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "|delta_gamma| must be < 1, got {}",
                self.delta_gamma
            )));
        }
        if !(self.delta_omega.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "|delta_omega| must be < 1, got {}",
                self.delta_omega
            )));
        }
        if !self.gamma_bar.is_finite() || self.gamma_bar <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma_bar must be positive, got {}",
                self.gamma_bar
            )));
        }
        Ok(())
    }
}
