//! Closed-form variance dynamics, steady states, and sensitivity of the
//! damped, pumped mode pair.
//!
//! With matched damping gamma and drive ratio mu, the cross-quadratures
//! d± = (a_s ± a_i)/sqrt(2) decouple:
//!
//!   dX_d+/dt = +(gamma/2)(mu - 1) X_d+ + sqrt(gamma) X_in
//!   dY_d+/dt = -(gamma/2)(mu + 1) Y_d+ + sqrt(gamma) Y_in
//!
//! and (X_d-, Y_d-) follow the same pair with the roles swapped. Starting
//! from the thermal level, the squeezed channels relax as
//!
//!   V_sq(t)  = 1/(1+mu) + mu/(1+mu) exp(-gamma (1+mu) t)
//!
//! and the amplified channels grow as
//!
//!   V_amp(t) = 1/(1-mu) + mu/(mu-1) exp(+gamma (mu-1) t),
//!
//! which degenerates to 1 + gamma t exactly on threshold (mu = 1).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::modes::MismatchParams;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn check_rate(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "damping rate must be positive, got {gamma}"
        )));
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<()> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "drive ratio mu must be >= 0, got {mu}"
        )));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "time must be >= 0, got {t}"
        )));
    }
    Ok(())
}

/// Squeezed-channel variance at time `t`, thermal start.
pub fn squeezed_variance_t(mu: f64, gamma: f64, t: f64) -> Result<f64> {
    check_mu(mu)?;
    check_rate(gamma)?;
    check_time(t)?;
    let floor = 1.0 / (1.0 + mu);
    Ok(floor + (1.0 - floor) * (-gamma * (1.0 + mu) * t).exp())
}

/// Amplified-channel variance at time `t`, thermal start.
///
/// One expression covers every regime through exp_m1:
/// V = 1 + mu * gamma t * expm1(x)/x with x = gamma (mu-1) t, which is the
/// closed form above rewritten without the 1/(mu-1) cancellation and reduces
/// to the critical ramp 1 + gamma t as mu -> 1.
pub fn amplified_variance_t(mu: f64, gamma: f64, t: f64) -> Result<f64> {
    check_mu(mu)?;
    check_rate(gamma)?;
    check_time(t)?;
    let x = gamma * (mu - 1.0) * t;
    let ratio = if x.abs() < 1e-12 { 1.0 } else { x.exp_m1() / x };
    Ok(1.0 + mu * gamma * t * ratio)
}

/// Exact on-threshold growth 1 + gamma t of the amplified channels.
pub fn critical_amplified_variance_t(gamma: f64, t: f64) -> Result<f64> {
    check_rate(gamma)?;
    check_time(t)?;
    Ok(1.0 + gamma * t)
}

/// Substrate (pump-mode) bath relative to the signal/idler baths. Only the
/// two limits have closed forms; intermediate temperature ratios are left to
/// the stochastic engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substrate {
    /// Substrate thermalized like the signal/idler modes.
    MatchedTemperature,
    /// Substrate bath frozen out.
    Cold,
}

/// Steady-state variances on either side of threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SteadyState {
    /// Cross-quadrature channels of the linear below-threshold dynamics.
    BelowThreshold { squeezed: f64, amplified: f64 },
    /// Above threshold the mean amplitudes are macroscopic and the relevant
    /// channels are the amplitude sum/difference (r_s ± r_i)/sqrt(2).
    AboveThreshold {
        amplitude_difference: f64,
        amplitude_sum: f64,
    },
}

/// Steady state of the matched model at drive `mu`.
///
/// Below threshold: squeezed 1/(1+mu), amplified 1/(1-mu). Above threshold,
/// linearizing about the self-oscillating state, the amplitude-difference
/// channel relaxes at the bare rate gamma and holds the threshold value 1/2
/// regardless of the substrate bath. The amplitude-sum channel relaxes at
/// gamma (mu-1): its mode-bath part is 1/(2(mu-1)), and a substrate at the
/// mode temperature adds 1/2 on top, giving mu/(2(mu-1)) - bounded below by
/// 1/2, which it approaches at strong drive; a cold substrate leaves the
/// bare 1/(2(mu-1)), squeezed without bound as mu grows.
/// Exactly on threshold no steady state exists (the amplified channel walks
/// off diffusively); use the transient forms there.
pub fn steady_state_phase_diagram(mu: f64, substrate: Substrate) -> Result<SteadyState> {
    check_mu(mu)?;
    if mu == 1.0 {
        return Err(Error::CriticalDrive);
    }
    if mu < 1.0 {
        Ok(SteadyState::BelowThreshold {
            squeezed: 1.0 / (1.0 + mu),
            amplified: 1.0 / (1.0 - mu),
        })
    } else {
        let amplitude_sum = match substrate {
            Substrate::MatchedTemperature => 0.5 * mu / (mu - 1.0),
            Substrate::Cold => 0.5 / (mu - 1.0),
        };
        Ok(SteadyState::AboveThreshold {
            amplitude_difference: 0.5,
            amplitude_sum,
        })
    }
}

/// Steady self-oscillation amplitude sqrt(mu - 1), in the characteristic
/// units of the three-mode flow (pump clamps to threshold, |A_pump| -> 1).
/// Zero at and below threshold, where there is no self-oscillation.
pub fn above_threshold_amplitude(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok((mu - 1.0).max(0.0).sqrt())
}

/// Exponential growth rate gamma (mu - 1)/2 of the amplified amplitude
/// channel above threshold.
pub fn amplitude_growth_rate(mu: f64, gamma: f64) -> Result<f64> {
    check_mu(mu)?;
    check_rate(gamma)?;
    if mu < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "growth rate applies at or above threshold, got mu = {mu}"
        )));
    }
    Ok(0.5 * gamma * (mu - 1.0))
}

/// Mean signal output quadrature and its slope against the mixing angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanOutput {
    pub x: f64,
    pub dx_dphi: f64,
}

/// Mean of X_s after pump pulse (duration `t_pa`, drive `mu`) and readout
/// mixing angle `phi`, for a coherent signal seed.
///
/// The seed splits evenly over the damped and amplified cross-channels:
///
///   <X_out> = Re[alpha_s]/sqrt(2) [ (cos phi - sin phi)/sqrt(2) e^(-gamma(mu+1)t/2)
///                                 + (cos phi + sin phi)/sqrt(2) e^(+gamma(mu-1)t/2) ].
///
/// At phi = -pi/4 only the damped channel survives, which is the dark-fringe
/// operating point: the slope there rides entirely on the amplified channel.
pub fn mean_output_quadrature(
    alpha_s: Complex64,
    phi: f64,
    mu: f64,
    gamma: f64,
    t_pa: f64,
) -> Result<MeanOutput> {
    check_mu(mu)?;
    check_rate(gamma)?;
    check_time(t_pa)?;
    if !phi.is_finite() {
        return Err(Error::InvalidParameter("mixing angle must be finite".into()));
    }
    let damped = (-0.5 * gamma * (mu + 1.0) * t_pa).exp();
    let grown = (0.5 * gamma * (mu - 1.0) * t_pa).exp();
    let (sin, cos) = phi.sin_cos();
    let re = alpha_s.re * FRAC_1_SQRT_2;
    Ok(MeanOutput {
        x: re * FRAC_1_SQRT_2 * ((cos - sin) * damped + (cos + sin) * grown),
        dx_dphi: re * FRAC_1_SQRT_2 * ((-sin - cos) * damped + (-sin + cos) * grown),
    })
}

/// Operating point of the pulsed interferometer at fixed remnant-noise
/// parameter k, evaluated at the dark fringe phi = -pi/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    /// Pulse-duration parameter: the squeezed variance is stopped k+1
    /// floors-worth above its asymptote, i.e. at (k+1)/(k(1+mu)).
    pub k: f64,
    /// Pump pulse length ln(k mu) / (gamma (1 + mu)).
    pub t_pa: f64,
    /// Phonon-number gain G^2 = exp(gamma mu t_pa).
    pub gain_sq: f64,
    /// Mean signal phonon number at readout, (Re[alpha_s] e^(gamma mu t/2))^2 / 4.
    pub n_signal: f64,
    /// Root of the squeezed output variance, sqrt(k+1) e^(-gamma(mu+1)t/2).
    pub remnant_noise: f64,
    /// Phase uncertainty sqrt(2(k+1)) e^(-gamma mu t_pa) / Re[alpha_s];
    /// equals sqrt(2(k+1))/4 x Re[alpha_s]/n_signal, hence the 1/N scaling.
    pub delta_phi: f64,
    /// Set when Re[alpha_s] is not large against the thermal spread, where
    /// the mean-field sensitivity expression starts to lose accuracy.
    pub small_seed: bool,
}

/// Sensitivity of the pulsed scheme with the pump stopped when the squeezed
/// variance sits k times above its floor: t_pa = ln(k mu)/(gamma(1+mu)).
pub fn phase_sensitivity(
    alpha_s: Complex64,
    mu: f64,
    gamma: f64,
    k: f64,
) -> Result<SensitivityPoint> {
    check_mu(mu)?;
    check_rate(gamma)?;
    if !k.is_finite() || k * mu <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "need k mu > 1 for a positive pulse length, got k = {k}, mu = {mu}"
        )));
    }
    let re = alpha_s.re;
    if re <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "signal seed must have positive real part, got {re}"
        )));
    }
    let t_pa = (k * mu).ln() / (gamma * (1.0 + mu));
    let gain_sq = (gamma * mu * t_pa).exp();
    let amp = re * (0.5 * gamma * mu * t_pa).exp();
    Ok(SensitivityPoint {
        k,
        t_pa,
        gain_sq,
        n_signal: amp * amp / 4.0,
        remnant_noise: (k + 1.0).sqrt() * (-0.5 * gamma * (mu + 1.0) * t_pa).exp(),
        delta_phi: (2.0 * (k + 1.0)).sqrt() / (re * gain_sq),
        small_seed: re < 10.0,
    })
}

/// Squeezed/amplified relaxation time constants of the mismatched pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchTimeConstants {
    /// 1 / (gamma_bar (1 + mu sqrt(1 - delta_gamma^2))).
    pub squeezed: f64,
    /// 1 / (gamma_bar |1 - mu sqrt(1 - delta_gamma^2)|).
    pub amplified: f64,
    /// The expressions drop a delta_gamma^2 term under the root, valid for
    /// mu well above delta_gamma/sqrt(1 - delta_gamma^2); cleared when the
    /// drive is too weak for that.
    pub within_validity: bool,
}

pub fn mismatch_time_constants(params: &MismatchParams, mu: f64) -> Result<MismatchTimeConstants> {
    params.validate()?;
    check_mu(mu)?;
    let root = (1.0 - params.delta_gamma * params.delta_gamma).sqrt();
    let coupling = mu * root;
    if (coupling - 1.0).abs() < 1e-12 {
        return Err(Error::CriticalDrive);
    }
    Ok(MismatchTimeConstants {
        squeezed: 1.0 / (params.gamma_bar * (1.0 + coupling)),
        amplified: 1.0 / (params.gamma_bar * (coupling - 1.0).abs()),
        within_validity: mu * root >= 10.0 * params.delta_gamma.abs(),
    })
}

/// Variance of an Ornstein-Uhlenbeck quadrature dX = -lambda X dt
/// + sqrt(gamma) dW surviving a measurement of length `tau_m`, i.e. the
/// spectral weight above the resolution cutoff omega_m = 2 pi / tau_m:
///
///   sigma^2 = (gamma / 2 lambda) (1 - (2/pi) arctan(omega_m / lambda)).
///
/// A long measurement recovers the full variance gamma/(2 lambda); a mode
/// much slower than the window is mostly averaged away.
pub fn truncated_ou_variance(lambda: f64, gamma: f64, tau_m: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "relaxation rate must be positive, got {lambda}"
        )));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise drive rate must be >= 0, got {gamma}"
        )));
    }
    if !tau_m.is_finite() || tau_m <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "measurement time must be positive, got {tau_m}"
        )));
    }
    let omega_m = 2.0 * std::f64::consts::PI / tau_m;
    Ok((gamma / (2.0 * lambda))
        * (1.0 - std::f64::consts::FRAC_2_PI * (omega_m / lambda).atan()))
}
