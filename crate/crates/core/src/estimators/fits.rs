//! Least-squares line and power-law fits.
//!
//! Power-law exponents are extracted the way they are conventionally read
//! off log-log figures: a straight-line fit to (ln x, ln y), optionally
//! weighted by inverse log-ordinate variances. With explicit weights the
//! slope uncertainty comes from the weight matrix; without, unit weights
//! are used and the uncertainty is scaled by the residual variance
//! (so an exact functional form reports uncertainty 0).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Slope for line fits; power-law or scaling exponent otherwise.
    pub exponent: f64,
    /// One-sigma uncertainty of the exponent.
    pub uncertainty: f64,
    /// Coefficient of determination of the fitted line.
    pub r_squared: f64,
    /// Abscissa range the fit used (original units).
    pub window: (f64, f64),
}

impl FitResult {
    /// Decades of abscissa the fit spans.
    pub fn decades(&self) -> f64 {
        if self.window.0 > 0.0 {
            (self.window.1 / self.window.0).log10()
        } else {
            f64::INFINITY
        }
    }

    /// Exponent fits on under a decade of range deserve suspicion.
    pub fn spans_decade(&self) -> bool {
        self.decades() >= 1.0
    }
}

/// Straight-line weighted least squares on the given coordinates; weights
/// are inverse ordinate variances (None = unit weights with
/// residual-scaled uncertainty).
fn line_fit(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 3 {
        return Err(Error::NotEnoughSamples { need: 3, got: n });
    }
    if y.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} ordinates for {} abscissas",
            y.len(),
            n
        )));
    }
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} points",
                w.len(),
                n
            )));
        }
        if let Some(i) = w.iter().position(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::NonPositiveData {
                what: "weight".into(),
                index: i,
            });
        }
    }
    let w_at = |i: usize| weights.map_or(1.0, |w| w[i]);

    let s: f64 = (0..n).map(w_at).sum();
    let sx: f64 = (0..n).map(|i| w_at(i) * x[i]).sum();
    let sy: f64 = (0..n).map(|i| w_at(i) * y[i]).sum();
    let x_bar = sx / s;
    // Shifted normal equations (Press-style): t_i = sqrt(w_i) (x_i - x_bar).
    let mut stt = 0.0;
    let mut slope = 0.0;
    for i in 0..n {
        let t = w_at(i).sqrt() * (x[i] - x_bar);
        stt += t * t;
        slope += t * w_at(i).sqrt() * y[i];
    }
    if stt <= 0.0 || !stt.is_finite() {
        return Err(Error::DegenerateWindow);
    }
    slope /= stt;
    let intercept = (sy - sx * slope) / s;

    let y_bar = sy / s;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..n {
        let r = y[i] - intercept - slope * x[i];
        ss_res += w_at(i) * r * r;
        let d = y[i] - y_bar;
        ss_tot += w_at(i) * d * d;
    }
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0 // all ordinates equal: a flat line explains everything
    };

    let slope_var = if weights.is_some() {
        1.0 / stt
    } else {
        // Unit weights: scale by the residual variance estimate.
        ss_res / (n - 2) as f64 / stt
    };
    Ok((slope, slope_var.max(0.0).sqrt(), r_squared))
}

/// Unweighted straight-line fit; `exponent` holds the slope.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<FitResult> {
    for (i, v) in x.iter().chain(y.iter()).enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite input at flat index {i}"
            )));
        }
    }
    let (slope, uncertainty, r_squared) = line_fit(x, y, None)?;
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        exponent: slope,
        uncertainty,
        r_squared,
        window: (lo, hi),
    })
}

/// Power-law fit y ~ x^p via least squares on (ln x, ln y). `weights`, if
/// given, are inverse variances of ln y (i.e. (y / sigma_y)^2).
pub fn fit_power_law(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<FitResult> {
    if y.len() != x.len() {
        return Err(Error::InvalidParameter(format!(
            "{} ordinates for {} abscissas",
            y.len(),
            x.len()
        )));
    }
    for (name, data) in [("x", x), ("y", y)] {
        if let Some(i) = data.iter().position(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::NonPositiveData {
                what: name.into(),
                index: i,
            });
        }
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (slope, uncertainty, r_squared) = line_fit(&lx, &ly, weights)?;
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        exponent: slope,
        uncertainty,
        r_squared,
        window: (lo, hi),
    })
}

/// Scaling exponent alpha of a sensitivity curve delta-phi ~ N^(-alpha).
pub fn fit_scaling_exponent(n_signal: &[f64], delta_phi: &[f64]) -> Result<FitResult> {
    let fit = fit_power_law(n_signal, delta_phi, None)?;
    Ok(FitResult {
        exponent: -fit.exponent,
        ..fit
    })
}
