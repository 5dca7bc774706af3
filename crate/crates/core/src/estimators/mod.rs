//! Estimators turning trajectories and measurement ensembles into the
//! measured quantities: quadrature variances with standard errors,
//! squeezing in dB, cross-quadrature combinations, power-law and scaling
//! exponents, finite-window variances, and pump-depletion factors.
//!
//! All reductions are pure functions over immutable inputs and use pairwise
//! summation, so results are insensitive to evaluation order at the 1e-12
//! level.

mod depletion;
mod fits;
mod windowed;

pub use depletion::{eta_predicted, pump_depletion_factor, DepletionPrediction};
pub use fits::{fit_line, fit_power_law, fit_scaling_exponent, FitResult};
pub use windowed::{windowed_variance, windowed_variance_series};

use crate::engine::interferometer::MeasurementRecord;
use crate::error::{Error, Result};

/// A variance with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub value: f64,
    /// Standard error assuming near-Gaussian samples: value * sqrt(2/(n-1)).
    pub std_error: f64,
    pub n: usize,
}

/// Sum with pairwise (cascade) splitting: error grows like log n instead of
/// n, making the reduction order-insensitive to ~1e-12 relative.
pub(crate) fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 32 {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

/// Unbiased sample variance of `samples` with a Gaussian-theory standard
/// error (value * sqrt(2/(n-1))); treat the error as approximate for
/// visibly non-Gaussian samples.
pub fn ensemble_variance(samples: &[f64]) -> Result<VarianceEstimate> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::NotEnoughSamples { need: 2, got: n });
    }
    if let Some(idx) = samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite sample at index {idx}"
        )));
    }
    let mean = pairwise_sum(samples) / n as f64;
    let sq: Vec<f64> = samples.iter().map(|s| (s - mean) * (s - mean)).collect();
    let value = pairwise_sum(&sq) / (n - 1) as f64;
    Ok(VarianceEstimate {
        value,
        std_error: value * (2.0 / (n - 1) as f64).sqrt(),
        n,
    })
}

/// Cross-quadrature combinations d_pm = (a_s pm a_i)/sqrt(2) of one
/// measurement, plus the amplitude quadratures r = sqrt(x^2 + y^2) and
/// their sum/difference combinations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossQuadratures {
    pub x_plus: f64,
    pub y_plus: f64,
    pub x_minus: f64,
    pub y_minus: f64,
    pub r_s: f64,
    pub r_i: f64,
    pub r_plus: f64,
    pub r_minus: f64,
}

pub fn cross_quadratures(record: &MeasurementRecord) -> CrossQuadratures {
    cross_quadratures_parts(record.x_s, record.y_s, record.x_i, record.y_i)
}

pub fn cross_quadratures_parts(x_s: f64, y_s: f64, x_i: f64, y_i: f64) -> CrossQuadratures {
    let inv_rt2 = std::f64::consts::FRAC_1_SQRT_2;
    let r_s = x_s.hypot(y_s);
    let r_i = x_i.hypot(y_i);
    CrossQuadratures {
        x_plus: (x_s + x_i) * inv_rt2,
        y_plus: (y_s + y_i) * inv_rt2,
        x_minus: (x_s - x_i) * inv_rt2,
        y_minus: (y_s - y_i) * inv_rt2,
        r_s,
        r_i,
        r_plus: (r_s + r_i) * inv_rt2,
        r_minus: (r_s - r_i) * inv_rt2,
    }
}

/// Noise level relative to `reference` in decibel: negative = squeezed.
pub fn squeezing_db(variance: f64, reference: f64) -> Result<f64> {
    if !variance.is_finite() || variance <= 0.0 {
        return Err(Error::NonPositiveData {
            what: "variance".into(),
            index: 0,
        });
    }
    if !reference.is_finite() || reference <= 0.0 {
        return Err(Error::NonPositiveData {
            what: "reference".into(),
            index: 0,
        });
    }
    Ok(10.0 * (variance / reference).log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_and_constant_variances() {
        let v = ensemble_variance(&[-1.0, 1.0]).unwrap();
        assert_eq!(v.value, 2.0);
        let c = ensemble_variance(&[3.5; 100]).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(ensemble_variance(&[1.0]).is_err());
        assert!(ensemble_variance(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn gaussian_variance_standard_error() {
        use rand::Rng;
        let mut rng = crate::engine::run_stream(4242, 0);
        let samples: Vec<f64> = (0..10_000)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let v = ensemble_variance(&samples).unwrap();
        assert!((v.std_error - v.value * (2.0f64 / 9999.0).sqrt()).abs() < 1e-15);
        assert!(
            (v.value - 1.0).abs() < 3.0 * v.std_error,
            "variance {} +- {}",
            v.value,
            v.std_error
        );
        assert!((v.std_error - 0.014 * v.value).abs() < 1e-3);
    }

    #[test]
    fn cross_quadrature_examples() {
        let c = cross_quadratures_parts(1.0, 0.5, 1.0, 0.5);
        assert_eq!(c.x_minus, 0.0);
        assert_eq!(c.y_minus, 0.0);
        let c = cross_quadratures_parts(1.0, 0.0, -1.0, 0.0);
        assert!((c.x_minus - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(c.x_plus, 0.0);
        let c = cross_quadratures_parts(3.0, 4.0, 0.0, 0.0);
        assert_eq!(c.r_s, 5.0);
        assert!((c.r_minus - 5.0 * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn squeezing_db_examples() {
        assert!((squeezing_db(0.5, 1.0).unwrap() + 3.0103).abs() < 1e-4);
        assert!((squeezing_db(1.0 / 39.0, 1.0).unwrap() + 15.9106).abs() < 1e-4);
        assert_eq!(squeezing_db(1.0, 1.0).unwrap(), 0.0);
        assert!(squeezing_db(0.0, 1.0).is_err());
        assert!(squeezing_db(1.0, -1.0).is_err());
    }
}
