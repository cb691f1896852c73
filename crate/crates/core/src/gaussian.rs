//! Gaussian CDF/PDF evaluated at a point for a given mean and standard deviation.

use libm::erfc;

use crate::error::{OverlapError, Result};

/// `(point, mean, stddev)` for a normal distribution evaluated at `point`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub point: f64,
    pub mean: f64,
    pub stddev: f64,
}

impl GaussianParams {
    pub fn new(point: f64, mean: f64, stddev: f64) -> Self {
        Self {
            point,
            mean,
            stddev,
        }
    }

    fn check(&self) -> Result<()> {
        if self.stddev < 0.0 || self.stddev.is_nan() {
            return Err(OverlapError::Domain(format!(
                "standard deviation must be >= 0, got {}",
                self.stddev
            )));
        }
        Ok(())
    }
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// `P(N <= point)` for `N ~ Normal(mean, stddev^2)`; a step function when `stddev == 0`.
pub fn gaussian_cdf(p: GaussianParams) -> Result<f64> {
    p.check()?;
    Ok(cdf_unchecked(p.point, p.mean, p.stddev))
}

/// Density of `Normal(mean, stddev^2)` at `point`; zero when `stddev == 0`.
pub fn gaussian_pdf(p: GaussianParams) -> Result<f64> {
    p.check()?;
    Ok(pdf_unchecked(p.point, p.mean, p.stddev))
}

pub(crate) fn cdf_unchecked(a: f64, b: f64, c: f64) -> f64 {
    if c == 0.0 {
        if a >= b {
            1.0
        } else {
            0.0
        }
    } else {
        std_normal_cdf((a - b) / c)
    }
}

pub(crate) fn pdf_unchecked(a: f64, b: f64, c: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        std_normal_pdf((a - b) / c) / c
    }
}
