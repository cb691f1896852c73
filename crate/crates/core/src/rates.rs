//! Departure-rate functions of the plain and the Gaussian-adjusted fluid models.

use crate::error::{OverlapError, Result};
use crate::gaussian::{cdf_unchecked, pdf_unchecked};
use crate::model::QueueModel;

/// Variances below this are treated as zero by the adjusted rates.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Plain departure rate `mu * min(x, n)` (`mu * x` for infinite servers).
pub fn rate_f2(x: f64, model: &QueueModel) -> f64 {
    departure_rate(x, model.service_rate, model.servers.as_f64())
}

/// Adjusted departure rate `mu * E[min(N, n)]` for `N ~ Normal(x, u)`:
/// `mu * [n + (x - n) Phi(n, x, sqrt u) - u phi(n, x, sqrt u)]`.
///
/// With infinitely many servers this is `mu * x`.
pub fn rate_g2(x: f64, u: f64, model: &QueueModel) -> Result<f64> {
    if u < 0.0 || u.is_nan() {
        return Err(OverlapError::Domain(format!(
            "variance must be >= 0, got {u}"
        )));
    }
    Ok(adjusted_departure_rate(
        x,
        u,
        model.service_rate,
        model.servers.as_f64(),
    ))
}

#[inline]
pub(crate) fn departure_rate(x: f64, mu: f64, n: f64) -> f64 {
    mu * x.min(n)
}

#[inline]
pub(crate) fn adjusted_departure_rate(x: f64, u: f64, mu: f64, n: f64) -> f64 {
    if u < VARIANCE_FLOOR || n.is_infinite() {
        return departure_rate(x, mu, n);
    }
    let s = u.sqrt();
    mu * (n + (x - n) * cdf_unchecked(n, x, s) - u * pdf_unchecked(n, x, s))
}

/// `Phi(n, x, sqrt u)`, the probability that a Gaussian state is at most `n`.
#[inline]
pub(crate) fn below_capacity_probability(x: f64, u: f64, n: f64) -> f64 {
    if n.is_infinite() {
        return 1.0;
    }
    let s = if u < VARIANCE_FLOOR { 0.0 } else { u.sqrt() };
    cdf_unchecked(n, x, s)
}
