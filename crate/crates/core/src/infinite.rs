//! Closed-form and numeric fluid solutions of the M_t/M/inf queue with a
//! sinusoidal arrival rate `beta sin(alpha t) + lambda`, started empty.

use crate::error::{OverlapError, Result};
use crate::model::{QueueModel, RateFunction, Servers};
use crate::ode::{rk4, step_count};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidalInfModel {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl SinusoidalInfModel {
    pub fn new(alpha: f64, beta: f64, lambda: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(OverlapError::Config(format!(
                "mu must be positive, got {mu}"
            )));
        }
        if lambda < beta.abs() {
            return Err(OverlapError::Config(format!(
                "arrival rate would go negative: lambda = {lambda} < |beta| = {}",
                beta.abs()
            )));
        }
        Ok(Self {
            alpha,
            beta,
            lambda,
            mu,
        })
    }

    pub fn rate(&self, t: f64) -> f64 {
        self.beta * (self.alpha * t).sin() + self.lambda
    }

    /// The equivalent general queue model (empty start).
    pub fn to_queue_model(&self) -> Result<QueueModel> {
        QueueModel::new(
            Servers::Infinite,
            self.mu,
            RateFunction::plain_sinusoid(self.alpha, self.beta, self.lambda)?,
            0.0,
        )
    }

    /// `(beta / mu) / (1 + alpha^2 / mu^2)`, the gain of the periodic response.
    fn gain(&self) -> f64 {
        let r = self.alpha / self.mu;
        self.beta / self.mu / (1.0 + r * r)
    }
}

/// Fluid mean `x(t)` of the empty-started M_t/M/inf queue.
pub fn closed_form_x(m: &SinusoidalInfModel, t: f64) -> f64 {
    let (a, mu) = (m.alpha, m.mu);
    let r = a / mu;
    let decay = (-mu * t).exp();
    m.gain() * ((a * t).sin() - r * (a * t).cos() + r * decay) + m.lambda / mu * (1.0 - decay)
}

/// Exact `int_{from}^{to} x(t) dt` of [`closed_form_x`].
pub fn closed_form_integral(m: &SinusoidalInfModel, from: f64, to: f64) -> f64 {
    let (a, mu) = (m.alpha, m.mu);
    let r = a / mu;
    let d_exp = (-mu * to).exp() - (-mu * from).exp();
    let periodic = if a == 0.0 {
        // sin(0 t) vanishes and the remaining terms carry a factor alpha
        0.0
    } else {
        -((a * to).cos() - (a * from).cos()) / a
            - r * ((a * to).sin() - (a * from).sin()) / a
            - r / mu * d_exp
    };
    m.gain() * periodic + m.lambda / mu * ((to - from) + d_exp / mu)
}

/// Expected overlap `int_tau^{tau + 1/mu} x(t) dt`.
pub fn closed_form_overlap(m: &SinusoidalInfModel, tau: f64) -> f64 {
    closed_form_integral(m, tau, tau + 1.0 / m.mu)
}

/// RK4 solution of `dx/dt = lambda(t) - mu x` on `[0, T]`, returned as `(x, cum_x)` states.
pub fn numeric_solution(m: &SinusoidalInfModel, horizon: f64, h: f64) -> Result<Vec<[f64; 2]>> {
    let steps = step_count(horizon, h)?;
    Ok(rk4(
        |t, y: &[f64; 2]| [m.rate(t) - m.mu * y[0], y[0]],
        [0.0, 0.0],
        0.0,
        h,
        steps,
        |_| {},
    ))
}

/// Overlap from the RK4 solution, with the cumulative integral interpolated at both ends.
pub fn numeric_overlap_inf(m: &SinusoidalInfModel, tau: f64, h: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(OverlapError::Config(format!("tau must be >= 0, got {tau}")));
    }
    let end = tau + 1.0 / m.mu;
    let states = numeric_solution(m, end + h, h)?;
    let cum = |t: f64| {
        let pos = t / h;
        let i = (pos.floor() as usize).min(states.len() - 2);
        let w = pos - i as f64;
        states[i][1] + w * (states[i + 1][1] - states[i][1])
    };
    Ok(cum(end) - cum(tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2() -> SinusoidalInfModel {
        SinusoidalInfModel::new(0.5, 2.0, 10.0, 1.0).unwrap()
    }

    /// Composite Simpson quadrature, used as an independent integral oracle.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn starts_empty() {
        for m in [
            table2(),
            SinusoidalInfModel::new(3.0, -1.0, 1.5, 0.3).unwrap(),
        ] {
            assert!(closed_form_x(&m, 0.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_rate_transient() {
        let m = SinusoidalInfModel::new(0.5, 0.0, 10.0, 1.0).unwrap();
        let v = closed_form_x(&m, 2.0);
        assert!((v - 10.0 * (1.0 - (-2.0f64).exp())).abs() < 1e-12);
        assert!((v - 8.6466).abs() < 5e-5);
        assert!((closed_form_overlap(&m, 50.0) - 10.0).abs() < 1e-6);
        let flat = SinusoidalInfModel::new(0.0, 0.0, 10.0, 1.0).unwrap();
        assert!((closed_form_overlap(&flat, 50.0) - 10.0).abs() < 1e-6);
    }

    #[test]
    fn table_values() {
        let m = table2();
        for (tau, want) in [(3.0, 11.41), (5.0, 11.30), (7.0, 9.74), (9.0, 8.39)] {
            let cf = closed_form_overlap(&m, tau);
            assert!((cf - want).abs() < 0.005, "tau {tau}: {cf}");
            let num = numeric_overlap_inf(&m, tau, 1e-3).unwrap();
            assert!((num - cf).abs() < 1e-6, "tau {tau}: {num} vs {cf}");
        }
    }

    #[test]
    fn antiderivative_matches_quadrature() {
        for m in [
            table2(),
            SinusoidalInfModel::new(2.0, 1.0, 1.0, 0.5).unwrap(),
            SinusoidalInfModel::new(0.1, -3.0, 4.0, 2.5).unwrap(),
        ] {
            for k in 0..=40 {
                let tau = k as f64 * 0.5;
                let q = simpson(|t| closed_form_x(&m, t), tau, tau + 1.0 / m.mu, 2000);
                assert!((closed_form_overlap(&m, tau) - q).abs() < 1e-8, "tau {tau}");
            }
        }
    }

    #[test]
    fn closed_form_tracks_numeric_ode() {
        let m = table2();
        let h = 1e-3;
        let states = numeric_solution(&m, 10.0, h).unwrap();
        let sup = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s[0] - closed_form_x(&m, i as f64 * h)).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-6, "sup error {sup}");
    }

    #[test]
    fn nonnegative_and_periodic_amplitude() {
        let m = table2();
        for k in 0..=4000 {
            assert!(closed_form_x(&m, k as f64 * 0.01) >= 0.0);
        }
        // one late period, transient e^{-mu t} negligible
        let period = 2.0 * std::f64::consts::PI / m.alpha;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..=100_000 {
            let v = closed_form_x(&m, 60.0 + period * k as f64 / 100_000.0);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let r = m.alpha / m.mu;
        let amplitude = m.beta / m.mu / (1.0 + r * r).sqrt();
        assert!(((hi - lo) / 2.0 - amplitude).abs() < 1e-4);
        assert!(((hi + lo) / 2.0 - m.lambda / m.mu).abs() < 1e-4);
    }

    #[test]
    fn rejects_negative_rates() {
        assert!(SinusoidalInfModel::new(0.5, 11.0, 10.0, 1.0).is_err());
        assert!(SinusoidalInfModel::new(0.5, 1.0, 10.0, 0.0).is_err());
    }
}
