//! Queue model configuration and time-varying arrival rates.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{OverlapError, Result};

/// Shape of an arrival-rate profile before the overall multiplier is applied.
#[derive(Debug, Clone, PartialEq)]
pub enum RateProfile {
    /// `(beta * sin(alpha t) + baseline) * servers_scale * rho`.
    Sinusoidal {
        alpha: f64,
        beta: f64,
        baseline: f64,
        servers_scale: f64,
        rho: f64,
    },
    /// Piecewise-linear interpolation between sorted `(time, rate)` breakpoints,
    /// held constant outside the first and last breakpoint.
    Tabulated { times: Vec<f64>, rates: Vec<f64> },
}

/// A nonnegative, bounded, time-varying Poisson arrival rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFunction {
    profile: RateProfile,
    scale: f64,
    upper_bound: f64,
}

impl RateFunction {
    /// Sinusoidal rate `(beta sin(alpha t) + baseline) * n * rho`.
    pub fn sinusoidal(alpha: f64, beta: f64, baseline: f64, n: f64, rho: f64) -> Result<Self> {
        for (name, v) in [
            ("alpha", alpha),
            ("beta", beta),
            ("lambda", baseline),
            ("n", n),
            ("rho", rho),
        ] {
            if !v.is_finite() {
                return Err(OverlapError::Config(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if n < 0.0 || rho < 0.0 {
            return Err(OverlapError::Config(format!(
                "rate scale factors must be nonnegative (n = {n}, rho = {rho})"
            )));
        }
        if baseline < beta.abs() {
            return Err(OverlapError::Config(format!(
                "sinusoidal rate would go negative: lambda = {baseline} < |beta| = {}",
                beta.abs()
            )));
        }
        Ok(Self {
            upper_bound: (baseline + beta.abs()) * n * rho,
            profile: RateProfile::Sinusoidal {
                alpha,
                beta,
                baseline,
                servers_scale: n,
                rho,
            },
            scale: 1.0,
        })
    }

    /// Unscaled sinusoid `beta sin(alpha t) + baseline`.
    pub fn plain_sinusoid(alpha: f64, beta: f64, baseline: f64) -> Result<Self> {
        Self::sinusoidal(alpha, beta, baseline, 1.0, 1.0)
    }

    /// Constant rate.
    pub fn constant(rate: f64) -> Result<Self> {
        Self::sinusoidal(0.0, 0.0, rate, 1.0, 1.0)
    }

    /// Linearly interpolated breakpoints with a caller-supplied upper bound.
    pub fn tabulated(breakpoints: &[(f64, f64)], upper_bound: f64) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(OverlapError::Config(
                "tabulated rate needs at least one breakpoint".into(),
            ));
        }
        for w in breakpoints.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(OverlapError::Config(format!(
                    "breakpoint times must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(t, r) in breakpoints {
            if !t.is_finite() || !r.is_finite() || r < 0.0 {
                return Err(OverlapError::Config(format!(
                    "invalid breakpoint ({t}, {r}): rates must be finite and nonnegative"
                )));
            }
            if r > upper_bound {
                return Err(OverlapError::Config(format!(
                    "breakpoint rate {r} at t = {t} exceeds upper_bound {upper_bound}"
                )));
            }
        }
        Ok(Self {
            profile: RateProfile::Tabulated {
                times: breakpoints.iter().map(|p| p.0).collect(),
                rates: breakpoints.iter().map(|p| p.1).collect(),
            },
            scale: 1.0,
            upper_bound,
        })
    }

    /// The same profile multiplied by `factor` (used for uniform acceleration).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            profile: self.profile.clone(),
            scale: self.scale * factor,
            upper_bound: self.upper_bound * factor,
        }
    }

    pub fn profile(&self) -> &RateProfile {
        &self.profile
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper_bound
    }

    /// Arrival rate at time `t`.
    pub fn rate(&self, t: f64) -> f64 {
        let base = match &self.profile {
            RateProfile::Sinusoidal {
                alpha,
                beta,
                baseline,
                servers_scale,
                rho,
            } => (beta * (alpha * t).sin() + baseline) * servers_scale * rho,
            RateProfile::Tabulated { times, rates } => interpolate(times, rates, t),
        };
        // sin roundoff can dip a hair below zero when baseline == |beta|
        (base * self.scale).max(0.0)
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let last = times.len() - 1;
    if t <= times[0] {
        return values[0];
    }
    if t >= times[last] {
        return values[last];
    }
    let i = times.partition_point(|&s| s <= t) - 1;
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    values[i] + w * (values[i + 1] - values[i])
}

/// Number of servers: a positive count or infinitely many.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Servers {
    Finite(u64),
    Infinite,
}

impl Servers {
    /// Server count as a real number (`f64::INFINITY` for infinite servers).
    pub fn as_f64(self) -> f64 {
        match self {
            Servers::Finite(n) => n as f64,
            Servers::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Servers::Finite(_))
    }
}

impl fmt::Display for Servers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Servers::Finite(n) => write!(f, "{n}"),
            Servers::Infinite => f.write_str("inf"),
        }
    }
}

/// An M_t/M/n (or M_t/M/inf) queue.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueModel {
    pub servers: Servers,
    pub service_rate: f64,
    pub arrival: RateFunction,
    /// `x(0)` for the ODE solvers; rounded to an integer by the simulator.
    pub initial_count: f64,
}

impl QueueModel {
    pub fn new(
        servers: Servers,
        service_rate: f64,
        arrival: RateFunction,
        initial_count: f64,
    ) -> Result<Self> {
        if !(service_rate > 0.0 && service_rate.is_finite()) {
            return Err(OverlapError::Config(format!(
                "service rate mu must be positive, got {service_rate}"
            )));
        }
        if servers == Servers::Finite(0) {
            return Err(OverlapError::Config("servers must be >= 1".into()));
        }
        if !(initial_count >= 0.0 && initial_count.is_finite()) {
            return Err(OverlapError::Config(format!(
                "initial_count must be a nonnegative number, got {initial_count}"
            )));
        }
        Ok(Self {
            servers,
            service_rate,
            arrival,
            initial_count,
        })
    }

    /// The model with arrival rate, server count and initial count all multiplied by `eta`
    /// (initial count rounded to the nearest integer).
    pub fn accelerated(&self, eta: u64) -> Result<Self> {
        if eta == 0 {
            return Err(OverlapError::Config(
                "acceleration factor eta must be >= 1".into(),
            ));
        }
        let servers = match self.servers {
            Servers::Finite(n) => Servers::Finite(n * eta),
            Servers::Infinite => Servers::Infinite,
        };
        Ok(Self {
            servers,
            service_rate: self.service_rate,
            arrival: self.arrival.scaled(eta as f64),
            initial_count: (self.initial_count * eta as f64).round(),
        })
    }

    /// Mean service time `1/mu`.
    pub fn mean_service(&self) -> f64 {
        1.0 / self.service_rate
    }

    pub fn from_config(cfg: &ModelConfig) -> Result<Self> {
        let servers = cfg.servers.resolve()?;
        let arrival = match &cfg.arrival {
            ArrivalConfig::Sinusoidal {
                alpha,
                beta,
                lambda,
                rho,
            } => {
                // infinite-server instances use the unscaled sinusoid
                let n = match servers {
                    Servers::Finite(n) => n as f64,
                    Servers::Infinite => 1.0,
                };
                RateFunction::sinusoidal(*alpha, *beta, *lambda, n, *rho)?
            }
            ArrivalConfig::Tabulated {
                breakpoints,
                upper_bound,
            } => {
                let pts: Vec<(f64, f64)> = breakpoints.iter().map(|p| (p[0], p[1])).collect();
                RateFunction::tabulated(&pts, *upper_bound)?
            }
        };
        Self::new(servers, cfg.mu, arrival, cfg.initial_count)
    }
}

/// Server count as written in a config file: an integer or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ServersField {
    Count(u64),
    Named(String),
}

impl ServersField {
    pub fn resolve(&self) -> Result<Servers> {
        match self {
            ServersField::Count(0) => Err(OverlapError::Config("servers must be >= 1".into())),
            ServersField::Count(n) => Ok(Servers::Finite(*n)),
            ServersField::Named(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinite" | "infinity" => Ok(Servers::Infinite),
                other => Err(OverlapError::Config(format!(
                    "servers must be a positive integer or \"inf\", got {other:?}"
                ))),
            },
        }
    }
}

/// Arrival section of a model config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ArrivalConfig {
    Sinusoidal {
        alpha: f64,
        beta: f64,
        lambda: f64,
        #[serde(default = "one")]
        rho: f64,
    },
    Tabulated {
        breakpoints: Vec<[f64; 2]>,
        upper_bound: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// JSON model description: `{servers, mu, arrival, initial_count}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub servers: ServersField,
    pub mu: f64,
    pub arrival: ArrivalConfig,
    #[serde(default)]
    pub initial_count: f64,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| OverlapError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| OverlapError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinusoidal_stays_in_band() {
        let r = RateFunction::sinusoidal(0.5, 0.3, 1.0, 30.0, 0.8).unwrap();
        let (lo, hi) = (0.7 * 24.0, 1.3 * 24.0);
        assert!((r.upper_bound() - hi).abs() < 1e-12);
        for k in 0..10_000 {
            let t = k as f64 * 0.01;
            let v = r.rate(t);
            assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "rate {v} at {t}");
        }
    }

    #[test]
    fn negative_sinusoid_rejected() {
        assert!(RateFunction::sinusoidal(0.5, 1.2, 1.0, 30.0, 0.8).is_err());
        assert!(RateFunction::sinusoidal(0.5, -1.2, 1.0, 30.0, 0.8).is_err());
        assert!(RateFunction::sinusoidal(0.5, 1.0, 1.0, 30.0, 0.8).is_ok());
    }

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let r = RateFunction::tabulated(&[(0.0, 0.0), (2.0, 10.0), (4.0, 4.0)], 10.0).unwrap();
        assert_eq!(r.rate(-1.0), 0.0);
        assert!((r.rate(1.0) - 5.0).abs() < 1e-12);
        assert!((r.rate(3.0) - 7.0).abs() < 1e-12);
        assert_eq!(r.rate(9.0), 4.0);
    }

    #[test]
    fn tabulated_validation() {
        assert!(RateFunction::tabulated(&[], 1.0).is_err());
        assert!(RateFunction::tabulated(&[(0.0, 1.0), (0.0, 2.0)], 5.0).is_err());
        assert!(RateFunction::tabulated(&[(0.0, -1.0)], 5.0).is_err());
        assert!(RateFunction::tabulated(&[(0.0, 6.0)], 5.0).is_err());
    }

    #[test]
    fn model_validation() {
        let r = RateFunction::constant(1.0).unwrap();
        assert!(QueueModel::new(Servers::Finite(1), 0.0, r.clone(), 0.0).is_err());
        assert!(QueueModel::new(Servers::Finite(0), 1.0, r.clone(), 0.0).is_err());
        assert!(QueueModel::new(Servers::Finite(1), 1.0, r.clone(), -1.0).is_err());
        assert!(QueueModel::new(Servers::Infinite, 1.0, r, 0.0).is_ok());
    }

    #[test]
    fn acceleration_scales_everything() {
        let r = RateFunction::sinusoidal(0.5, 0.5, 1.0, 30.0, 1.0).unwrap();
        let m = QueueModel::new(Servers::Finite(30), 1.0, r, 2.4).unwrap();
        let a = m.accelerated(4).unwrap();
        assert_eq!(a.servers, Servers::Finite(120));
        assert_eq!(a.initial_count, 10.0);
        assert!((a.arrival.rate(1.3) - 4.0 * m.arrival.rate(1.3)).abs() < 1e-9);
        assert!((a.arrival.upper_bound() - 4.0 * m.arrival.upper_bound()).abs() < 1e-9);
    }

    #[test]
    fn parses_sinusoidal_config() {
        let cfg = ModelConfig::from_json(
            r#"{"servers": 30, "mu": 1.0,
                "arrival": {"kind": "sinusoidal", "alpha": 0.5, "beta": 0.3, "lambda": 1.0, "rho": 0.8},
                "initial_count": 0}"#,
        )
        .unwrap();
        let m = QueueModel::from_config(&cfg).unwrap();
        assert_eq!(m.servers, Servers::Finite(30));
        assert!((m.arrival.rate(0.0) - 24.0).abs() < 1e-12);
    }

    #[test]
    fn parses_infinite_tabulated_config() {
        let cfg = ModelConfig::from_json(
            r#"{"servers": "inf", "mu": 2.0,
                "arrival": {"kind": "tabulated", "breakpoints": [[0, 1], [1, 3]], "upper_bound": 3}}"#,
        )
        .unwrap();
        let m = QueueModel::from_config(&cfg).unwrap();
        assert_eq!(m.servers, Servers::Infinite);
        assert_eq!(m.initial_count, 0.0);
        assert!((m.arrival.rate(0.5) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_servers_field() {
        let cfg = ModelConfig::from_json(
            r#"{"servers": "many", "mu": 1.0, "arrival": {"kind": "sinusoidal", "alpha": 0, "beta": 0, "lambda": 1}}"#,
        )
        .unwrap();
        assert!(QueueModel::from_config(&cfg).is_err());
        assert!(ModelConfig::from_json(r#"{"servers": 3}"#).is_err());
    }
}
