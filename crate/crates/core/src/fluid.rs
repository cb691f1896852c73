//! Plain and adjusted fluid models, their z-processes, and overlap estimates.
//!
//! All solvers use fixed-step RK4 on a grid starting at zero. Cumulative
//! integrals (`cum_x`) are carried as an extra ODE state so overlap integrals
//! read off two interpolated values of one channel.

use crate::error::{OverlapError, Result};
use crate::model::QueueModel;
use crate::ode::{rk4, step_count};
use crate::overlap::{Method, OverlapResult};
use crate::rates::{adjusted_departure_rate, below_capacity_probability, departure_rate};
use crate::trajectory::{first_passage, FirstPassage, Trajectory};

/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Whether the z-variance follows its ODE or stays at its initial value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceMode {
    Evolve,
    Frozen,
}

fn channels<const N: usize>(names: [&str; N], states: &[[f64; N]]) -> Vec<(String, Vec<f64>)> {
    names
        .iter()
        .enumerate()
        .map(|(j, name)| (name.to_string(), states.iter().map(|s| s[j]).collect()))
        .collect()
}

/// Fluid limit `dx/dt = lambda(t) - mu min(x, n)` on `[0, T]` with `x(0) = initial_count`.
///
/// Channels: `x`, `cum_x`.
pub fn solve_fluid(model: &QueueModel, horizon: f64, h: f64) -> Result<Trajectory> {
    let steps = step_count(horizon, h)?;
    let (mu, n) = (model.service_rate, model.servers.as_f64());
    let states = rk4(
        |t, y: &[f64; 2]| [model.arrival.rate(t) - departure_rate(y[0], mu, n), y[0]],
        [model.initial_count, 0.0],
        0.0,
        h,
        steps,
        |_| {},
    );
    Trajectory::new(0.0, h, channels(["x", "cum_x"], &states))
}

/// Drain of the customers present at the tagged arrival: `dz/dt = -mu min(z, n)`, `z(0) = x_at_tau`.
///
/// The returned grid measures time since the arrival. Channel: `z`.
pub fn solve_z(model: &QueueModel, x_at_tau: f64, horizon: f64, h: f64) -> Result<Trajectory> {
    if !(x_at_tau >= 0.0) {
        return Err(OverlapError::Config(format!(
            "z(0) must be >= 0, got {x_at_tau}"
        )));
    }
    let steps = step_count(horizon, h)?;
    let (mu, n) = (model.service_rate, model.servers.as_f64());
    let states = rk4(
        |_, y: &[f64; 1]| [-departure_rate(y[0], mu, n)],
        [x_at_tau],
        0.0,
        h,
        steps,
        |_| {},
    );
    Trajectory::new(0.0, h, channels(["z"], &states))
}

/// Adjusted fluid mean and variance with `u(0) = 0`. Channels: `x`, `u`, `cum_x`.
pub fn solve_adjusted(model: &QueueModel, horizon: f64, h: f64) -> Result<Trajectory> {
    solve_adjusted_from(model, 0.0, horizon, h)
}

/// Adjusted fluid model with an explicit initial variance:
///
/// ```text
/// dx/dt = lambda(t) - g2(x, u)
/// du/dt = -2 mu Phi(n, x, sqrt u) u + lambda(t) + g2(x, u)
/// ```
pub fn solve_adjusted_from(
    model: &QueueModel,
    initial_variance: f64,
    horizon: f64,
    h: f64,
) -> Result<Trajectory> {
    if !(initial_variance >= 0.0) {
        return Err(OverlapError::Config(format!(
            "initial variance must be >= 0, got {initial_variance}"
        )));
    }
    let steps = step_count(horizon, h)?;
    let (mu, n) = (model.service_rate, model.servers.as_f64());
    let states = rk4(
        |t, y: &[f64; 3]| {
            let (x, u) = (y[0], y[1].max(0.0));
            let lambda = model.arrival.rate(t);
            let g2 = adjusted_departure_rate(x, u, mu, n);
            let phi = below_capacity_probability(x, u, n);
            [lambda - g2, -2.0 * mu * phi * u + lambda + g2, x]
        },
        [model.initial_count, initial_variance, 0.0],
        0.0,
        h,
        steps,
        |y| y[1] = y[1].max(0.0),
    );
    Trajectory::new(0.0, h, channels(["x", "u", "cum_x"], &states))
}

/// Adjusted z-process with its variance. Channels: `z`, `v`.
pub fn solve_z_adjusted(
    model: &QueueModel,
    x_at_tau: f64,
    u_at_tau: f64,
    horizon: f64,
    h: f64,
) -> Result<Trajectory> {
    solve_z_adjusted_with(model, x_at_tau, u_at_tau, horizon, h, VarianceMode::Evolve)
}

/// As [`solve_z_adjusted`]; `VarianceMode::Frozen` pins `v` at `u_at_tau`.
pub fn solve_z_adjusted_with(
    model: &QueueModel,
    x_at_tau: f64,
    u_at_tau: f64,
    horizon: f64,
    h: f64,
    mode: VarianceMode,
) -> Result<Trajectory> {
    if !(x_at_tau >= 0.0) || !(u_at_tau >= 0.0) {
        return Err(OverlapError::Config(format!(
            "z_a(0) and v(0) must be >= 0, got ({x_at_tau}, {u_at_tau})"
        )));
    }
    let steps = step_count(horizon, h)?;
    let (mu, n) = (model.service_rate, model.servers.as_f64());
    let states = rk4(
        |_, y: &[f64; 2]| {
            let (z, v) = (y[0], y[1].max(0.0));
            let g2 = adjusted_departure_rate(z, v, mu, n);
            let dv = match mode {
                VarianceMode::Evolve => -2.0 * mu * below_capacity_probability(z, v, n) * v + g2,
                VarianceMode::Frozen => 0.0,
            };
            [-g2, dv]
        },
        [x_at_tau, u_at_tau],
        0.0,
        h,
        steps,
        |y| y[1] = y[1].max(0.0),
    );
    Trajectory::new(0.0, h, channels(["z", "v"], &states))
}

fn check_tau(tau: f64, horizon: f64) -> Result<()> {
    if !(tau >= 0.0) {
        return Err(OverlapError::Config(format!("tau must be >= 0, got {tau}")));
    }
    if tau >= horizon {
        return Err(OverlapError::HorizonTooShort {
            required: tau,
            horizon,
        });
    }
    Ok(())
}

/// Finds where `z` reaches `n - 1`. If it does not within `base_horizon`,
/// keeps doubling the drain horizon to report how long T would have to be.
fn drain_passage<F>(
    tau: f64,
    horizon: f64,
    base_horizon: f64,
    threshold: f64,
    solve: F,
) -> Result<FirstPassage>
where
    F: Fn(f64) -> Result<Trajectory>,
{
    let fp = first_passage(&solve(base_horizon)?, "z", threshold)?;
    if fp.elapsed().is_some() {
        return Ok(fp);
    }
    let mut span = base_horizon.max(1.0);
    for _ in 0..10 {
        span *= 2.0;
        if let Some(t) = first_passage(&solve(span)?, "z", threshold)?.elapsed() {
            return Err(OverlapError::HorizonTooShort {
                required: tau + t,
                horizon,
            });
        }
    }
    Err(OverlapError::HorizonTooShort {
        required: f64::INFINITY,
        horizon,
    })
}

fn integrate_window(
    traj: &Trajectory,
    tau: f64,
    wait: f64,
    mean_service: f64,
    horizon: f64,
) -> Result<f64> {
    let end = tau + wait + mean_service;
    if end > traj.end() + 1e-9 {
        return Err(OverlapError::HorizonTooShort {
            required: end,
            horizon,
        });
    }
    Ok(traj.value_at("cum_x", end)? - traj.value_at("cum_x", tau)?)
}

/// `int_tau^{tau + t0 + 1/mu} x(t) dt` from the plain fluid model.
pub fn overlap_fluid(model: &QueueModel, tau: f64, horizon: f64, h: f64) -> Result<OverlapResult> {
    check_tau(tau, horizon)?;
    let traj = solve_fluid(model, horizon, h)?;
    let x_tau = traj.value_at("x", tau)?;
    let fp = match model.servers.is_finite() {
        true => {
            let threshold = model.servers.as_f64() - 1.0;
            Some(drain_passage(
                tau,
                horizon,
                horizon - tau,
                threshold,
                |span| solve_z(model, x_tau.max(0.0), span, h.min(span)),
            )?)
        }
        false => None,
    };
    let wait = fp.and_then(|f| f.elapsed()).unwrap_or(0.0);
    let value = integrate_window(&traj, tau, wait, model.mean_service(), horizon)?;
    Ok(OverlapResult {
        method: Method::Fluid,
        tau,
        first_passage: fp,
        expected_overlap: value.max(0.0),
        stats: None,
    })
}

/// `int_tau^{tau + ta + 1/mu} x_a(t) dt` from the adjusted fluid model, with the
/// z-variance started at `u(tau)`.
pub fn overlap_adjusted(
    model: &QueueModel,
    tau: f64,
    horizon: f64,
    h: f64,
) -> Result<OverlapResult> {
    check_tau(tau, horizon)?;
    let traj = solve_adjusted(model, horizon, h)?;
    let x_tau = traj.value_at("x", tau)?.max(0.0);
    let u_tau = traj.value_at("u", tau)?.max(0.0);
    let fp = match model.servers.is_finite() {
        true => {
            let threshold = model.servers.as_f64() - 1.0;
            Some(drain_passage(
                tau,
                horizon,
                horizon - tau,
                threshold,
                |span| solve_z_adjusted(model, x_tau, u_tau, span, h.min(span)),
            )?)
        }
        false => None,
    };
    let wait = fp.and_then(|f| f.elapsed()).unwrap_or(0.0);
    let value = integrate_window(&traj, tau, wait, model.mean_service(), horizon)?;
    Ok(OverlapResult {
        method: Method::Adjusted,
        tau,
        first_passage: fp,
        expected_overlap: value.max(0.0),
        stats: None,
    })
}
