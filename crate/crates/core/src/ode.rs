//! Fixed-step classical Runge-Kutta integration.

use crate::error::{OverlapError, Result};

/// Number of RK4 steps needed to cover `[0, horizon]` with step `h`.
pub fn step_count(horizon: f64, h: f64) -> Result<usize> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(OverlapError::Config(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if !(h > 0.0 && h <= horizon) {
        return Err(OverlapError::Config(format!(
            "step must satisfy 0 < h <= T (h = {h}, T = {horizon})"
        )));
    }
    Ok((horizon / h - 1e-9).ceil().max(1.0) as usize)
}

/// Integrates `dy/dt = rhs(t, y)` from `t0` for `steps` steps of size `h`.
///
/// `project` is applied to the state after every step (used to clamp
/// variances at zero). Returns the `steps + 1` states on the grid.
pub fn rk4<const N: usize, F, P>(
    rhs: F,
    y0: [f64; N],
    t0: f64,
    h: f64,
    steps: usize,
    mut project: P,
) -> Vec<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    P: FnMut(&mut [f64; N]),
{
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push(y);
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1));
        let k3 = rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2));
        let k4 = rhs(t + h, &axpy(&y, h, &k3));
        for j in 0..N {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        project(&mut y);
        out.push(y);
    }
    out
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut r = *y;
    for j in 0..N {
        r[j] += a * k[j];
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_fourth_order() {
        let err = |h: f64| {
            let n = step_count(1.0, h).unwrap();
            let ys = rk4(|_, y: &[f64; 1]| [-y[0]], [1.0], 0.0, h, n, |_| {});
            (ys[n][0] - (-1.0f64).exp()).abs()
        };
        let (e1, e2) = (err(0.1), err(0.05));
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.2, "observed order {order}");
    }

    #[test]
    fn step_count_rounds_up() {
        assert_eq!(step_count(1.0, 1e-3).unwrap(), 1000);
        assert_eq!(step_count(1.0, 0.3).unwrap(), 4);
        assert!(step_count(0.0, 0.1).is_err());
        assert!(step_count(1.0, 0.0).is_err());
        assert!(step_count(1.0, 2.0).is_err());
    }

    #[test]
    fn projection_applied_each_step() {
        let ys = rk4(
            |_, _: &[f64; 1]| [-1.0],
            [0.5],
            0.0,
            0.25,
            4,
            |y| y[0] = y[0].max(0.0),
        );
        assert_eq!(ys.last().unwrap()[0], 0.0);
        assert!(ys.iter().all(|y| y[0] >= 0.0));
    }
}
