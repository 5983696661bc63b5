//! Adaptive Dormand-Prince 5(4) integration for small fixed-size systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-12, abs: 1e-300 }
    }
}

/// Integrates `y' = f(r, y)` from `r0` to `r1` and returns `y(r1)`.
pub fn integrate<const N: usize, F>(f: F, r0: f64, y0: [f64; N], r1: f64, tol: Tolerance) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = r1 - r0;
    if span == 0.0 {
        return Ok(y0);
    }
    let mut r = r0;
    let mut y = y0;
    let mut h = span / 16.0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(r, &y);
    let max_steps = 1_000_000;
    for _ in 0..max_steps {
        if (r1 - r) * span.signum() <= 0.0 {
            return Ok(y);
        }
        if (r + h - r1) * span.signum() > 0.0 {
            h = r1 - r;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                *yi += h * acc;
            }
            k[s] = f(r + C[s] * h, &ys);
        }
        let mut y_new = y;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B[s] * k[s][i];
                lo += B_LOW[s] * k[s][i];
            }
            y_new[i] = y[i] + h * hi;
            let scale = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            err = err.max((h * (hi - lo)).abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Integration(r));
        }
        if err <= 1.0 {
            let last = r + h == r1 || (r1 - (r + h)) * span.signum() <= 0.0;
            r = if last { r1 } else { r + h };
            y = y_new;
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h.abs() < 1e-15 * r.abs().max(span.abs()) {
            return Err(Error::Integration(r));
        }
    }
    Err(Error::Integration(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let y = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 3.0, Tolerance::default()).unwrap();
        assert!((y[0] - 3f64.exp()).abs() / 3f64.exp() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator() {
        let y = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            10.0,
            Tolerance::default(),
        )
        .unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-10);
        assert!((y[1] - 10f64.cos()).abs() < 1e-10);
    }
}
