//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Power series with the logarithmic part for `x <= 2`; Steed's continued
//! fraction (Temme's CF2 normalisation) above that.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

const SERIES_MAX: f64 = 2.0;
const EPS: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Zero,
    One,
}

/// `(K0(x), K1(x))` by the ascending series.
fn series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    // term_k = q^k / (k!)^2, h_k = harmonic number
    let mut term = 1.0;
    let mut h = 0.0;
    let mut i0 = 1.0;
    let mut k0_sum = 0.0;
    // odd order: t_k = q^k / (k! (k+1)!)
    let mut odd = 1.0;
    let mut i1_sum = 1.0;
    let mut k1_sum = 1.0 - 2.0 * EULER_GAMMA; // psi(1) + psi(2) = 1 - 2γ
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        h += 1.0 / kf;
        odd *= q / (kf * (kf + 1.0));
        i0 += term;
        k0_sum += h * term;
        i1_sum += odd;
        // psi(k+1) + psi(k+2) = -2γ + 2 H_k + 1/(k+1)
        k1_sum += (2.0 * h + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA) * odd;
        if term < EPS * i0 && odd < EPS * i1_sum {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_sum;
    let i1 = 0.5 * x * i1_sum;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_sum;
    (k0, k1)
}

/// `(e^x K0(x), K1(x)/K0(x))` by Steed's continued fraction.
fn continued_fraction(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    let h = a1 * h;
    let k0_scaled = (PI / (2.0 * x)).sqrt() / s;
    let ratio = (x + 0.5 - h) / x;
    (k0_scaled, ratio)
}

fn check(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive(x))
    }
}

/// `K_order(x)` for `x > 0`.
pub fn bessel_k(order: Order, x: f64) -> Result<f64> {
    check(x)?;
    let (k0, k1) = if x <= SERIES_MAX {
        series(x)
    } else {
        let (scaled, ratio) = continued_fraction(x);
        let k0 = scaled * (-x).exp();
        (k0, k0 * ratio)
    };
    Ok(match order {
        Order::Zero => k0,
        Order::One => k1,
    })
}

pub fn k0(x: f64) -> Result<f64> {
    bessel_k(Order::Zero, x)
}

pub fn k1(x: f64) -> Result<f64> {
    bessel_k(Order::One, x)
}

/// `e^x K0(x)`, finite for arguments where `K0` itself underflows.
pub fn k0_scaled(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x <= SERIES_MAX {
        series(x).0 * x.exp()
    } else {
        continued_fraction(x).0
    })
}

/// `K1(x) / K0(x)` without overflow or underflow.
pub fn k1_over_k0(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x <= SERIES_MAX {
        let (k0, k1) = series(x);
        k1 / k0
    } else {
        continued_fraction(x).1
    })
}
