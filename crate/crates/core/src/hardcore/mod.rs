//! Closed-form positive-temperature results for a hard core of radius `a`.

pub mod bessel;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gibbs::Beta;
use crate::potential::Dimension;

pub use bessel::{bessel_k, k0, k1, Order, EULER_GAMMA};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardCoreParams {
    a: f64,
    beta: Beta,
    d: Dimension,
}

impl HardCoreParams {
    pub fn new(a: f64, beta: Beta, d: Dimension) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::NonPositive(a));
        }
        Ok(Self { a, beta, d })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }
}

/// Exact `e(β)` for the hard core.
///
/// d = 3: `8πa (1 + a/√β + a²/(3β))`.
/// d = 2: `4π t K1(t)/K0(t) + 2π a²/β` with `t = a/√β`.
pub fn ebeta_hardcore(p: &HardCoreParams) -> f64 {
    let a = p.a;
    let beta = p.beta.value();
    match p.d {
        Dimension::Three => 8.0 * PI * a * (1.0 + a / beta.sqrt() + a * a / (3.0 * beta)),
        Dimension::Two => {
            let t = a / beta.sqrt();
            let ratio = bessel::k1_over_k0(t).expect("t > 0");
            4.0 * PI * t * ratio + 2.0 * PI * a * a / beta
        }
    }
}

/// The minimiser of the functional for the hard core, evaluated at radius `r`.
pub fn hardcore_profile(p: &HardCoreParams, r: f64) -> f64 {
    let a = p.a;
    if r <= a {
        return 1.0;
    }
    let thermal = p.beta.value().sqrt();
    match p.d {
        Dimension::Three => (a / r * (-(r - a) / thermal).exp()).min(1.0),
        Dimension::Two => {
            let (x, y) = (r / thermal, a / thermal);
            let ratio = bessel::k0_scaled(x).expect("x > 0") / bessel::k0_scaled(y).expect("y > 0");
            (ratio * (-(x - y)).exp()).min(1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, beta: f64, d: Dimension) -> HardCoreParams {
        HardCoreParams::new(a, Beta::new(beta).unwrap(), d).unwrap()
    }

    #[test]
    fn three_dimensional_values() {
        let e = ebeta_hardcore(&params(1.0, 1.0, Dimension::Three));
        assert!((e - 8.0 * PI * 7.0 / 3.0).abs() < 1e-12);
        assert!((e - 58.643_062_867_009_5).abs() < 1e-9);
        let e = ebeta_hardcore(&params(1.0, 4.0, Dimension::Three));
        assert!((e - 8.0 * PI * 19.0 / 12.0).abs() <= 4.0 * f64::EPSILON * e);
        let e = ebeta_hardcore(&params(1.0, 1e16, Dimension::Three));
        assert!((e / (8.0 * PI) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn planar_small_argument_asymptote() {
        let e = ebeta_hardcore(&params(1.0, 1e4, Dimension::Two));
        let t: f64 = 1e-2;
        let asymptote = 4.0 * PI / ((2.0 / t).ln() - EULER_GAMMA) + 2.0 * PI * 1e-4;
        assert!(((e - asymptote) / e).abs() < 0.02);
    }

    #[test]
    fn planar_leading_order_is_logarithmic() {
        let e = ebeta_hardcore(&params(1.0, 1e8, Dimension::Two));
        let lead = e * (1e8f64).ln() / (8.0 * PI);
        assert!((lead - 1.0).abs() < 0.15, "{lead}");
    }

    #[test]
    fn profiles() {
        let p = params(1.0, 1.0, Dimension::Three);
        assert_eq!(hardcore_profile(&p, 1.0), 1.0);
        assert_eq!(hardcore_profile(&p, 0.3), 1.0);
        assert!((hardcore_profile(&p, 2.0) - 0.5 * (-1.0f64).exp()).abs() < 1e-15);
        let p = params(1.0, 1.0, Dimension::Two);
        assert_eq!(hardcore_profile(&p, 1.0), 1.0);
        let want = k0(3.0).unwrap() / k0(1.0).unwrap();
        assert!((hardcore_profile(&p, 3.0) - want).abs() < 1e-14);
        assert!(hardcore_profile(&p, 2000.0) >= 0.0);
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(HardCoreParams::new(0.0, Beta::new(1.0).unwrap(), Dimension::Three).is_err());
    }
}
