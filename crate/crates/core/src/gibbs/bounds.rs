//! Closed-form upper bounds on `e(β)` and the trial state built from the
//! zero-energy scattering solution.

use std::f64::consts::PI;

use serde::Serialize;

use super::{solve_ebeta, Beta};
use crate::error::{Error, Result};
use crate::fk::McEstimate;
use crate::mesh::MeshParams;
use crate::potential::{volume_integral, Dimension, RadialPotential};
use crate::quad::gauss4;
use crate::scatter::{a_r_only, lambda_from_a, scattering_length, solve_zero_energy, ZeroEnergyProfile};

/// Upper bound on `e(β)` in terms of the scattering length alone.
///
/// d = 3: `8πa (1 + a/√(3β))²`.
/// d = 2: `(8π/L)(1 + (1 + a²/β)/(2L))` with `L = ln(1 + β/a²)`.
pub fn theorem1_bound(a: f64, beta: Beta, d: Dimension) -> Result<f64> {
    if !(a > 0.0) || a.is_nan() {
        return Err(Error::NonPositive(a));
    }
    if a.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let b = beta.value();
    Ok(match d {
        Dimension::Three => {
            let f = 1.0 + a / (3.0 * b).sqrt();
            8.0 * PI * a * f * f
        }
        Dimension::Two => {
            let l = (b / (a * a)).ln_1p();
            8.0 * PI / l * (1.0 + (1.0 + a * a / b) / (2.0 * l))
        }
    })
}

/// Radius of the trial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TrialRadius {
    Fixed(f64),
    /// `a + √(3β)` in three dimensions, `a √(1 + β/a²)` in two.
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialEnergy {
    pub r: f64,
    pub a_r: f64,
    pub value: f64,
    /// `8πa/(1 - a/R) + 8π a_R² R/(3β)` (d = 3), resp.
    /// `4π/ln(R/a) + πR²/(β [ln(R/a_R)]²)` (d = 2).
    pub analytic_bound: f64,
}

/// `∫ ψ² dx` over `[r_start, R]` for `ψ = 1 - w`, using cubic Hermite
/// interpolation of `w` on each element.
fn trial_mass(v: &RadialPotential, p: &ZeroEnergyProfile) -> f64 {
    let d = p.d;
    let mut total = 0.0;
    for i in 0..p.grid.len() - 1 {
        let (r0, r1) = (p.grid[i], p.grid[i + 1]);
        let h = r1 - r0;
        let (w0, w1) = (p.w[i], p.w[i + 1]);
        let jump: f64 = if i > 0 {
            v.shells().iter().filter(|s| s.radius == r0).map(|s| 0.5 * s.strength).sum()
        } else {
            0.0
        };
        let m0 = (p.w_prime[i] + jump * w0) * h;
        let m1 = p.w_prime[i + 1] * h;
        total += gauss4(r0, r1, |r| {
            let t = (r - r0) / h;
            let (t2, t3) = (t * t, t * t * t);
            let w = (2.0 * t3 - 3.0 * t2 + 1.0) * w0
                + (t3 - 2.0 * t2 + t) * m0
                + (-2.0 * t3 + 3.0 * t2) * w1
                + (t3 - t2) * m1;
            let psi = 1.0 - w;
            psi * psi * d.jacobian(r)
        });
    }
    total * d.unit_sphere_area() + d.ball_volume(v.hard_core_radius())
}

fn analytic_trial_bound(a: f64, a_r: f64, r: f64, beta: Beta, d: Dimension) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let b = beta.value();
    match d {
        Dimension::Three => 8.0 * PI * a / (1.0 - a / r) + 8.0 * PI * a_r * a_r * r / (3.0 * b),
        Dimension::Two => {
            let l = (r / a_r).ln();
            4.0 * PI / (r / a).ln() + PI * r * r / (b * l * l)
        }
    }
}

/// `E_β(ψ_R)` for the zero-energy scattering solution `ψ_R` on the ball of
/// radius `R`, extended by zero.
///
/// Inside the ball the gradient and potential terms add up to `λ(R)`, so only
/// `∫ψ_R²` needs quadrature.
pub fn trial_state_energy(v: &RadialPotential, d: Dimension, beta: Beta, radius: TrialRadius) -> Result<TrialEnergy> {
    let limit = scattering_length(v, d, 1e-10)?;
    let a = limit.a;
    if a.is_infinite() {
        return Err(Error::InvalidParameter("trial state needs a finite scattering length".into()));
    }
    let r = match radius {
        TrialRadius::Fixed(r) => r,
        TrialRadius::Optimal if a == 0.0 => match d {
            Dimension::Three => (3.0 * beta.value()).sqrt(),
            Dimension::Two => beta.thermal_length(),
        },
        TrialRadius::Optimal => match d {
            Dimension::Three => a + (3.0 * beta.value()).sqrt(),
            Dimension::Two => a * (1.0 + beta.value() / (a * a)).sqrt(),
        },
    };
    if !(r > a) || !(r > v.hard_core_radius()) || !r.is_finite() {
        return Err(Error::RadiusTooSmall {
            r,
            min: a.max(v.hard_core_radius()),
        });
    }
    if v.is_zero() {
        return Ok(TrialEnergy {
            r,
            a_r: 0.0,
            value: 0.0,
            analytic_bound: 0.0,
        });
    }
    let a_r = a_r_only(v, d, r)?;
    let profile = solve_zero_energy(v, d, r, MeshParams::with_points(4000))?;
    let value =
        lambda_from_a(a_r, r, d) + volume_integral(v, r, d)? + 2.0 / beta.value() * trial_mass(v, &profile);
    Ok(TrialEnergy {
        r,
        a_r,
        value,
        analytic_bound: analytic_trial_bound(a, a_r, r, beta, d),
    })
}

/// One inequality `lhs ≤ rhs + tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            tolerance,
            pass: lhs <= rhs + tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub a: f64,
    pub theorem1: f64,
    pub trial: Option<TrialEnergy>,
    pub numeric: Option<f64>,
    pub numeric_error: Option<f64>,
    pub mc: Option<McEstimate>,
    pub checks: Vec<Check>,
}

impl BoundsReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Relative tolerance for the scattering-length floor in three dimensions.
const FLOOR_TOLERANCE: f64 = 5e-3;

/// Analytic upper bound, trial-state energy and numeric `e(β)` side by side.
pub fn bounds_report(v: &RadialPotential, d: Dimension, beta: Beta, mesh: MeshParams) -> Result<BoundsReport> {
    let limit = scattering_length(v, d, 1e-10)?;
    let a = limit.bracket.1.max(limit.a);
    let theorem1 = if a == 0.0 { 0.0 } else { theorem1_bound(a, beta, d)? };
    let trial = if a.is_finite() {
        Some(trial_state_energy(v, d, beta, TrialRadius::Optimal)?)
    } else {
        None
    };
    let sol = solve_ebeta(v, d, beta, mesh)?;
    let numeric = sol.e_beta;
    let err = sol.absolute_error();
    let round = |x: f64| 1e-9 * x.abs();

    let mut checks = vec![Check::new("numeric <= analytic bound", numeric, theorem1, err + round(theorem1))];
    if let Some(t) = &trial {
        checks.push(Check::new("numeric <= trial", numeric, t.value, err + round(t.value)));
        checks.push(Check::new(
            "trial <= analytic trial bound",
            t.value,
            t.analytic_bound,
            1e-7 * t.analytic_bound,
        ));
    }
    if d == Dimension::Three && a.is_finite() {
        let floor = 8.0 * PI * limit.bracket.0 * (1.0 - FLOOR_TOLERANCE);
        checks.push(Check::new("8 pi a (1 - tol) <= numeric", floor, numeric, 0.0));
    }
    Ok(BoundsReport {
        a,
        theorem1,
        trial,
        numeric: Some(numeric),
        numeric_error: Some(err),
        mc: None,
        checks,
    })
}
