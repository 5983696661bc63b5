//! End-to-end verification suites comparing the solvers with closed forms.
//!
//! Every reference value passes through [`VerifyOptions::reference`], so a
//! nonzero `fault` deliberately corrupts the oracles; the suites must then
//! fail, which is how the harness itself is tested.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fk::{estimate_g, sandwich_check, McConfig};
use crate::gibbs::{solve_ebeta, solve_ebeta_at, theorem1_bound, trial_state_energy, Beta, Check, TrialRadius};
use crate::hardcore::{bessel_k, ebeta_hardcore, hardcore_profile, HardCoreParams, Order, EULER_GAMMA};
use crate::mesh::MeshParams;
use crate::potential::{finiteness_check, Dimension, RadialPotential, Verdict};
use crate::scatter::{a_r_only, check_tail_bound, scattering_length};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Hardcore3d,
    Hardcore2d,
    Shells,
    Tails,
    Sandwich,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Hardcore3d,
        Suite::Hardcore2d,
        Suite::Shells,
        Suite::Tails,
        Suite::Sandwich,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hardcore3d => "hardcore3d",
            Suite::Hardcore2d => "hardcore2d",
            Suite::Shells => "shells",
            Suite::Tails => "tails",
            Suite::Sandwich => "sandwich",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Relative perturbation applied to every reference value.
    pub fault: f64,
    pub mc: McConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            fault: 0.0,
            mc: McConfig::default(),
        }
    }
}

impl VerifyOptions {
    pub fn reference(&self, x: f64) -> f64 {
        x * (1.0 + self.fault)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// `|value/reference - 1| ≤ tol`, recorded as a check on the relative error.
pub fn relative(name: impl Into<String>, value: f64, reference: f64, tol: f64) -> Check {
    let err = if value == reference { 0.0 } else { ((value - reference) / reference).abs() };
    Check::new(name, err, tol, 0.0)
}

/// `|value - reference| ≤ tol`.
pub fn absolute(name: impl Into<String>, value: f64, reference: f64, tol: f64) -> Check {
    Check::new(name, (value - reference).abs(), tol, 0.0)
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = match suite {
        Suite::Hardcore3d => hardcore3d(opts)?,
        Suite::Hardcore2d => hardcore2d(opts)?,
        Suite::Shells => shells(opts)?,
        Suite::Tails => tails(opts)?,
        Suite::Sandwich => sandwich(opts)?,
    };
    Ok(SuiteReport {
        suite,
        checks,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn beta(b: f64) -> Result<Beta> {
    Beta::new(b)
}

/// Solver against the closed form, with a time limit per solve.
fn hardcore_exactness(d: Dimension, betas: &[f64], opts: &VerifyOptions) -> Result<Vec<Check>> {
    let v = RadialPotential::hard_core(1.0)?;
    let mut out = Vec::new();
    for &b in betas {
        let timer = Instant::now();
        let sol = solve_ebeta(&v, d, beta(b)?, MeshParams::default())?;
        let secs = timer.elapsed().as_secs_f64();
        let exact = ebeta_hardcore(&HardCoreParams::new(1.0, beta(b)?, d)?);
        out.push(relative(
            format!("e(beta={b}) vs closed form, d={d}"),
            sol.e_beta,
            opts.reference(exact),
            5e-3,
        ));
        out.push(Check::new(format!("solve time at beta={b} [s]"), secs, 1.0, 0.0));
    }
    Ok(out)
}

fn theorem1_dominance(v: &RadialPotential, d: Dimension, betas: &[f64], opts: &VerifyOptions) -> Result<Vec<Check>> {
    let limit = scattering_length(v, d, 1e-10)?;
    let mut out = Vec::new();
    for &b in betas {
        let sol = solve_ebeta(v, d, beta(b)?, MeshParams::default())?;
        let bound = theorem1_bound(limit.bracket.1, beta(b)?, d)?;
        out.push(Check::new(
            format!("e(beta={b}) <= analytic bound"),
            sol.e_beta,
            opts.reference(bound),
            0.0,
        ));
    }
    Ok(out)
}

fn hardcore3d(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let d = Dimension::Three;
    let mut out = hardcore_exactness(d, &[0.25, 1.0, 4.0, 100.0], opts)?;
    out.extend(theorem1_dominance(&RadialPotential::hard_core(1.0)?, d, &[0.5, 1.0, 10.0, 100.0], opts)?);

    let b = beta(1e4)?;
    let ratio = theorem1_bound(1.0, b, d)? / opts.reference(ebeta_hardcore(&HardCoreParams::new(1.0, b, d)?));
    out.push(Check::new("analytic bound / exact at beta=1e4", ratio, 1.002, 0.0));
    out.push(Check::new("exact <= analytic bound at beta=1e4", 1.0, ratio, 0.0));

    let b = beta(1.0)?;
    let sol = solve_ebeta(&RadialPotential::hard_core(1.0)?, d, b, MeshParams::default())?;
    let p = HardCoreParams::new(1.0, b, d)?;
    let worst = sol
        .grid
        .iter()
        .zip(&sol.phi)
        .map(|(&r, &phi)| (phi - opts.reference(hardcore_profile(&p, r))).abs())
        .fold(0.0, f64::max);
    out.push(Check::new("max |phi - exact minimiser|", worst, 1e-3, 0.0));
    out.push(relative(
        "e(beta=1) = 8 pi 7/3",
        sol.e_beta,
        opts.reference(8.0 * PI * 7.0 / 3.0),
        5e-3,
    ));
    Ok(out)
}

fn hardcore2d(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let d = Dimension::Two;
    let mut out = hardcore_exactness(d, &[1.0, 100.0, 1e4], opts)?;
    out.extend(theorem1_dominance(&RadialPotential::hard_core(1.0)?, d, &[0.5, 1.0, 10.0, 100.0], opts)?);

    let x = 1e-3;
    let k0 = bessel_k(Order::Zero, x)?;
    out.push(absolute(
        "K0(1e-3) vs ln(2e3) - gamma",
        k0,
        opts.reference((2.0 / x).ln() - EULER_GAMMA),
        1e-5,
    ));
    out.push(absolute("1e-3 K1(1e-3) vs 1", x * bessel_k(Order::One, x)?, opts.reference(1.0), 1e-5));
    out.push(relative("K0(1)", bessel_k(Order::Zero, 1.0)?, opts.reference(0.421_024_438_240_708_3), 1e-10));

    let b = beta(1e8)?;
    let lead = ebeta_hardcore(&HardCoreParams::new(1.0, b, d)?) * 1e8f64.ln() / opts.reference(8.0 * PI);
    out.push(absolute("e ln(beta)/(8 pi) at beta=1e8 vs 1", lead, 1.0, 0.15));
    Ok(out)
}

fn shells(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let d = Dimension::Three;
    let shell = RadialPotential::shell(1.0, 2.0)?;
    let mut out = Vec::new();

    let limit = scattering_length(&shell, d, 1e-12)?;
    out.push(absolute("a(shell s=1, gamma=2)", limit.a, opts.reference(0.5), 1e-8));
    let sphere = RadialPotential::hard_core(1.0)?;
    for r in [2.0, 5.0, 50.0] {
        out.push(absolute(
            format!("a_R(hard sphere), R={r}"),
            a_r_only(&sphere, d, r)?,
            opts.reference(1.0),
            1e-10,
        ));
    }

    let b = beta(10.0)?;
    let coarse = solve_ebeta(&shell, d, b, MeshParams::default())?;
    let fine = solve_ebeta_at(&shell, d, b, MeshParams::default().refined().refined())?.2;
    out.push(relative("shell e(beta=10) vs 4x refined mesh", coarse.e_beta, opts.reference(fine), 2e-3));
    out.extend(theorem1_dominance(&shell, d, &[0.5, 1.0, 10.0, 100.0], opts)?);

    let b = beta(4.0)?;
    let trial = trial_state_energy(&shell, d, b, TrialRadius::Optimal)?;
    let e = solve_ebeta(&shell, d, b, MeshParams::default())?;
    out.push(Check::new("shell e(beta=4) <= trial energy", opts.reference(e.e_beta), trial.value, 0.0));
    out.push(Check::new(
        "shell trial energy <= analytic bound",
        trial.value,
        opts.reference(theorem1_bound(0.5, b, d)?),
        0.0,
    ));
    Ok(out)
}

fn tails(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let d = Dimension::Three;
    let mut out = Vec::new();
    let flag = |name: &str, ok: bool| Check::new(name, if ok { 0.0 } else { 1.0 }, 0.0, 0.0);

    let p3 = RadialPotential::power_tail(1.0, 1.0, 3.0, 1.0)?;
    out.push(flag("p=3 tail has infinite scattering length", finiteness_check(&p3, d).verdict == Verdict::Infinite));

    let p4 = RadialPotential::power_tail(1.0, 1.0, 4.0, 1.0)?;
    let report = finiteness_check(&p4, d);
    out.push(flag("p=4 tail has finite scattering length", report.verdict == Verdict::Finite));
    let limit = scattering_length(&p4, d, 1e-10)?;
    out.push(Check::new(
        "a(p=4) <= finiteness upper bound",
        opts.reference(limit.a),
        report.a_upper_3d.unwrap_or(f64::NAN),
        0.0,
    ));

    let sphere = finiteness_check(&RadialPotential::hard_core(1.0)?, d);
    out.push(absolute(
        "hard sphere finiteness bound",
        sphere.a_upper_3d.unwrap_or(f64::NAN),
        opts.reference(1.0),
        1e-12,
    ));
    out.push(absolute("hard sphere best b", sphere.best_b.unwrap_or(f64::NAN), opts.reference(1.0), 1e-12));

    let mut previous = 0.0;
    for r in [1.5, 2.0, 4.0, 8.0, 16.0, 64.0] {
        let a_r = a_r_only(&p4, d, r)?;
        out.push(Check::new(format!("a_R nondecreasing at R={r}"), previous, a_r, 0.0));
        out.push(Check::new(format!("a_R <= R at R={r}"), a_r, r, 0.0));
        out.push(flag(
            &format!("tail inequality at R={r}"),
            check_tail_bound(&p4, d, r, opts.reference(limit.bracket.1), a_r)?,
        ));
        previous = a_r;
    }
    Ok(out)
}

/// Exact `g(β)` for a hard sphere of radius `a` in three dimensions: the mean
/// Wiener-sausage volume divided by `β`, for Brownian motion run to time `4β`.
pub fn hard_sphere_g(a: f64, beta: f64) -> f64 {
    let t = 4.0 * beta;
    (4.0 / 3.0 * PI * a.powi(3) + 2.0 * PI * a * t + 4.0 * a * a * (2.0 * PI * t).sqrt()) / beta
}

fn sandwich(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let d = Dimension::Three;
    let mut out = Vec::new();

    let timer = Instant::now();
    let sphere = RadialPotential::hard_core(1.0)?;
    let report = sandwich_check(&sphere, d, beta(1.0)?, &opts.mc)?;
    let secs = timer.elapsed().as_secs_f64();
    let g = report.estimate.mean;
    out.push(Check::new("e(2 beta) - 3(sigma+eps) <= g", opts.reference(report.lower_limit), g, 0.0));
    out.push(Check::new("g <= e(beta) + 3(sigma+eps)", g, opts.reference(report.upper_limit), 0.0));
    out.push(Check::new("sandwich run time [s]", secs, 60.0, 0.0));

    let well = RadialPotential::square_well(1.0, 1.0)?;
    let small = estimate_g(&well, d, beta(0.01)?, &opts.mc)?;
    let want = opts.reference(4.0 * PI / 3.0);
    out.push(Check::new(
        "|g(0.01) - 4 pi/3| <= 3 sigma + 2%",
        (small.mean - want).abs(),
        3.0 * small.stderr + 0.02 * want,
        0.0,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn deterministic_suites_pass_and_detect_faults() {
        for suite in [Suite::Hardcore3d, Suite::Hardcore2d, Suite::Shells, Suite::Tails] {
            let report = run_suite(suite, &VerifyOptions::default()).unwrap();
            let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
            assert!(failed.is_empty(), "{suite}: {failed:?}");
            let faulty = VerifyOptions {
                fault: 0.01,
                ..VerifyOptions::default()
            };
            assert!(!run_suite(suite, &faulty).unwrap().pass(), "{suite} missed the fault");
        }
    }

    #[test]
    fn sausage_formula_limits() {
        // small β: the ball volume dominates, g β → 4π/3
        assert!((hard_sphere_g(1.0, 1e-16) * 1e-16 - 4.0 * PI / 3.0).abs() < 1e-5);
        // large β: the capacity term 2π a · 4 = 8π a dominates
        assert!((hard_sphere_g(1.0, 1e12) / (8.0 * PI) - 1.0).abs() < 1e-5);
    }
}
