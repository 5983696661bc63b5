//! Zero-energy scattering on a ball of radius `R`: the profile
//! `w = 1 - ψ_R`, the finite-range scattering length `a_R`, the energy
//! `λ(R)` and the limit `a = lim a_R`.
//!
//! The profile solves `2Δw = V w` with `w = 0` on the hard core, regular at the
//! origin otherwise, and delta shells entering as derivative jumps
//! `[w'] = (γ/2) w`. In three dimensions `a_R` is tracked through the
//! running scattering length `ã(r) = r - u/u'` (`u = r w`), which obeys
//! `ã' = (V/2)(r - ã)^2` and is constant wherever `V` vanishes.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{check_grid, MeshParams, MeshSpec};
use crate::ode::{self, Tolerance};
use crate::potential::{finiteness_check, log_weighted_tail, volume_integral, Dimension, RadialPotential, Verdict};

/// `w = 1 - ψ_R` sampled on a grid over `[r_start, R]`, normalised to `w(R) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroEnergyProfile {
    pub d: Dimension,
    pub r_max: f64,
    pub grid: Vec<f64>,
    pub w: Vec<f64>,
    /// Derivative from the left at each node (from the right at the first).
    pub w_prime: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub a_r: f64,
    pub lambda_r: f64,
    pub r: f64,
    #[serde(skip)]
    pub profile: ZeroEnergyProfile,
}

/// Certified bracket on `a = lim_{R→∞} a_R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringLimit {
    pub a: f64,
    pub bracket: (f64, f64),
    pub r_used: f64,
    pub converged: bool,
}

impl ScatteringLimit {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// `λ(R)` from `a_R`: `8π a_R/(1 - a_R/R)` (d = 3) or `4π/ln(R/a_R)` (d = 2).
pub fn lambda_from_a(a_r: f64, r: f64, d: Dimension) -> f64 {
    if a_r == 0.0 {
        return 0.0;
    }
    match d {
        Dimension::Three => 8.0 * PI * a_r / (1.0 - a_r / r),
        Dimension::Two => 4.0 * PI / (r / a_r).ln(),
    }
}

fn tol() -> Tolerance {
    Tolerance { rel: 1e-13, abs: 1e-300 }
}

/// Propagates the zero-energy equation outward, piece by piece, applying
/// shell jumps on arrival. Vacuum pieces are propagated exactly.
#[derive(Debug, Clone)]
struct Propagator<'a> {
    v: &'a RadialPotential,
    d: Dimension,
    knots: Vec<f64>,
    r: f64,
    /// d = 3: (u, u'); d = 2: (w, r w').
    linear: [f64; 2],
    /// d = 3 running scattering length.
    running_a: f64,
}

impl<'a> Propagator<'a> {
    fn new(v: &'a RadialPotential, d: Dimension) -> Self {
        let core = v.hard_core_radius();
        let linear = match (d, v.has_core()) {
            (Dimension::Three, _) => [0.0, 1.0],
            (Dimension::Two, true) => [0.0, core],
            (Dimension::Two, false) => [1.0, 0.0],
        };
        Self {
            v,
            d,
            knots: v.breakpoints(),
            r: core,
            linear,
            running_a: core,
        }
    }

    fn rhs_linear(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        let half_v = 0.5 * self.v.density(r);
        match self.d {
            Dimension::Three => [y[1], half_v * y[0]],
            Dimension::Two => {
                let dw = if r == 0.0 { 0.0 } else { y[1] / r };
                [dw, r * half_v * y[0]]
            }
        }
    }

    /// Integrates across `(self.r, to)`, on which the density is smooth.
    fn integrate_piece(&mut self, to: f64, track_running: bool) -> Result<()> {
        let from = self.r;
        if to <= from {
            return Ok(());
        }
        if !self.v.has_density_in(from, to) {
            match self.d {
                Dimension::Three => {
                    self.linear[0] += self.linear[1] * (to - from);
                }
                Dimension::Two => {
                    if self.linear[1] != 0.0 {
                        self.linear[0] += self.linear[1] * (to / from).ln();
                    }
                }
            }
        } else {
            let y = ode::integrate(|r, y| self.rhs_linear(r, y), from, self.linear, to, tol())?;
            self.linear = y;
            if track_running && self.d == Dimension::Three {
                let v = self.v;
                let a = ode::integrate(
                    |r, a: &[f64; 1]| {
                        let x = r - a[0];
                        [0.5 * v.density(r) * x * x]
                    },
                    from,
                    [self.running_a],
                    to,
                    tol(),
                )?;
                self.running_a = a[0];
            }
        }
        self.r = to;
        Ok(())
    }

    /// Derivative jumps of shells sitting at the current radius.
    fn apply_jumps(&mut self) {
        let r = self.r;
        for s in self.v.shells().iter().filter(|s| s.radius == r) {
            let half_g = 0.5 * s.strength;
            match self.d {
                Dimension::Three => {
                    self.linear[1] += half_g * self.linear[0];
                    let x = r - self.running_a;
                    self.running_a = r - x / (1.0 + half_g * x);
                }
                Dimension::Two => {
                    self.linear[1] += r * half_g * self.linear[0];
                }
            }
        }
    }

    /// Integrates up to `target` (exclusive of jumps at `target`).
    fn advance_before(&mut self, target: f64, track_running: bool) -> Result<()> {
        let stops: Vec<f64> = self
            .knots
            .iter()
            .copied()
            .filter(|&k| k > self.r && k < target)
            .collect();
        for k in stops {
            self.integrate_piece(k, track_running)?;
            self.apply_jumps();
        }
        self.integrate_piece(target, track_running)
    }

    fn advance_to(&mut self, target: f64, track_running: bool) -> Result<()> {
        self.advance_before(target, track_running)?;
        self.apply_jumps();
        Ok(())
    }

    /// `(w, w')` at the current radius, unnormalised.
    fn w_and_derivative(&self) -> (f64, f64) {
        let r = self.r;
        match self.d {
            Dimension::Three => {
                let (u, du) = (self.linear[0], self.linear[1]);
                if r == 0.0 {
                    (du, 0.0)
                } else {
                    (u / r, (du * r - u) / (r * r))
                }
            }
            Dimension::Two => {
                let (w, f) = (self.linear[0], self.linear[1]);
                (w, if r == 0.0 { 0.0 } else { f / r })
            }
        }
    }

    /// `a_R` at the current radius.
    fn a_r(&self) -> f64 {
        match self.d {
            Dimension::Three => self.running_a,
            Dimension::Two => {
                let (w, f) = (self.linear[0], self.linear[1]);
                if f == 0.0 {
                    0.0
                } else {
                    self.r * (-w / f).exp()
                }
            }
        }
    }
}

fn default_grid(v: &RadialPotential, r_max: f64, mesh: MeshParams) -> Result<Vec<f64>> {
    let start = v.hard_core_radius();
    let feature = v.smallest_feature().unwrap_or(r_max).min(r_max - start);
    let shells: Vec<f64> = v.shells().iter().map(|s| s.radius).collect();
    let has_core = v.has_core();
    let knots = v.breakpoints();
    let spec = MeshSpec::new(
        start,
        r_max,
        &knots,
        |r| (has_core && r == start) || shells.contains(&r) || (r > start && knots.contains(&r)),
        0.02 * feature,
        f64::INFINITY,
    )?;
    Ok(spec.build(mesh))
}

/// Solves the zero-energy equation on `[r_start, R]` over a graded mesh.
pub fn solve_zero_energy(v: &RadialPotential, d: Dimension, r_max: f64, mesh: MeshParams) -> Result<ZeroEnergyProfile> {
    check_radius(v, r_max)?;
    let grid = default_grid(v, r_max, mesh)?;
    solve_zero_energy_on(v, d, &grid)
}

/// Like [`solve_zero_energy`] on a caller-supplied grid, which must start at
/// the core radius (or 0) and contain every shell radius inside it.
pub fn solve_zero_energy_on(v: &RadialPotential, d: Dimension, grid: &[f64]) -> Result<ZeroEnergyProfile> {
    check_grid(grid)?;
    let r_max = *grid.last().unwrap();
    check_radius(v, r_max)?;
    if grid[0] != v.hard_core_radius() {
        return Err(Error::BadGrid(format!(
            "grid must start at the core radius {}, starts at {}",
            v.hard_core_radius(),
            grid[0]
        )));
    }
    if let Some(s) = v
        .shells()
        .iter()
        .find(|s| s.radius <= r_max && !grid.contains(&s.radius))
    {
        return Err(Error::ShellNotOnGrid(s.radius));
    }

    let mut prop = Propagator::new(v, d);
    let mut w = Vec::with_capacity(grid.len());
    let mut w_prime = Vec::with_capacity(grid.len());
    let (w0, dw0) = prop.w_and_derivative();
    w.push(w0);
    w_prime.push(dw0);
    for &r in &grid[1..] {
        prop.advance_before(r, false)?;
        let (wr, dwr) = prop.w_and_derivative();
        w.push(wr);
        w_prime.push(dwr);
        prop.apply_jumps();
    }

    let norm = 1.0 / *w.last().unwrap();
    for x in w.iter_mut().chain(w_prime.iter_mut()) {
        *x *= norm;
    }
    Ok(ZeroEnergyProfile {
        d,
        r_max,
        grid: grid.to_vec(),
        w,
        w_prime,
    })
}

fn check_radius(v: &RadialPotential, r_max: f64) -> Result<()> {
    let core = v.hard_core_radius();
    if !(r_max > core) || !r_max.is_finite() {
        return Err(Error::RadiusTooSmall { r: r_max, min: core });
    }
    Ok(())
}

/// Scattering length and energy of `V χ_{|x| ≤ R}`.
pub fn scattering_length_at(v: &RadialPotential, d: Dimension, r_max: f64) -> Result<ScatteringResult> {
    let profile = solve_zero_energy(v, d, r_max, MeshParams::default())?;
    let a_r = a_r_only(v, d, r_max)?;
    Ok(ScatteringResult {
        a_r,
        lambda_r: lambda_from_a(a_r, r_max, d),
        r: r_max,
        profile,
    })
}

/// `a_R` without building a profile.
pub fn a_r_only(v: &RadialPotential, d: Dimension, r_max: f64) -> Result<f64> {
    check_radius(v, r_max)?;
    let mut prop = Propagator::new(v, d);
    prop.advance_to(r_max, true)?;
    Ok(prop.a_r().clamp(0.0, r_max))
}

/// Upper bound on `a` given `a_R`: `a_R + (8π)^{-1} ∫_{|x|>R} V` (d = 3) or
/// `a_R exp((4π)^{-1} ∫_{|x|>R} V [ln(|x|/a_R)]^2)` (d = 2).
fn upper_from_tail(v: &RadialPotential, d: Dimension, r: f64, a_r: f64) -> Result<f64> {
    Ok(match d {
        Dimension::Three => a_r + volume_integral(v, r, d)? / (8.0 * PI),
        Dimension::Two => {
            if a_r > 0.0 {
                a_r * (log_weighted_tail(v, r, a_r)? / (4.0 * PI)).exp()
            } else {
                f64::INFINITY
            }
        }
    })
}

/// `a = lim a_R`, bracketed from below by `a_R` (monotone in `R`) and from
/// above by the tail bound, with `R` doubled until the relative bracket width
/// falls below `tol`.
pub fn scattering_length(v: &RadialPotential, d: Dimension, tol: f64) -> Result<ScatteringLimit> {
    let report = finiteness_check(v, d);
    if report.verdict == Verdict::Infinite {
        return Ok(ScatteringLimit {
            a: f64::INFINITY,
            bracket: (0.0, f64::INFINITY),
            r_used: 0.0,
            converged: true,
        });
    }
    if v.is_zero() {
        return Ok(ScatteringLimit {
            a: 0.0,
            bracket: (0.0, 0.0),
            r_used: 0.0,
            converged: true,
        });
    }
    let global_upper = report.a_upper_3d.or(report.a_upper_2d).unwrap_or(f64::INFINITY);
    let mut r = 2.0 * v.length_scale();
    let mut prop = Propagator::new(v, d);
    let mut last = (0.0, f64::INFINITY);
    for _ in 0..200 {
        prop.advance_to(r, true)?;
        let lo = prop.a_r().clamp(0.0, r);
        let hi = upper_from_tail(v, d, r, lo)?.min(global_upper).max(lo);
        last = (lo, hi);
        if hi - lo <= tol * lo || hi == lo {
            return Ok(ScatteringLimit {
                a: 0.5 * (lo + hi),
                bracket: (lo, hi),
                r_used: r,
                converged: true,
            });
        }
        if r > 1e15 {
            break;
        }
        r *= 2.0;
    }
    Ok(ScatteringLimit {
        a: 0.5 * (last.0 + last.1),
        bracket: last,
        r_used: r,
        converged: false,
    })
}

/// Audits `∫_{|x|>R} V ≤ 8πa/(1-a/R) - 8πa_R/(1-a_R/R)` (d = 3), resp.
/// `≤ 4π/ln(R/a) - 4π/ln(R/a_R)` (d = 2), with a relative slack of `1e-9`.
pub fn check_tail_bound(v: &RadialPotential, d: Dimension, r: f64, a: f64, a_r: f64) -> Result<bool> {
    if !(r > a) {
        return Err(Error::RadiusTooSmall { r, min: a });
    }
    let lhs = volume_integral(v, r, d)?;
    let full = lambda_from_a(a, r, d);
    let rhs = full - lambda_from_a(a_r, r, d);
    Ok(lhs <= rhs + 1e-9 * full.abs().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Form, Segment, Shell};
    use approx::assert_relative_eq;

    #[test]
    fn hard_sphere_profile_is_exact() {
        let v = RadialPotential::hard_core(1.0).unwrap();
        let p = solve_zero_energy(&v, Dimension::Three, 10.0, MeshParams::default()).unwrap();
        for (&r, &w) in p.grid.iter().zip(&p.w) {
            let want = (1.0 - 1.0 / r) / (1.0 - 0.1);
            assert!((w - want).abs() < 1e-13, "r = {r}");
        }
        assert_eq!(*p.w.last().unwrap(), 1.0);
        assert_eq!(p.w[0], 0.0);
    }

    #[test]
    fn free_profile_is_flat() {
        let p = solve_zero_energy(&RadialPotential::zero(), Dimension::Three, 5.0, MeshParams::default()).unwrap();
        assert!(p.w.iter().all(|&w| w == 1.0));
        assert!(p.w_prime.iter().all(|&w| w == 0.0));
        let r = scattering_length_at(&RadialPotential::zero(), Dimension::Three, 5.0).unwrap();
        assert_eq!((r.a_r, r.lambda_r), (0.0, 0.0));
        let r = scattering_length_at(&RadialPotential::zero(), Dimension::Two, 5.0).unwrap();
        assert_eq!((r.a_r, r.lambda_r), (0.0, 0.0));
    }

    #[test]
    fn shell_profile_is_piecewise_linear_in_u() {
        let v = RadialPotential::shell(1.0, 2.0).unwrap();
        let p = solve_zero_energy(&v, Dimension::Three, 4.0, MeshParams::default()).unwrap();
        // u = r on [0,1], u = 2r - 1 beyond; normalised by u(4)/4 = 7/4
        for (&r, &w) in p.grid.iter().zip(&p.w) {
            let u = if r <= 1.0 { r } else { 2.0 * r - 1.0 };
            let want = if r == 0.0 { 1.0 } else { u / r } / 1.75;
            assert!((w - want).abs() < 1e-12, "r = {r}: {w} vs {want}");
        }
        let a = scattering_length_at(&v, Dimension::Three, 4.0).unwrap().a_r;
        assert!((a - 0.5).abs() < 1e-14);
    }

    #[test]
    fn hard_core_a_r_is_the_radius() {
        let v = RadialPotential::hard_core(1.0).unwrap();
        for r in [2.0, 5.0, 50.0] {
            let res = scattering_length_at(&v, Dimension::Three, r).unwrap();
            assert_eq!(res.a_r, 1.0);
            assert_relative_eq!(res.lambda_r, 8.0 * PI / (1.0 - 1.0 / r), max_relative = 1e-15);
        }
        let res = scattering_length_at(&v, Dimension::Two, 10.0).unwrap();
        assert_relative_eq!(res.a_r, 1.0, max_relative = 1e-14);
        assert_relative_eq!(res.lambda_r, 4.0 * PI / 10f64.ln(), max_relative = 1e-13);
    }

    #[test]
    fn radius_inside_core_is_rejected() {
        let v = RadialPotential::hard_core(1.0).unwrap();
        assert!(matches!(
            scattering_length_at(&v, Dimension::Three, 1.0),
            Err(Error::RadiusTooSmall { .. })
        ));
    }

    #[test]
    fn explicit_grid_must_hit_shells() {
        let v = RadialPotential::shell(1.0, 2.0).unwrap();
        let grid: Vec<f64> = (0..=30).map(|i| i as f64 * 0.13).collect();
        assert_eq!(
            solve_zero_energy_on(&v, Dimension::Three, &grid),
            Err(Error::ShellNotOnGrid(1.0))
        );
    }

    #[test]
    fn square_well_matches_analytic_scattering_length() {
        // u'' = (c/2) u on [0,1]: a = 1 - tanh(k)/k, k = sqrt(c/2)
        let c = 3.0;
        let v = RadialPotential::square_well(c, 1.0).unwrap();
        let k = (c / 2.0f64).sqrt();
        let want = 1.0 - k.tanh() / k;
        let lim = scattering_length(&v, Dimension::Three, 1e-12).unwrap();
        assert!(lim.converged);
        assert_relative_eq!(lim.a, want, max_relative = 1e-11);
        assert_eq!(lim.width(), 0.0);
    }

    #[test]
    fn planar_square_well_matches_bessel_solution() {
        // interior w = I0(k r); exterior log: ln(1/a) = I0(k)/(k I1(k))
        let c = 2.0;
        let v = RadialPotential::square_well(c, 1.0).unwrap();
        let k = (c / 2.0f64).sqrt();
        let i0 = |x: f64| (0..40).map(|j| (x * x / 4.0).powi(j) / fact(j).powi(2)).sum::<f64>();
        let i1 = |x: f64| (0..40).map(|j| (x / 2.0) * (x * x / 4.0).powi(j) / (fact(j) * fact(j + 1))).sum::<f64>();
        let want = (-i0(k) / (k * i1(k))).exp();
        let a = a_r_only(&v, Dimension::Two, 7.0).unwrap();
        assert_relative_eq!(a, want, max_relative = 1e-11);
    }

    fn fact(n: i32) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    #[test]
    fn infinite_scattering_length() {
        let v = RadialPotential::power_tail(0.0, 1.0, 3.0, 1.0).unwrap();
        assert!(scattering_length(&v, Dimension::Three, 1e-6).unwrap().a.is_infinite());
    }

    #[test]
    fn tail_bound_audits() {
        let v = RadialPotential::hard_core(1.0).unwrap();
        assert!(check_tail_bound(&v, Dimension::Three, 2.0, 1.0, 1.0).unwrap());

        let v = RadialPotential::shell(3.0, 1.0).unwrap();
        let a = scattering_length(&v, Dimension::Three, 1e-12).unwrap().a;
        assert_relative_eq!(a, 1.8, max_relative = 1e-13);
        let a_r = a_r_only(&v, Dimension::Three, 2.0).unwrap();
        assert_eq!(a_r, 0.0);
        assert!(check_tail_bound(&v, Dimension::Three, 2.0, a, a_r).unwrap());
        assert!(check_tail_bound(&v, Dimension::Three, 1.0, a, a_r).is_err());

        let v = RadialPotential::power_tail(0.5, 1.0, 4.0, 1.0).unwrap();
        let lim = scattering_length(&v, Dimension::Three, 1e-9).unwrap();
        let a_r = a_r_only(&v, Dimension::Three, 10.0).unwrap();
        assert!(check_tail_bound(&v, Dimension::Three, 10.0, lim.bracket.0, a_r).unwrap());
    }

    #[test]
    fn mixed_potential_profile_is_monotone() {
        let v = RadialPotential::new(
            0.3,
            vec![Shell { radius: 0.8, strength: 1.5 }],
            vec![
                Segment::new(0.3, 0.6, Form::Constant { c: 4.0 }),
                Segment::new(1.0, f64::INFINITY, Form::Exponential { c: 2.0, mu: 1.5 }),
            ],
        )
        .unwrap();
        for d in [Dimension::Two, Dimension::Three] {
            let p = solve_zero_energy(&v, d, 6.0, MeshParams::default()).unwrap();
            assert!(p.w.windows(2).all(|w| w[1] >= w[0]));
            assert!(p.w.iter().all(|&w| w >= 0.0));
            assert_eq!(*p.w.last().unwrap(), 1.0);
        }
    }
}
