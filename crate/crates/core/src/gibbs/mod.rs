//! The positive-temperature functional
//!
//! ```text
//! E_β(φ) = ∫ 2|∇φ|² + V |1 - φ|² + (2/β) |φ|² dx
//! ```
//!
//! and its infimum `e(β)` over radial profiles, computed by P1 finite
//! elements with a lumped (trapezoidal) zeroth-order term. Lumping keeps the
//! discrete operator an M-matrix, so the discrete minimiser obeys
//! `0 ≤ φ ≤ 1`.

mod bounds;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{check_grid, MeshParams, MeshSpec};
use crate::potential::{finiteness_check, volume_integral, Dimension, RadialPotential, Verdict};
use crate::quad::gauss4;
use crate::tridiag;

pub use bounds::{bounds_report, theorem1_bound, trial_state_energy, BoundsReport, Check, TrialEnergy, TrialRadius};

/// Inverse temperature, in units of length squared.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Beta(f64);

impl Beta {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::NonPositive(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Thermal length `√β`.
    pub fn thermal_length(self) -> f64 {
        self.0.sqrt()
    }
}

/// A radial profile, linear between nodes and zero beyond the last node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::BadGrid("grid and values differ in length".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn at(&self, r: f64) -> f64 {
        let g = &self.grid;
        if r < g[0] || r > g[g.len() - 1] {
            return 0.0;
        }
        let i = g.partition_point(|&x| x <= r).clamp(1, g.len() - 1);
        let t = (r - g[i - 1]) / (g[i] - g[i - 1]);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }
}

/// `E_β(φ)` for a piecewise-linear radial profile.
///
/// The profile must start at the core radius (at 0 without a core), equal 1
/// there when a core is present, and vanish at its last node. The gradient
/// term is exact; the potential and mass terms use 4-point Gauss-Legendre per
/// element; shells, the core volume and the tail beyond the last node are
/// added in closed form.
pub fn energy_functional(profile: &RadialProfile, v: &RadialPotential, d: Dimension, beta: Beta) -> Result<f64> {
    let grid = &profile.grid;
    let phi = &profile.values;
    let core = v.hard_core_radius();
    if grid[0] != core {
        return Err(Error::BadGrid(format!(
            "profile must start at the core radius {core}, starts at {}",
            grid[0]
        )));
    }
    if v.has_core() && (phi[0] - 1.0).abs() > 1e-12 {
        return Err(Error::ProfileNotOneOnCore(phi[0]));
    }
    let last = phi[phi.len() - 1];
    if last.abs() > 1e-12 {
        return Err(Error::BadGrid(format!("profile must vanish at its last node, found {last}")));
    }
    let r_max = grid[grid.len() - 1];
    let mass = 2.0 / beta.value();
    let dim = d.value() as i32;

    let mut total = 0.0;
    for i in 0..grid.len() - 1 {
        let (r0, r1) = (grid[i], grid[i + 1]);
        let (p0, p1) = (phi[i], phi[i + 1]);
        let h = r1 - r0;
        let slope = (p1 - p0) / h;
        let jac = (r1.powi(dim) - r0.powi(dim)) / dim as f64;
        let grad = 2.0 * slope * slope * jac;
        let local = gauss4(r0, r1, |r| {
            let p = p0 + slope * (r - r0);
            let q = 1.0 - p;
            (v.density(r) * q * q + mass * p * p) * d.jacobian(r)
        });
        total += grad + local;
    }
    total *= d.unit_sphere_area();

    for s in v.shells().iter().filter(|s| s.radius <= r_max) {
        let q = 1.0 - profile.at(s.radius);
        total += d.sphere_area(s.radius) * s.strength * q * q;
    }
    total += volume_integral(v, r_max, d)?;
    total += mass * d.ball_volume(core);
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsSolution {
    pub d: Dimension,
    pub beta: Beta,
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub e_beta: f64,
    /// Relative error estimate from one mesh halving.
    pub error_estimate: f64,
    pub r_max: f64,
    /// False when the scattering length is infinite; the value is then the
    /// truncated-domain energy only.
    pub certified: bool,
}

impl GibbsSolution {
    pub fn absolute_error(&self) -> f64 {
        self.error_estimate * self.e_beta.abs()
    }

    pub fn profile(&self) -> RadialProfile {
        RadialProfile {
            grid: self.grid.clone(),
            values: self.phi.clone(),
        }
    }
}

/// Truncation radius `R_max = scale + c √β`.
const TRUNCATION_FACTOR: f64 = 12.0;
const MAX_ENLARGEMENTS: u32 = 4;
const BOUNDARY_PENALTY: f64 = 1e-9;

fn mesh_for(v: &RadialPotential, beta: Beta, r_max: f64) -> Result<MeshSpec> {
    let start = v.hard_core_radius();
    let thermal = beta.thermal_length();
    let feature = v.smallest_feature().unwrap_or(thermal).min(thermal);
    let knots = v.breakpoints();
    let has_core = v.has_core();
    MeshSpec::new(
        start,
        r_max,
        &knots,
        |r| if r == start { has_core } else { knots.contains(&r) },
        0.05 * feature,
        0.25 * thermal,
    )
}

/// One discrete solve on a fixed mesh.
pub fn solve_on_grid(v: &RadialPotential, d: Dimension, beta: Beta, grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(grid)?;
    let n = grid.len();
    let s = d.unit_sphere_area();
    let mass = 2.0 / beta.value();
    let dim = d.value() as i32;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    let mut rhs = vec![0.0; n];
    for i in 0..n - 1 {
        let (r0, r1) = (grid[i], grid[i + 1]);
        let h = r1 - r0;
        let jac = (r1.powi(dim) - r0.powi(dim)) / dim as f64;
        let k = 2.0 * s * jac / (h * h);
        diag[i] += k;
        diag[i + 1] += k;
        off[i] -= k;
        // lumped zeroth-order terms: ∫ (V + 2/β) N_j r^{d-1} and ∫ V N_j r^{d-1}
        let (mut v0, mut v1, mut m0, mut m1) = (0.0, 0.0, 0.0, 0.0);
        for (x, w) in crate::quad::GL4_NODES.iter().zip(crate::quad::GL4_WEIGHTS.iter()) {
            let r = 0.5 * (r0 + r1) + 0.5 * h * x;
            let n1 = (r - r0) / h;
            let n0 = 1.0 - n1;
            let jw = 0.5 * h * w * d.jacobian(r) * s;
            let vr = v.density(r);
            v0 += jw * vr * n0;
            v1 += jw * vr * n1;
            m0 += jw * mass * n0;
            m1 += jw * mass * n1;
        }
        diag[i] += v0 + m0;
        diag[i + 1] += v1 + m1;
        rhs[i] += v0;
        rhs[i + 1] += v1;
    }
    for sh in v.shells() {
        if let Some(j) = grid.iter().position(|&r| r == sh.radius) {
            let w = d.sphere_area(sh.radius) * sh.strength;
            diag[j] += w;
            rhs[j] += w;
        } else if sh.radius < grid[n - 1] {
            return Err(Error::ShellNotOnGrid(sh.radius));
        }
    }

    // Dirichlet: φ(R_max) = 0, and φ(core) = 1 with a core.
    let first = usize::from(v.has_core());
    let last = n - 1;
    let m = last - first;
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    let mut c = vec![0.0; m];
    let mut f = vec![0.0; m];
    for (k, j) in (first..last).enumerate() {
        b[k] = diag[j];
        f[k] = rhs[j];
        if j > first {
            a[k] = off[j - 1];
        } else if first == 1 {
            f[k] -= off[0] * 1.0;
        }
        if j + 1 < last {
            c[k] = off[j];
        }
    }
    let x = tridiag::solve(&a, &b, &c, &f)?;
    let mut phi = Vec::with_capacity(n);
    if first == 1 {
        phi.push(1.0);
    }
    phi.extend(x);
    phi.push(0.0);
    Ok(phi)
}

/// Gradient energy carried by the last element, a proxy for the error made
/// by imposing `φ(R_max) = 0`.
fn boundary_penalty(grid: &[f64], phi: &[f64], d: Dimension) -> f64 {
    let n = grid.len();
    let (r0, r1) = (grid[n - 2], grid[n - 1]);
    let slope = (phi[n - 1] - phi[n - 2]) / (r1 - r0);
    let dim = d.value() as i32;
    2.0 * slope * slope * (r1.powi(dim) - r0.powi(dim)) / dim as f64 * d.unit_sphere_area()
}

struct Level {
    grid: Vec<f64>,
    phi: Vec<f64>,
    energy: f64,
}

fn solve_level(v: &RadialPotential, d: Dimension, beta: Beta, r_max: f64, mesh: MeshParams) -> Result<Level> {
    let grid = mesh_for(v, beta, r_max)?.build(mesh);
    let phi = solve_on_grid(v, d, beta, &grid)?;
    let energy = energy_functional(
        &RadialProfile {
            grid: grid.clone(),
            values: phi.clone(),
        },
        v,
        d,
        beta,
    )?;
    Ok(Level { grid, phi, energy })
}

/// Radius scale used for truncation.
fn range_scale(v: &RadialPotential) -> f64 {
    v.range().unwrap_or_else(|| v.length_scale())
}

/// The discrete minimiser and energy at a single mesh level, with the
/// truncation radius enlarged until the boundary is negligible.
pub fn solve_ebeta_at(v: &RadialPotential, d: Dimension, beta: Beta, mesh: MeshParams) -> Result<(Vec<f64>, Vec<f64>, f64, f64)> {
    let mut factor = TRUNCATION_FACTOR;
    let mut penalty = f64::INFINITY;
    for _ in 0..=MAX_ENLARGEMENTS {
        let r_max = range_scale(v) + factor * beta.thermal_length();
        let level = solve_level(v, d, beta, r_max, mesh)?;
        penalty = boundary_penalty(&level.grid, &level.phi, d);
        if penalty <= BOUNDARY_PENALTY * level.energy.abs() || level.energy == 0.0 {
            return Ok((level.grid, level.phi, level.energy, r_max));
        }
        factor *= 2.0;
    }
    Err(Error::Truncation(penalty))
}

/// `e(β) = inf E_β`, with a relative error estimate from one mesh halving.
pub fn solve_ebeta(v: &RadialPotential, d: Dimension, beta: Beta, mesh: MeshParams) -> Result<GibbsSolution> {
    let certified = finiteness_check(v, d).verdict != Verdict::Infinite;
    let (_, _, coarse, _) = solve_ebeta_at(v, d, beta, mesh)?;
    let (grid, phi, fine, r_max) = solve_ebeta_at(v, d, beta, mesh.refined())?;
    let error_estimate = if fine == 0.0 {
        0.0
    } else {
        ((coarse - fine) / 3.0 / fine).abs()
    };
    Ok(GibbsSolution {
        d,
        beta,
        grid,
        phi,
        e_beta: fine,
        error_estimate,
        r_max,
        certified,
    })
}
