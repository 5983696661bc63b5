//! Feynman-Kac Monte Carlo estimate of
//!
//! ```text
//! g(β) = (1/β) ∫ dx E_x[1 - exp(-∫_0^β V(X_s) ds)]
//! ```
//!
//! where `X` is a diffusion with generator `2Δ` (per-coordinate increment
//! variance `4Δt`). Starting points are uniform in a ball; the work is split
//! into chunks with independent, seed-keyed random streams and reduced in
//! chunk order, so results do not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::{solve_ebeta, Beta};
use crate::mesh::MeshParams;
use crate::potential::{Dimension, RadialPotential};
use crate::quad::integrate_to_infinity;

/// Default margin of the sampling ball beyond the potential's range, in
/// thermal lengths.
pub const SAMPLE_MARGIN: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: u64,
    pub n_steps: u32,
    pub seed: u64,
    /// Radius of the ball of starting points; `range + 6√β` when absent.
    pub sample_radius: Option<f64>,
    pub chunk_size: u64,
    /// Also kill paths whose Brownian bridge between two samples enters the
    /// hard core (half-space approximation), removing most of the
    /// discrete-monitoring bias.
    #[serde(default)]
    pub bridge: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            n_steps: 2000,
            seed: 0x5eed,
            sample_radius: None,
            chunk_size: 1024,
            bridge: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_effective: u64,
    pub beta: Beta,
    pub sample_radius: f64,
    /// Radius at which an infinite-range potential was cut off.
    pub truncated_at: Option<f64>,
    /// Bound on the contribution of starting points outside the sampling ball.
    pub bias_bound: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Self {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64,
        }
    }
}

fn norm(x: &[f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

struct Walker<'a> {
    v: &'a RadialPotential,
    dim: usize,
    radius: f64,
    dt: f64,
    step_sd: f64,
    n_steps: u32,
    has_density: bool,
    bridge: bool,
}

impl Walker<'_> {
    fn start(&self, rng: &mut ChaCha8Rng) -> [f64; 3] {
        let mut x = [0.0; 3];
        loop {
            for xi in x.iter_mut().take(self.dim) {
                *xi = rng.sample(StandardNormal);
            }
            let n = norm(&x);
            if n > 0.0 {
                let u: f64 = rng.random();
                let r = self.radius * u.powf(1.0 / self.dim as f64);
                for xi in x.iter_mut().take(self.dim) {
                    *xi *= r / n;
                }
                return x;
            }
        }
    }

    /// `1 - exp(-∫ V(X_s) ds)` along one path.
    fn path(&self, rng: &mut ChaCha8Rng) -> f64 {
        let core = self.v.hard_core_radius();
        let mut x = self.start(rng);
        let mut r = norm(&x);
        if r < core {
            return 1.0;
        }
        let mut occupation = 0.0;
        let mut survival = 1.0;
        let bridge = self.bridge && core > 0.0;
        let variance = self.step_sd * self.step_sd;
        for _ in 0..self.n_steps {
            let mut y = x;
            for yi in y.iter_mut().take(self.dim) {
                let z: f64 = rng.sample(StandardNormal);
                *yi += self.step_sd * z;
            }
            let ry = norm(&y);
            if ry < core {
                return 1.0;
            }
            if bridge {
                survival *= -(-2.0 * (r - core) * (ry - core) / variance).exp_m1();
            }
            if self.has_density {
                let mid = [0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1]), 0.5 * (x[2] + y[2])];
                occupation += self.v.density(norm(&mid)) * self.dt;
            }
            for s in self.v.shells() {
                if (r - s.radius) * (ry - s.radius) < 0.0 {
                    occupation += s.strength * self.dt / (ry - r).abs();
                }
            }
            x = y;
            r = ry;
        }
        1.0 - survival * (-occupation).exp()
    }
}

/// Bound on `(1/β) ∫_{|x| > R_s} P_x(X reaches the ball of radius ρ before β) dx`.
///
/// In three dimensions the hitting probability is known exactly,
/// `(ρ/r) erfc((r - ρ)/√(8β))`. In two dimensions Lévy's maximal inequality
/// gives `P(sup_{t≤β} |X_t - x| ≥ m) ≤ 2 P(|X_β - x| ≥ m) = 2 exp(-m²/(8β))`.
fn outside_bias(range: f64, radius: f64, beta: f64, d: Dimension) -> f64 {
    let scale = (8.0 * beta).sqrt();
    let tail = |r: f64| {
        let m = (r - range) / scale;
        let p = match d {
            Dimension::Three => range / r * libm::erfc(m),
            Dimension::Two => (2.0 * (-m * m).exp()).min(1.0),
        };
        p * d.sphere_area(r)
    };
    integrate_to_infinity(tail, radius, 1e-14, 1e-8) / beta
}

fn validate(cfg: &McConfig) -> Result<()> {
    if cfg.n_paths == 0 || cfg.n_steps == 0 || cfg.chunk_size == 0 {
        return Err(Error::McConfig("path, step and chunk counts must be positive".into()));
    }
    Ok(())
}

/// Monte Carlo estimate of `g(β)` with its standard error.
pub fn estimate_g(v: &RadialPotential, d: Dimension, beta: Beta, cfg: &McConfig) -> Result<McEstimate> {
    validate(cfg)?;
    let b = beta.value();
    let thermal = beta.thermal_length();
    let natural = v.range();
    let radius = cfg
        .sample_radius
        .unwrap_or_else(|| natural.unwrap_or_else(|| v.length_scale()) + SAMPLE_MARGIN * thermal);
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::McConfig(format!("sample radius must be positive, got {radius}")));
    }
    if let Some(range) = natural {
        if radius < range {
            return Err(Error::McConfig(format!(
                "sample radius {radius} is smaller than the potential range {range}"
            )));
        }
    }
    let truncated_at = if natural.is_none() { Some(radius) } else { None };
    let v = match truncated_at {
        Some(r) => v.truncated(r),
        None => v.clone(),
    };
    if v.is_zero() {
        return Ok(McEstimate {
            mean: 0.0,
            stderr: 0.0,
            n_effective: cfg.n_paths,
            beta,
            sample_radius: radius,
            truncated_at,
            bias_bound: 0.0,
        });
    }

    let dt = b / cfg.n_steps as f64;
    let walker = Walker {
        v: &v,
        dim: d.value() as usize,
        radius,
        dt,
        step_sd: (4.0 * dt).sqrt(),
        n_steps: cfg.n_steps,
        has_density: !v.segments().is_empty(),
        bridge: cfg.bridge,
    };
    let chunks = cfg.n_paths.div_ceil(cfg.chunk_size);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c);
            let n = cfg.chunk_size.min(cfg.n_paths - c * cfg.chunk_size);
            let mut m = Moments::default();
            for _ in 0..n {
                m.push(walker.path(&mut rng));
            }
            m
        })
        .collect();
    let total = partial.into_iter().fold(Moments::default(), Moments::merge);

    let scale = d.ball_volume(radius) / b;
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    let range = v.range().unwrap_or(radius);
    Ok(McEstimate {
        mean: scale * total.mean,
        stderr: scale * (var / total.n as f64).sqrt(),
        n_effective: total.n,
        beta,
        sample_radius: radius,
        truncated_at,
        bias_bound: outside_bias(range, radius, b, d),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub estimate: McEstimate,
    /// `e(2β)` and its absolute error estimate.
    pub e_lower: (f64, f64),
    /// `e(β)` and its absolute error estimate.
    pub e_upper: (f64, f64),
    pub lower_limit: f64,
    pub upper_limit: f64,
    pub pass: bool,
    pub caveat: &'static str,
}

const CAVEAT: &str =
    "discrete monitoring of the hard core (unless bridged) and the finite sampling ball both bias the estimate low";

/// Checks `e(2β) - 3(σ+ε) ≤ ĝ(β) ≤ e(β) + 3(σ+ε)`, with `σ` the Monte Carlo
/// standard error and `ε` the larger solver error estimate.
pub fn sandwich_check(v: &RadialPotential, d: Dimension, beta: Beta, cfg: &McConfig) -> Result<SandwichReport> {
    let estimate = estimate_g(v, d, beta, cfg)?;
    let hi = solve_ebeta(v, d, beta, MeshParams::default())?;
    let lo = solve_ebeta(v, d, Beta::new(2.0 * beta.value())?, MeshParams::default())?;
    let eps = hi.absolute_error().max(lo.absolute_error());
    let slack = 3.0 * (estimate.stderr + eps);
    let lower_limit = lo.e_beta - slack;
    let upper_limit = hi.e_beta + slack;
    Ok(SandwichReport {
        estimate,
        e_lower: (lo.e_beta, lo.absolute_error()),
        e_upper: (hi.e_beta, hi.absolute_error()),
        lower_limit,
        upper_limit,
        pass: lower_limit <= estimate.mean && estimate.mean <= upper_limit,
        caveat: CAVEAT,
    })
}

/// `∫ V dx` over the ball of radius `r`, handy as the small-β limit of `g`.
pub fn small_beta_limit(v: &RadialPotential, d: Dimension) -> f64 {
    let range = v.range().unwrap_or(f64::INFINITY);
    let shells: f64 = v.shells().iter().map(|s| s.strength * d.sphere_area(s.radius)).sum();
    if v.has_core() {
        return f64::INFINITY;
    }
    v.radial_density_moment(0.0, range, d) * d.unit_sphere_area() + shells
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(n: u64, steps: u32) -> McConfig {
        McConfig {
            n_paths: n,
            n_steps: steps,
            ..McConfig::default()
        }
    }

    #[test]
    fn zero_potential_is_exactly_zero() {
        let e = estimate_g(&RadialPotential::zero(), Dimension::Three, Beta::new(1.0).unwrap(), &cfg(10, 10)).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let v = RadialPotential::hard_core(1.0).unwrap();
        let c = McConfig {
            chunk_size: 64,
            ..cfg(2000, 50)
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_g(&v, Dimension::Three, Beta::new(1.0).unwrap(), &c).unwrap())
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one.mean.to_bits(), four.mean.to_bits());
        assert_eq!(one.stderr.to_bits(), four.stderr.to_bits());
        let other_seed = estimate_g(&v, Dimension::Three, Beta::new(1.0).unwrap(), &McConfig { seed: 7, ..c }).unwrap();
        assert_ne!(one.mean, other_seed.mean);
    }

    #[test]
    fn small_beta_square_well() {
        let v = RadialPotential::square_well(1.0, 1.0).unwrap();
        let e = estimate_g(&v, Dimension::Three, Beta::new(0.01).unwrap(), &cfg(20_000, 20)).unwrap();
        let want = 4.0 * PI / 3.0;
        assert!((e.mean - want).abs() < 3.0 * e.stderr + 0.02 * want, "{e:?}");
        assert!((small_beta_limit(&v, Dimension::Three) - want).abs() < 1e-12);
    }

    #[test]
    fn bridged_hard_sphere_matches_sausage_volume() {
        let v = RadialPotential::hard_core(1.0).unwrap();
        let c = McConfig {
            bridge: true,
            ..cfg(20_000, 400)
        };
        let e = estimate_g(&v, Dimension::Three, Beta::new(1.0).unwrap(), &c).unwrap();
        let exact = crate::verify::hard_sphere_g(1.0, 1.0);
        assert!((e.mean - exact).abs() < 3.0 * e.stderr + e.bias_bound, "{e:?} vs {exact}");
    }

    #[test]
    fn rejects_bad_configurations() {
        let v = RadialPotential::square_well(1.0, 2.0).unwrap();
        let b = Beta::new(1.0).unwrap();
        assert!(estimate_g(&v, Dimension::Three, b, &cfg(0, 10)).is_err());
        let small = McConfig {
            sample_radius: Some(1.0),
            ..cfg(10, 10)
        };
        assert!(matches!(estimate_g(&v, Dimension::Three, b, &small), Err(Error::McConfig(_))));
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 17) as f64 * 0.3).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..40].iter().for_each(|&x| a.push(x));
        xs[40..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert!((m.mean - all.mean).abs() < 1e-12 && (m.m2 - all.m2).abs() < 1e-9);
    }
}
