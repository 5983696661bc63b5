//! Radial, non-negative potentials: an optional hard core, a finite list of
//! delta shells and piecewise densities with closed-form radial moments.

mod finiteness;
mod spec;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

pub use finiteness::{finiteness_check, FinitenessReport, Verdict};
pub use spec::{parse, PotentialSpec, SegmentSpec, ShellSpec, UpperLimit};

/// Spatial dimension; only the plane and three-space are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn value(self) -> u32 {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    /// Surface area of the unit sphere `S^{d-1}`.
    pub fn unit_sphere_area(self) -> f64 {
        match self {
            Dimension::Two => 2.0 * PI,
            Dimension::Three => 4.0 * PI,
        }
    }

    /// Surface area of the sphere of radius `r`.
    pub fn sphere_area(self, r: f64) -> f64 {
        match self {
            Dimension::Two => 2.0 * PI * r,
            Dimension::Three => 4.0 * PI * r * r,
        }
    }

    pub fn ball_volume(self, r: f64) -> f64 {
        match self {
            Dimension::Two => PI * r * r,
            Dimension::Three => 4.0 / 3.0 * PI * r * r * r,
        }
    }

    /// `r^{d-1}`, the radial Jacobian without the angular factor.
    #[inline]
    pub fn jacobian(self, r: f64) -> f64 {
        match self {
            Dimension::Two => r,
            Dimension::Three => r * r,
        }
    }
}

impl TryFrom<i64> for Dimension {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            other => Err(Error::BadDimension(other)),
        }
    }
}

impl From<Dimension> for i64 {
    fn from(d: Dimension) -> i64 {
        d.value() as i64
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Delta shell `strength * δ(|x| - radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shell {
    pub radius: f64,
    pub strength: f64,
}

/// Functional form of a density segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "params", rename_all = "snake_case")]
pub enum Form {
    /// `V(r) = c`
    Constant { c: f64 },
    /// `V(r) = c r^{-p}`
    PowerTail { c: f64, p: f64 },
    /// `V(r) = c e^{-mu r}`
    Exponential { c: f64, mu: f64 },
}

impl Form {
    fn coefficient(&self) -> f64 {
        match *self {
            Form::Constant { c } | Form::PowerTail { c, .. } | Form::Exponential { c, .. } => c,
        }
    }

    #[inline]
    fn value(&self, r: f64) -> f64 {
        match *self {
            Form::Constant { c } => c,
            Form::PowerTail { c, p } => c * r.powf(-p),
            Form::Exponential { c, mu } => c * (-mu * r).exp(),
        }
    }
}

/// Density `form` on the half-open interval `[r_lo, r_hi)`; `r_hi` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub r_lo: f64,
    pub r_hi: f64,
    pub form: Form,
}

impl Segment {
    pub fn new(r_lo: f64, r_hi: f64, form: Form) -> Self {
        Self { r_lo, r_hi, form }
    }

    pub fn is_zero(&self) -> bool {
        self.form.coefficient() == 0.0
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        if r >= self.r_lo && r < self.r_hi {
            self.form.value(r)
        } else {
            0.0
        }
    }

    fn clip(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let a = lo.max(self.r_lo);
        let b = hi.min(self.r_hi);
        (a < b).then_some((a, b))
    }

    /// `∫_lo^hi V(r) r^k dr` over the part of `[lo, hi]` covered by the segment,
    /// for `k ∈ {1, 2}`. Returns `+∞` for divergent tails.
    pub fn radial_moment(&self, lo: f64, hi: f64, k: u32) -> f64 {
        let Some((a, b)) = self.clip(lo, hi) else {
            return 0.0;
        };
        if self.is_zero() {
            return 0.0;
        }
        let kf = k as f64;
        match self.form {
            Form::Constant { c } => {
                if b.is_infinite() {
                    return f64::INFINITY;
                }
                c * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (kf + 1.0)
            }
            Form::PowerTail { c, p } => c * power_moment(a, b, kf - p),
            Form::Exponential { c, mu } => {
                if mu == 0.0 {
                    return Segment::new(a, b, Form::Constant { c }).radial_moment(a, b, k);
                }
                c * (exp_antiderivative(b, mu, k) - exp_antiderivative(a, mu, k))
            }
        }
    }

    /// `∫_lo^hi V(r) r [ln(r/reference)]^2 dr` (planar log-weighted moment).
    pub fn log_moment(&self, lo: f64, hi: f64, reference: f64) -> f64 {
        let Some((a, b)) = self.clip(lo, hi) else {
            return 0.0;
        };
        if self.is_zero() {
            return 0.0;
        }
        match self.form {
            Form::Constant { c } => {
                if b.is_infinite() {
                    return f64::INFINITY;
                }
                let g = |r: f64| {
                    if r == 0.0 {
                        return 0.0;
                    }
                    let l = (r / reference).ln();
                    0.5 * r * r * (l * l - l + 0.5)
                };
                c * (g(b) - g(a))
            }
            Form::PowerTail { c, p } => {
                let m = 2.0 - p;
                if m == 0.0 {
                    if b.is_infinite() {
                        return f64::INFINITY;
                    }
                    let (la, lb) = ((a / reference).ln(), (b / reference).ln());
                    return c * (lb.powi(3) - la.powi(3)) / 3.0;
                }
                if b.is_infinite() && m > 0.0 {
                    return f64::INFINITY;
                }
                if m.abs() < 1e-3 {
                    return c * log_moment_numeric(&|r| r.powf(-p), a, b, reference);
                }
                let g = |r: f64| {
                    if r.is_infinite() || r == 0.0 {
                        return 0.0;
                    }
                    let l = (r / reference).ln();
                    r.powf(m) / m * (l * l - 2.0 * l / m + 2.0 / (m * m))
                };
                c * (g(b) - g(a))
            }
            Form::Exponential { c, mu } => {
                if mu == 0.0 {
                    return Segment::new(a, b, Form::Constant { c }).log_moment(a, b, reference);
                }
                c * log_moment_numeric(&|r| (-mu * r).exp(), a, b, reference)
            }
        }
    }
}

/// `∫_a^b r^q dr` with a stable form near `q = -1`.
fn power_moment(a: f64, b: f64, q: f64) -> f64 {
    let m = q + 1.0;
    if b.is_infinite() {
        return if m < 0.0 { a.powf(m) / -m } else { f64::INFINITY };
    }
    if a == 0.0 {
        return if m > 0.0 { b.powf(m) / m } else { f64::INFINITY };
    }
    let l = (b / a).ln();
    if m == 0.0 {
        l
    } else {
        a.powf(m) * (m * l).exp_m1() / m
    }
}

/// Antiderivative of `r^k e^{-mu r}` that vanishes at infinity.
fn exp_antiderivative(r: f64, mu: f64, k: u32) -> f64 {
    if r.is_infinite() {
        return 0.0;
    }
    // -e^{-mu r} sum_{j=0}^{k} k!/j! r^j / mu^{k-j+1}
    let mut sum = 0.0;
    let mut factor = 1.0; // k!/j!
    for j in (0..=k).rev() {
        sum += factor * r.powi(j as i32) / mu.powi((k - j + 1) as i32);
        factor *= j as f64;
    }
    -(-mu * r).exp() * sum
}

fn log_moment_numeric(shape: &dyn Fn(f64) -> f64, a: f64, b: f64, reference: f64) -> f64 {
    let integrand = |r: f64| {
        let l = (r / reference).ln();
        let v = shape(r);
        if v == 0.0 {
            0.0
        } else {
            v * r * l * l
        }
    };
    if b.is_infinite() {
        quad::integrate_to_infinity(integrand, a, 1e-300, 1e-12)
    } else {
        quad::integrate(integrand, a, b, 1e-300, 1e-12)
    }
}

/// A validated radial potential.
///
/// Invariants: all strengths and densities are non-negative, shells lie
/// strictly outside the core with strictly increasing radii, and segments are
/// sorted, disjoint and start at or beyond the core radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    hard_core_radius: f64,
    shells: Vec<Shell>,
    segments: Vec<Segment>,
}

fn check_finite_nonneg(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and non-negative, got {v}"
        )));
    }
    Ok(())
}

impl RadialPotential {
    pub fn new(hard_core_radius: f64, mut shells: Vec<Shell>, mut segments: Vec<Segment>) -> Result<Self> {
        check_finite_nonneg("hard_core_radius", hard_core_radius)?;

        for s in &shells {
            check_finite_nonneg("shell radius", s.radius)?;
            check_finite_nonneg("shell strength", s.strength)?;
            if s.radius <= hard_core_radius {
                return Err(Error::ShellInsideCore {
                    radius: s.radius,
                    core: hard_core_radius,
                });
            }
        }
        shells.sort_by(|a, b| a.radius.total_cmp(&b.radius));
        if let Some(w) = shells.windows(2).find(|w| w[0].radius == w[1].radius) {
            return Err(Error::InvalidParameter(format!(
                "duplicate shell radius {}",
                w[0].radius
            )));
        }

        for seg in &segments {
            let (lo, hi) = (seg.r_lo, seg.r_hi);
            if seg.form.coefficient() < 0.0 {
                return Err(Error::NegativeDensity { r_lo: lo, r_hi: hi });
            }
            check_finite_nonneg("segment r_lo", lo)?;
            if hi.is_nan() || hi <= lo {
                return Err(Error::InvalidParameter(format!(
                    "segment needs r_lo < r_hi, got [{lo}, {hi})"
                )));
            }
            if lo < hard_core_radius {
                return Err(Error::SegmentInsideCore {
                    r_lo: lo,
                    core: hard_core_radius,
                });
            }
            match seg.form {
                Form::Constant { c } => {
                    check_finite_nonneg("c", c)?;
                    if hi.is_infinite() {
                        return Err(Error::InvalidParameter(
                            "constant segments must have finite r_hi".into(),
                        ));
                    }
                }
                Form::PowerTail { c, p } => {
                    check_finite_nonneg("c", c)?;
                    check_finite_nonneg("p", p)?;
                    if lo == 0.0 && p > 0.0 {
                        return Err(Error::InvalidParameter(
                            "power_tail segment is singular at the origin; r_lo must be positive"
                                .into(),
                        ));
                    }
                }
                Form::Exponential { c, mu } => {
                    check_finite_nonneg("c", c)?;
                    check_finite_nonneg("mu", mu)?;
                    if hi.is_infinite() && mu == 0.0 && c > 0.0 {
                        return Err(Error::InvalidParameter(
                            "exponential segment with mu = 0 must have finite r_hi".into(),
                        ));
                    }
                }
            }
        }
        segments.sort_by(|a, b| a.r_lo.total_cmp(&b.r_lo));
        if let Some(w) = segments.windows(2).find(|w| w[1].r_lo < w[0].r_hi) {
            return Err(Error::OverlappingSegments(w[1].r_lo));
        }

        Ok(Self {
            hard_core_radius,
            shells,
            segments,
        })
    }

    /// `V ≡ 0`.
    pub fn zero() -> Self {
        Self {
            hard_core_radius: 0.0,
            shells: Vec::new(),
            segments: Vec::new(),
        }
    }

    pub fn hard_core(radius: f64) -> Result<Self> {
        Self::new(radius, Vec::new(), Vec::new())
    }

    pub fn shell(radius: f64, strength: f64) -> Result<Self> {
        Self::new(0.0, vec![Shell { radius, strength }], Vec::new())
    }

    pub fn square_well(c: f64, radius: f64) -> Result<Self> {
        Self::new(0.0, Vec::new(), vec![Segment::new(0.0, radius, Form::Constant { c })])
    }

    pub fn power_tail(core: f64, c: f64, p: f64, r_lo: f64) -> Result<Self> {
        Self::new(
            core,
            Vec::new(),
            vec![Segment::new(r_lo, f64::INFINITY, Form::PowerTail { c, p })],
        )
    }

    pub fn hard_core_radius(&self) -> f64 {
        self.hard_core_radius
    }

    pub fn shells(&self) -> &[Shell] {
        &self.shells
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn has_core(&self) -> bool {
        self.hard_core_radius > 0.0
    }

    pub fn is_zero(&self) -> bool {
        !self.has_core()
            && self.shells.iter().all(|s| s.strength == 0.0)
            && self.segments.iter().all(Segment::is_zero)
    }

    /// Regular (density) part of `V` at radius `r`; excludes core and shells.
    #[inline]
    pub fn density(&self, r: f64) -> f64 {
        self.segments.iter().map(|s| s.value(r)).sum()
    }

    /// Whether some segment with non-zero density covers part of `[lo, hi]`.
    pub fn has_density_in(&self, lo: f64, hi: f64) -> bool {
        self.segments
            .iter()
            .any(|s| !s.is_zero() && s.r_lo < hi && s.r_hi > lo)
    }

    /// Smallest radius beyond which `V` vanishes, `None` for infinite range.
    pub fn range(&self) -> Option<f64> {
        let mut r = self.hard_core_radius;
        for s in self.shells.iter().filter(|s| s.strength > 0.0) {
            r = r.max(s.radius);
        }
        for seg in self.segments.iter().filter(|s| !s.is_zero()) {
            if seg.r_hi.is_infinite() {
                return None;
            }
            r = r.max(seg.r_hi);
        }
        Some(r)
    }

    /// A characteristic length: the largest finite feature of the potential,
    /// falling back to 1 for `V ≡ 0`.
    pub fn length_scale(&self) -> f64 {
        let mut r: f64 = self.hard_core_radius;
        for s in &self.shells {
            r = r.max(s.radius);
        }
        for seg in &self.segments {
            r = r.max(seg.r_lo);
            if seg.r_hi.is_finite() {
                r = r.max(seg.r_hi);
            }
            if let Form::Exponential { mu, .. } = seg.form {
                if mu > 0.0 {
                    r = r.max(seg.r_lo + 1.0 / mu);
                }
            }
        }
        if r > 0.0 {
            r
        } else {
            1.0
        }
    }

    /// The smallest positive feature length (core, shell or segment endpoint).
    pub fn smallest_feature(&self) -> Option<f64> {
        self.breakpoints().into_iter().find(|&r| r > 0.0)
    }

    /// Sorted, deduplicated radii where `V` changes form: core boundary,
    /// shells and finite segment endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        if self.has_core() {
            pts.push(self.hard_core_radius);
        }
        pts.extend(self.shells.iter().map(|s| s.radius));
        for seg in &self.segments {
            pts.push(seg.r_lo);
            if seg.r_hi.is_finite() {
                pts.push(seg.r_hi);
            }
        }
        pts.retain(|r| *r > 0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// The rescaled potential `s^{-2} V(x / s)`.
    pub fn scaled(&self, s: f64) -> Self {
        let form = |f: Form| match f {
            Form::Constant { c } => Form::Constant { c: c / (s * s) },
            Form::PowerTail { c, p } => Form::PowerTail {
                c: c * s.powf(p - 2.0),
                p,
            },
            Form::Exponential { c, mu } => Form::Exponential {
                c: c / (s * s),
                mu: mu / s,
            },
        };
        Self {
            hard_core_radius: s * self.hard_core_radius,
            shells: self
                .shells
                .iter()
                .map(|sh| Shell {
                    radius: s * sh.radius,
                    strength: sh.strength / s,
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|seg| Segment::new(s * seg.r_lo, s * seg.r_hi, form(seg.form)))
                .collect(),
        }
    }

    /// `V` restricted to `|x| ≤ radius`.
    pub fn truncated(&self, radius: f64) -> Self {
        Self {
            hard_core_radius: self.hard_core_radius.min(radius),
            shells: self
                .shells
                .iter()
                .copied()
                .filter(|s| s.radius <= radius)
                .collect(),
            segments: self
                .segments
                .iter()
                .filter(|s| s.r_lo < radius)
                .map(|s| Segment::new(s.r_lo, s.r_hi.min(radius), s.form))
                .collect(),
        }
    }

    /// `∫_lo^hi V(r) r^{d-1} dr` for the density part only.
    pub fn radial_density_moment(&self, lo: f64, hi: f64, d: Dimension) -> f64 {
        let k = d.value() - 1;
        self.segments.iter().map(|s| s.radial_moment(lo, hi, k)).sum()
    }
}

/// `∫_{|x|>b} V(x) dx` including shells (surface-weighted) strictly outside `b`.
/// Returns `+∞` when the tail diverges.
pub fn volume_integral(v: &RadialPotential, b: f64, d: Dimension) -> Result<f64> {
    if !(b >= v.hard_core_radius) {
        return Err(Error::InsideCore {
            b,
            core: v.hard_core_radius,
        });
    }
    let density = d.unit_sphere_area() * v.radial_density_moment(b, f64::INFINITY, d);
    let shells: f64 = v
        .shells
        .iter()
        .filter(|s| s.radius > b)
        .map(|s| d.sphere_area(s.radius) * s.strength)
        .sum();
    Ok(density + shells)
}

/// Planar moment `∫_{|x|>b} V(x) [ln(|x|/reference)]^2 dx`.
pub fn log_weighted_tail(v: &RadialPotential, b: f64, reference: f64) -> Result<f64> {
    if !(b >= v.hard_core_radius) {
        return Err(Error::InsideCore {
            b,
            core: v.hard_core_radius,
        });
    }
    if !(reference > 0.0) {
        return Err(Error::NonPositive(reference));
    }
    let density: f64 = v
        .segments
        .iter()
        .map(|s| s.log_moment(b, f64::INFINITY, reference))
        .sum::<f64>()
        * 2.0
        * PI;
    let shells: f64 = v
        .shells
        .iter()
        .filter(|s| s.radius > b)
        .map(|s| {
            let l = (s.radius / reference).ln();
            2.0 * PI * s.radius * s.strength * l * l
        })
        .sum();
    Ok(density + shells)
}
