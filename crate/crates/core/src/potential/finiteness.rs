use std::f64::consts::PI;

use serde::Serialize;

use super::{log_weighted_tail, volume_integral, Dimension, RadialPotential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Finite,
    Infinite,
    Undetermined,
}

/// Outcome of the tail-moment finiteness test together with the upper bounds
/// on the scattering length that a finite moment implies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinitenessReport {
    pub verdict: Verdict,
    /// `min_b [ b + (8π)^{-1} ∫_{|x|>b} V ]` (three dimensions).
    pub a_upper_3d: Option<f64>,
    /// `min_b b exp( (4π)^{-1} ∫_{|x|>b} V [ln(|x|/b)]^2 )` (two dimensions).
    pub a_upper_2d: Option<f64>,
    /// The `b` attaining the reported bound.
    pub best_b: Option<f64>,
    pub diverging_moment: Option<String>,
}

const GOLDEN_ITERS: usize = 90;

/// Golden-section minimisation of `f` on `[lo, hi]`; returns `(x, f(x))`.
fn golden_min<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimises `f` over `[lo, hi]`: endpoints and breakpoints are evaluated
/// exactly and each piece in between is searched by golden section, in the
/// variable `ln b` when `log_scale` is set.
fn piecewise_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64], log_scale: bool) -> (f64, f64) {
    let mut nodes = vec![lo];
    nodes.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    nodes.push(hi);
    let mut best = (lo, f(lo));
    let mut consider = |x: f64, v: f64| {
        if v < best.1 || best.1.is_nan() {
            best = (x, v);
        }
    };
    for w in nodes.windows(2) {
        let (p, q) = (w[0], w[1]);
        consider(q, f(q));
        if log_scale {
            let g = |t: f64| f(t.exp());
            let (t, v) = golden_min(&g, p.ln(), q.ln());
            consider(t.exp(), v);
        } else {
            let (x, v) = golden_min(&f, p, q);
            consider(x, v);
        }
    }
    best
}

/// Decides whether the scattering length is finite via the tail-moment
/// criterion and, when it is, reports the minimised upper bound on `a`.
pub fn finiteness_check(v: &RadialPotential, d: Dimension) -> FinitenessReport {
    let scale = v.length_scale();
    let b_max = (10.0 * scale).max(10.0);
    let core = v.hard_core_radius();
    let breaks = v.breakpoints();

    match d {
        Dimension::Three => {
            let moment = |b: f64| volume_integral(v, b, d).unwrap_or(f64::NAN);
            let probe = moment(b_max);
            if probe.is_nan() {
                return undetermined();
            }
            if probe.is_infinite() {
                return FinitenessReport {
                    verdict: Verdict::Infinite,
                    a_upper_3d: None,
                    a_upper_2d: None,
                    best_b: None,
                    diverging_moment: Some("∫_{|x|>b} V(x) dx".into()),
                };
            }
            let bound = |b: f64| b + moment(b) / (8.0 * PI);
            let (b, a_upper) = piecewise_min(bound, core, b_max, &breaks, false);
            FinitenessReport {
                verdict: Verdict::Finite,
                a_upper_3d: Some(a_upper),
                a_upper_2d: None,
                best_b: Some(b),
                diverging_moment: None,
            }
        }
        Dimension::Two => {
            let moment = |b: f64| log_weighted_tail(v, b, b).unwrap_or(f64::NAN);
            let probe = moment(b_max);
            if probe.is_nan() {
                return undetermined();
            }
            if probe.is_infinite() {
                return FinitenessReport {
                    verdict: Verdict::Infinite,
                    a_upper_3d: None,
                    a_upper_2d: None,
                    best_b: None,
                    diverging_moment: Some("∫_{|x|>b} V(x) [ln(|x|/b)]^2 dx".into()),
                };
            }
            let b_lo = if core > 0.0 {
                core
            } else {
                v.smallest_feature().unwrap_or(scale).min(scale) * 1e-6
            };
            let bound = |b: f64| b * (moment(b) / (4.0 * PI)).exp();
            let (b, a_upper) = piecewise_min(bound, b_lo, b_max, &breaks, true);
            FinitenessReport {
                verdict: Verdict::Finite,
                a_upper_3d: None,
                a_upper_2d: Some(a_upper),
                best_b: Some(b),
                diverging_moment: None,
            }
        }
    }
}

fn undetermined() -> FinitenessReport {
    FinitenessReport {
        verdict: Verdict::Undetermined,
        a_upper_3d: None,
        a_upper_2d: None,
        best_b: None,
        diverging_moment: None,
    }
}
