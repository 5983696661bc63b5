//! Graded radial meshes.
//!
//! Node density is `1/(fine + δ(r)) + 1/coarse`, where `δ` is the distance to
//! the nearest refined knot, so spacing grows geometrically away from hard
//! cores and shells and saturates at `coarse`. Nodes are placed at equal steps
//! of the integrated density, which makes successive refinement levels nested
//! and smoothly graded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resolution controls: roughly `points` nodes at level 0, doubled per level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshParams {
    pub points: usize,
    pub level: u32,
}

impl Default for MeshParams {
    fn default() -> Self {
        Self {
            points: 2000,
            level: 0,
        }
    }
}

impl MeshParams {
    pub fn with_points(points: usize) -> Self {
        Self { points, level: 0 }
    }

    /// The same mesh with every element halved.
    pub fn refined(self) -> Self {
        Self {
            level: self.level + 1,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    focus_lo: bool,
    focus_hi: bool,
}

/// Layout of a graded mesh on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct MeshSpec {
    pieces: Vec<Piece>,
    fine: f64,
    coarse: f64,
}

impl MeshSpec {
    /// `knots` are interior radii that must become nodes; `focus(r)` says
    /// whether the mesh should be refined towards a knot (or an endpoint).
    pub fn new(lo: f64, hi: f64, knots: &[f64], focus: impl Fn(f64) -> bool, fine: f64, coarse: f64) -> Result<Self> {
        if !(lo < hi) || !hi.is_finite() || !(fine > 0.0) || !(coarse > 0.0) {
            return Err(Error::BadGrid(format!(
                "need lo < hi finite and positive scales, got [{lo}, {hi}], fine {fine}, coarse {coarse}"
            )));
        }
        let mut pts = vec![lo];
        pts.extend(knots.iter().copied().filter(|&k| k > lo && k < hi));
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let pieces = pts
            .windows(2)
            .map(|w| Piece {
                lo: w[0],
                hi: w[1],
                focus_lo: focus(w[0]),
                focus_hi: w[1] < hi && focus(w[1]),
            })
            .collect();
        Ok(Self {
            pieces,
            fine,
            coarse,
        })
    }

    fn coarse_for(&self, p: &Piece) -> f64 {
        if self.coarse.is_finite() || p.focus_lo || p.focus_hi {
            self.coarse
        } else {
            p.hi - p.lo
        }
    }

    /// Integrated density from `p.lo` to `r`.
    fn xi(&self, p: &Piece, r: f64) -> f64 {
        let l0 = self.fine;
        let linear = if self.coarse_for(p).is_finite() {
            (r - p.lo) / self.coarse_for(p)
        } else {
            0.0
        };
        let from_lo = |r: f64| ((l0 + r - p.lo) / l0).ln();
        let to_hi = |a: f64, r: f64| ((l0 + p.hi - a) / (l0 + p.hi - r)).ln();
        let log = match (p.focus_lo, p.focus_hi) {
            (false, false) => 0.0,
            (true, false) => from_lo(r),
            (false, true) => to_hi(p.lo, r),
            (true, true) => {
                let m = 0.5 * (p.lo + p.hi);
                if r <= m {
                    from_lo(r)
                } else {
                    from_lo(m) + to_hi(m, r)
                }
            }
        };
        log + linear
    }

    fn invert(&self, p: &Piece, target: f64) -> f64 {
        let (mut a, mut b) = (p.lo, p.hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.xi(p, m) < target {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    pub fn build(&self, params: MeshParams) -> Vec<f64> {
        let total: f64 = self.pieces.iter().map(|p| self.xi(p, p.hi)).sum();
        let step = total / params.points.max(2) as f64;
        let mut nodes = vec![self.pieces[0].lo];
        for p in &self.pieces {
            let span = self.xi(p, p.hi);
            let n = ((span / step).ceil() as usize).max(1) << params.level;
            for k in 1..n {
                nodes.push(self.invert(p, span * k as f64 / n as f64));
            }
            nodes.push(p.hi);
        }
        nodes
    }
}

/// Checks that `nodes` is strictly increasing and finite.
pub fn check_grid(nodes: &[f64]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::BadGrid("need at least two nodes".into()));
    }
    if nodes.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::BadGrid("nodes must be finite and non-negative".into()));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadGrid("nodes must be strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knots_are_nodes_and_grid_is_increasing() {
        let spec = MeshSpec::new(1.0, 20.0, &[2.0, 5.0], |r| r <= 2.0, 0.01, 0.5).unwrap();
        let nodes = spec.build(MeshParams::with_points(400));
        check_grid(&nodes).unwrap();
        for k in [1.0, 2.0, 5.0, 20.0] {
            assert!(nodes.contains(&k));
        }
        // refined towards the focused knots
        let first = nodes[1] - nodes[0];
        let last = nodes[nodes.len() - 1] - nodes[nodes.len() - 2];
        assert!(first < 0.05 * last);
    }

    #[test]
    fn refinement_is_nested() {
        let spec = MeshSpec::new(0.0, 10.0, &[1.0], |_| true, 0.02, 0.3).unwrap();
        let coarse = spec.build(MeshParams::with_points(200));
        let fine = spec.build(MeshParams::with_points(200).refined());
        assert_eq!(fine.len(), 2 * coarse.len() - 1);
        for (i, r) in coarse.iter().enumerate() {
            assert!((fine[2 * i] - r).abs() <= 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn unfocused_infinite_coarse_is_uniform() {
        let spec = MeshSpec::new(0.0, 4.0, &[], |_| false, 0.1, f64::INFINITY).unwrap();
        let nodes = spec.build(MeshParams::with_points(8));
        for w in nodes.windows(2) {
            assert!((w[1] - w[0] - 0.5).abs() < 1e-12);
        }
    }
}
