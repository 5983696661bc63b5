//! Benchmark fixtures shared by the criterion targets.

use scatlen::{Form, RadialPotential, Segment, Shell};

/// A potential exercising every feature: hard core, shell, flat and
/// exponential segments.
pub fn mixed() -> RadialPotential {
    RadialPotential::new(
        0.2,
        vec![Shell { radius: 1.0, strength: 3.0 }],
        vec![
            Segment::new(0.2, 0.5, Form::Constant { c: 4.0 }),
            Segment::new(0.5, f64::INFINITY, Form::Exponential { c: 5.0, mu: 2.0 }),
        ],
    )
    .expect("valid potential")
}
