//! TOML potential spec files.
//!
//! ```toml
//! dimension = 3
//! hard_core_radius = 0.5
//!
//! [[shells]]
//! radius = 1.0
//! strength = 2.0
//!
//! [[segments]]
//! r_lo = 1.0
//! r_hi = "inf"
//! form = "power_tail"
//! params = { c = 1.0, p = 4.0 }
//! ```

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Dimension, Form, RadialPotential, Segment, Shell};
use crate::error::{Error, Result};

/// Upper end of a segment: a number, or `"inf"` for an infinite tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperLimit(pub f64);

impl Serialize for UpperLimit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() && self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for UpperLimit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = UpperLimit;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<UpperLimit, E> {
                Ok(UpperLimit(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<UpperLimit, E> {
                Ok(UpperLimit(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<UpperLimit, E> {
                Ok(UpperLimit(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<UpperLimit, E> {
                match v.trim().to_ascii_lowercase().as_str() {
                    "inf" | "+inf" | "infinity" => Ok(UpperLimit(f64::INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellSpec {
    pub radius: f64,
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub r_lo: f64,
    pub r_hi: UpperLimit,
    #[serde(flatten)]
    pub form: Form,
}

/// On-disk description of a potential together with its dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub dimension: Dimension,
    #[serde(default)]
    pub hard_core_radius: f64,
    #[serde(default)]
    pub shells: Vec<ShellSpec>,
    #[serde(default)]
    pub segments: Vec<SegmentSpec>,
}

impl PotentialSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("potential spec is always serializable")
    }

    /// Checks every invariant and builds the potential.
    pub fn validate(&self) -> Result<(RadialPotential, Dimension)> {
        let shells = self
            .shells
            .iter()
            .map(|s| Shell {
                radius: s.radius,
                strength: s.strength,
            })
            .collect();
        let segments = self
            .segments
            .iter()
            .map(|s| Segment::new(s.r_lo, s.r_hi.0, s.form))
            .collect();
        let v = RadialPotential::new(self.hard_core_radius, shells, segments)?;
        Ok((v, self.dimension))
    }

    pub fn from_potential(v: &RadialPotential, d: Dimension) -> Self {
        Self {
            dimension: d,
            hard_core_radius: v.hard_core_radius(),
            shells: v
                .shells()
                .iter()
                .map(|s| ShellSpec {
                    radius: s.radius,
                    strength: s.strength,
                })
                .collect(),
            segments: v
                .segments()
                .iter()
                .map(|s| SegmentSpec {
                    r_lo: s.r_lo,
                    r_hi: UpperLimit(s.r_hi),
                    form: s.form,
                })
                .collect(),
        }
    }
}

/// Parses and validates a TOML potential spec.
pub fn parse(text: &str) -> Result<(RadialPotential, Dimension)> {
    PotentialSpec::from_toml_str(text)?.validate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_all_forms() {
        let text = r#"
dimension = 3
hard_core_radius = 0.5

[[shells]]
radius = 1
strength = 2.0

[[segments]]
r_lo = 0.5
r_hi = 1.0
form = "constant"
params = { c = 3 }

[[segments]]
r_lo = 1.0
r_hi = 2.0
form = "exponential"
params = { c = 1.0, mu = 0.5 }

[[segments]]
r_lo = 2.0
r_hi = "inf"
form = "power_tail"
params = { c = 1.0, p = 4.0 }
"#;
        let (v, d) = parse(text).unwrap();
        assert_eq!(d, Dimension::Three);
        assert_eq!(v.hard_core_radius(), 0.5);
        assert_eq!(v.shells().len(), 1);
        assert_eq!(v.segments().len(), 3);
        assert!(v.segments()[2].r_hi.is_infinite());
        assert_eq!(v.segments()[0].form, Form::Constant { c: 3.0 });
    }

    #[test]
    fn hard_sphere_only() {
        let (v, _) = parse("dimension = 3\nhard_core_radius = 1.0\n").unwrap();
        assert_eq!(v, RadialPotential::hard_core(1.0).unwrap());
    }

    #[test]
    fn rejects_bad_dimension_and_negative_density() {
        assert!(parse("dimension = 4\n").is_err());
        let text = r#"
dimension = 3
[[segments]]
r_lo = 0.0
r_hi = 1.0
form = "constant"
params = { c = -1.0 }
"#;
        let err = parse(text).unwrap_err();
        assert!(err.to_string().contains("negative density"), "{err}");
    }

    #[test]
    fn rejects_shell_inside_core() {
        let text = "dimension = 3\nhard_core_radius = 1.0\n[[shells]]\nradius = 0.5\nstrength = 1.0\n";
        assert!(matches!(parse(text), Err(Error::ShellInsideCore { .. })));
    }

    fn arb_potential() -> impl Strategy<Value = (RadialPotential, Dimension)> {
        (
            0.0f64..2.0,
            prop::collection::vec((0.0f64..5.0, 0.0f64..10.0), 0..3),
            prop::collection::vec((0.0f64..3.0, 0.01f64..2.0, 0u8..3, 0.0f64..5.0, 2.1f64..6.0), 0..4),
            any::<bool>(),
        )
            .prop_filter_map("valid potential", |(core, shells, segs, two)| {
                let shells = shells
                    .into_iter()
                    .map(|(dr, g)| Shell {
                        radius: core + 0.01 + dr,
                        strength: g,
                    })
                    .collect();
                let mut lo = core;
                let mut segments = Vec::new();
                let n = segs.len();
                for (i, (gap, len, kind, c, p)) in segs.into_iter().enumerate() {
                    let r_lo = lo + gap;
                    let last = i + 1 == n;
                    let form = match kind {
                        0 => Form::Constant { c },
                        1 => Form::PowerTail { c, p },
                        _ => Form::Exponential { c, mu: p },
                    };
                    let r_hi = if last && kind != 0 { f64::INFINITY } else { r_lo + len };
                    if r_lo == 0.0 && kind == 1 {
                        return None;
                    }
                    segments.push(Segment::new(r_lo, r_hi, form));
                    lo = r_hi;
                }
                let v = RadialPotential::new(core, shells, segments).ok()?;
                Some((v, if two { Dimension::Two } else { Dimension::Three }))
            })
    }

    proptest! {
        #[test]
        fn toml_round_trip_is_bit_exact((v, d) in arb_potential()) {
            let text = PotentialSpec::from_potential(&v, d).to_toml_string();
            let (back, dim) = parse(&text).unwrap();
            prop_assert_eq!(dim, d);
            prop_assert_eq!(back, v);
        }
    }
}
