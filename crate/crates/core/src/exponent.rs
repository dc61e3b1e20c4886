//! The exponent `p ∈ [1, ∞]` of a symplectic p-product.
//!
//! The endpoints are kept as explicit variants rather than large floats:
//! `p = ∞` (Cartesian product) and `p = 1` (free sum) have exact max/sum
//! branches everywhere in the crate, so no `x^p` is ever evaluated at an
//! endpoint.

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Exponent of a p-norm style combination: a finite real or `∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    /// Exponent for a body-level p-product; requires `p ≥ 1`.
    pub fn new_product(p: f64) -> Option<Self> {
        if p.is_finite() && p >= 1.0 {
            Some(PExponent::Finite(p))
        } else if p.is_infinite() && p > 0.0 {
            Some(PExponent::Infinity)
        } else {
            None
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, PExponent::Infinity)
    }

    /// Finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            PExponent::Finite(p) => Some(p),
            PExponent::Infinity => None,
        }
    }

    /// Hölder conjugate `q` with `1/p + 1/q = 1`; `1 ↔ ∞`.
    pub fn conjugate(self) -> Self {
        match self {
            PExponent::Infinity => PExponent::Finite(1.0),
            PExponent::Finite(p) => {
                if p == 1.0 {
                    PExponent::Infinity
                } else {
                    PExponent::Finite(p / (p - 1.0))
                }
            }
        }
    }

    /// Halved exponent `p/2`, used when a body-level product descends to
    /// the moment-map profile level.
    pub fn halved(self) -> Self {
        match self {
            PExponent::Infinity => PExponent::Infinity,
            PExponent::Finite(p) => PExponent::Finite(p / 2.0),
        }
    }

    /// `(Σ x_i^p)^{1/p}` with the max branch at `p = ∞`.
    ///
    /// Inputs must be nonnegative; `p = 1` degenerates to a plain sum.
    pub fn combine(self, values: &[f64]) -> f64 {
        debug_assert!(values.iter().all(|v| *v >= 0.0));
        match self {
            PExponent::Infinity => values.iter().fold(0.0_f64, |a, &b| a.max(b)),
            PExponent::Finite(p) => {
                if p == 1.0 {
                    values.iter().sum()
                } else {
                    power_sum(values, p)
                }
            }
        }
    }
}

/// `(Σ x_i^e)^{1/e}` for a nonzero finite exponent of either sign, with
/// the dominant term factored out so extreme exponents cannot overflow.
/// Inputs are nonnegative; for `e < 0` a zero input dominates the
/// combination to 0 (its limiting value).
pub fn power_sum(values: &[f64], e: f64) -> f64 {
    debug_assert!(e != 0.0 && e.is_finite());
    if e > 0.0 {
        let m = values.iter().fold(0.0_f64, |a, &b| a.max(b));
        if m == 0.0 {
            return 0.0;
        }
        let s: f64 = values.iter().map(|v| (v / m).powf(e)).sum();
        m * s.powf(1.0 / e)
    } else {
        if values.contains(&0.0) {
            return 0.0;
        }
        let m = values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let s: f64 = values.iter().map(|v| (v / m).powf(e)).sum();
        m * s.powf(1.0 / e)
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => write!(f, "inf"),
        }
    }
}

// Wire format: a JSON number, or the string "inf".
impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(p) => serializer.serialize_f64(*p),
            PExponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = PExponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a number p >= 1 or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<PExponent, E> {
                PExponent::new_product(v)
                    .ok_or_else(|| E::custom(format!("p must satisfy p >= 1, got {v}")))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<PExponent, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<PExponent, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<PExponent, E> {
                if v == "inf" {
                    Ok(PExponent::Infinity)
                } else {
                    Err(E::custom(format!("expected \"inf\", got {v:?}")))
                }
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(PExponent::Finite(1.0).conjugate(), PExponent::Infinity);
        assert_eq!(PExponent::Infinity.conjugate(), PExponent::Finite(1.0));
        assert_eq!(PExponent::Finite(2.0).conjugate(), PExponent::Finite(2.0));
        let q = PExponent::Finite(1.5).conjugate().finite().unwrap();
        assert!((q - 3.0).abs() < 1e-15);
    }

    #[test]
    fn combine_branches() {
        assert_eq!(PExponent::Infinity.combine(&[0.5, 0.9]), 0.9);
        assert!((PExponent::Finite(1.0).combine(&[0.3, 0.3]) - 0.6).abs() < 1e-15);
        let v = 1.0 / 2.0_f64.sqrt();
        assert!((PExponent::Finite(2.0).combine(&[v, v]) - 1.0).abs() < 1e-12);
        assert_eq!(PExponent::Finite(7.0).combine(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn power_sum_survives_extreme_exponents() {
        // Huge positive exponent → max; huge negative → min.
        assert!((power_sum(&[0.73, 0.9], 2e9) - 0.9).abs() < 1e-9);
        assert!((power_sum(&[0.73, 0.9], -2e9) - 0.73).abs() < 1e-9);
        // Equal values at a large negative exponent stay put.
        assert!((power_sum(&[0.73, 0.73], -2e9) - 0.73).abs() < 1e-9);
        assert_eq!(power_sum(&[0.0, 1.0], -3.0), 0.0);
        assert!((power_sum(&[3.0, 4.0], 2.0) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(PExponent::new_product(0.5).is_none());
        assert!(PExponent::new_product(f64::NAN).is_none());
        assert!(PExponent::new_product(f64::NEG_INFINITY).is_none());
    }

    #[test]
    fn json_roundtrip() {
        let p: PExponent = serde_json::from_str("2.5").unwrap();
        assert_eq!(p, PExponent::Finite(2.5));
        let p: PExponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(p, PExponent::Infinity);
        assert!(serde_json::from_str::<PExponent>("0.3").is_err());
        assert_eq!(serde_json::to_string(&PExponent::Infinity).unwrap(), "\"inf\"");
    }
}
