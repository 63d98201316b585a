//! Exponents in `[1, ∞]` with infinity as a distinct tag.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedExponent {
    Finite(f64),
    Infinity,
}

pub use ExtendedExponent::{Finite, Infinity};

impl ExtendedExponent {
    /// Finite exponent; rejects values below 1 and non-finite input.
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Finite(p))
        } else {
            Err(Error::Invalid(format!("exponent {p} outside [1, inf)")))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Infinity)
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Finite(p) => Some(p),
            Infinity => None,
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Finite(p) => 1.0 / p,
            Infinity => 0.0,
        }
    }

    /// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Self {
        match self {
            Infinity => Finite(1.0),
            Finite(1.0) => Infinity,
            Finite(p) => Finite(p / (p - 1.0)),
        }
    }

    /// Build from `1/p`; reciprocals at or below zero map to infinity.
    pub fn from_reciprocal(s: f64) -> Result<Self> {
        if s <= 0.0 {
            Ok(Infinity)
        } else {
            Self::finite(1.0 / s)
        }
    }
}

impl fmt::Display for ExtendedExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(p) => write!(f, "{p}"),
            Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtendedExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "inf" | "infinity" | "∞" => Ok(Infinity),
            _ => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::Invalid(format!("cannot parse exponent '{s}'")))?;
                if v.is_infinite() && v > 0.0 {
                    Ok(Infinity)
                } else {
                    Self::finite(v)
                }
            }
        }
    }
}

impl Serialize for ExtendedExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Finite(p) => s.serialize_f64(*p),
            Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => ExtendedExponent::finite(v).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The pair `(p, q)` indexing `RM(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: ExtendedExponent,
    pub q: ExtendedExponent,
}

impl ExponentPair {
    pub fn new(p: ExtendedExponent, q: ExtendedExponent) -> Self {
        Self { p, q }
    }

    /// Both exponents finite.
    pub fn finite(p: f64, q: f64) -> Result<Self> {
        Ok(Self::new(ExtendedExponent::finite(p)?, ExtendedExponent::finite(q)?))
    }

    /// `1/p + 1/q`.
    pub fn reciprocal_sum(&self) -> f64 {
        self.p.reciprocal() + self.q.reciprocal()
    }

    /// The pair of conjugate exponents `(p', q')`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.p.conjugate(), self.q.conjugate())
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(Finite(1.0).conjugate(), Infinity);
        assert_eq!(Infinity.conjugate(), Finite(1.0));
        let c = Finite(4.0).conjugate().value().unwrap();
        assert!((0.25 + 1.0 / c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_small_exponents() {
        assert!(ExtendedExponent::finite(0.5).is_err());
        assert!(ExtendedExponent::finite(f64::NAN).is_err());
        assert!("0.9".parse::<ExtendedExponent>().is_err());
    }

    #[test]
    fn parse_and_serde() {
        assert_eq!("inf".parse::<ExtendedExponent>().unwrap(), Infinity);
        assert_eq!("2".parse::<ExtendedExponent>().unwrap(), Finite(2.0));
        let pq = ExponentPair::new(Finite(2.0), Infinity);
        let s = serde_json::to_string(&pq).unwrap();
        assert_eq!(s, r#"{"p":2.0,"q":"inf"}"#);
        let back: ExponentPair = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pq);
        assert_eq!(pq.reciprocal_sum(), 0.5);
    }
}
