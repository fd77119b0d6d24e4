//! Integrability exponents and Besov indices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent in `[1, ∞]`; `∞` serializes as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// Exponent with the given reciprocal `1/p ∈ [0, 1]`.
    pub fn from_reciprocal(r: f64) -> Result<Self> {
        if r == 0.0 {
            Ok(Self::INFINITY)
        } else {
            Self::new(1.0 / r)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// `ℓ^p` norm of a finite sequence of nonnegative values.
    pub fn sequence_norm(self, values: impl IntoIterator<Item = f64>) -> f64 {
        if self.is_infinite() {
            values.into_iter().fold(0.0, f64::max)
        } else if self.0 == 1.0 {
            values.into_iter().sum()
        } else {
            let p = self.0;
            values.into_iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Self::INFINITY),
            other => {
                let p: f64 = other.parse().map_err(|_| Error::InvalidIndex(format!("bad exponent '{other}'")))?;
                Self::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Time exponent of a Chemin-Lerner norm. `SupBar` is the supremum-norm variant
/// `∞̄`; on a finite node set it coincides with `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeExponent {
    Lebesgue(Exponent),
    SupBar,
}

impl TimeExponent {
    pub fn finite(alpha: f64) -> Result<Self> {
        Ok(Self::Lebesgue(Exponent::new(alpha)?))
    }

    pub const INFINITY: TimeExponent = TimeExponent::Lebesgue(Exponent::INFINITY);

    /// `1/α`, zero for both infinite variants.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Lebesgue(e) => e.reciprocal(),
            Self::SupBar => 0.0,
        }
    }

    pub fn is_max(self) -> bool {
        self.reciprocal() == 0.0
    }
}

impl fmt::Display for TimeExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lebesgue(e) => e.fmt(f),
            Self::SupBar => f.write_str("inf_bar"),
        }
    }
}

impl Serialize for TimeExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Lebesgue(e) => e.serialize(serializer),
            Self::SupBar => serializer.serialize_str("inf_bar"),
        }
    }
}

impl<'de> Deserialize<'de> for TimeExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) if s == "inf_bar" => Ok(Self::SupBar),
            Raw::Text(s) => s.parse().map(Self::Lebesgue).map_err(serde::de::Error::custom),
            Raw::Num(p) => Exponent::new(p).map(Self::Lebesgue).map_err(serde::de::Error::custom),
        }
    }
}

/// Regularity `s`, spatial exponent `p`, shell summability `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: Exponent,
    pub q: Exponent,
}

impl BesovIndex {
    pub fn new(s: f64, p: Exponent, q: Exponent) -> Self {
        Self { s, p, q }
    }

    /// `(s, ∞, ∞)`.
    pub fn sup(s: f64) -> Self {
        Self::new(s, Exponent::INFINITY, Exponent::INFINITY)
    }
}
