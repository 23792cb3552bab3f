//! Extended time values `{-inf} ∪ [0, +inf)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A value of the time separation `ℓ`.
///
/// `NegInf` sorts below every finite value. Finite values are never negative
/// and never infinite.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum ExtendedTime {
    NegInf,
    Finite(f64),
}

pub use ExtendedTime::{Finite, NegInf};

impl ExtendedTime {
    pub const ZERO: ExtendedTime = ExtendedTime::Finite(0.0);

    /// Checked constructor for finite values.
    pub fn finite(v: f64) -> Result<Self> {
        if v.is_finite() && v >= 0.0 {
            Ok(Finite(v))
        } else {
            Err(Error::InvalidValue(format!("time value {v} outside [0, inf)")))
        }
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, NegInf)
    }

    /// `x ≤ y` reading: `ℓ ≥ 0`.
    pub fn is_causal(self) -> bool {
        matches!(self, Finite(_))
    }

    /// `x ≪ y` reading: `ℓ > 0`.
    pub fn is_timelike(self) -> bool {
        matches!(self, Finite(v) if v > 0.0)
    }

    /// Time separation `τ = max(0, ℓ)`.
    pub fn tau(self) -> f64 {
        match self {
            NegInf => 0.0,
            Finite(v) => v,
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            NegInf => None,
            Finite(v) => Some(v),
        }
    }

    /// Multiply by a positive scale; `-inf` is fixed.
    pub fn scale(self, lambda: f64) -> Self {
        match self {
            NegInf => NegInf,
            Finite(v) => Finite(v * lambda),
        }
    }

    /// `|a - b|` with `-inf - -inf = 0` and `|-inf - finite| = +inf`.
    pub fn gap(self, other: Self) -> f64 {
        match (self, other) {
            (NegInf, NegInf) => 0.0,
            (Finite(a), Finite(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        }
    }

    /// Equality up to an absolute tolerance on finite values.
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        self.gap(other) <= tol
    }

    /// `self ≤ other + tol`.
    pub fn le_tol(self, other: Self, tol: f64) -> bool {
        match (self, other) {
            (NegInf, _) => true,
            (Finite(_), NegInf) => false,
            (Finite(a), Finite(b)) => a <= b + tol,
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NegInf, NegInf) => Ordering::Equal,
            (NegInf, Finite(_)) => Ordering::Less,
            (Finite(_), NegInf) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.total_cmp(b),
        }
    }
}

impl Add for ExtendedTime {
    type Output = ExtendedTime;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => NegInf,
        }
    }
}

impl fmt::Display for ExtendedTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ExtendedTime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NegInf => s.serialize_str("-inf"),
            Finite(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedTime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ExtendedTime;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative number or the string \"-inf\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtendedTime, E> {
                if v == "-inf" {
                    Ok(NegInf)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtendedTime, E> {
                ExtendedTime::finite(v).map_err(|_| E::invalid_value(de::Unexpected::Float(v), &self))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtendedTime, E> {
                Ok(Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtendedTime, E> {
                if v >= 0 {
                    Ok(Finite(v as f64))
                } else {
                    Err(E::invalid_value(de::Unexpected::Signed(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}
