//! The order type `ℕ + ℚ×ℤ` of a countable nonstandard model of arithmetic.
//!
//! Standard elements come first in their usual order; nonstandard elements
//! are copies of `ℤ` indexed by rationals, compared by the rational and then
//! by the integer.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum KElem {
    Std(BigUint),
    /// `(q, a)`: position `a` in the copy of `ℤ` labelled `q`.
    NonStd(BigRational, BigInt),
}

impl KElem {
    pub fn std(n: u64) -> Self {
        KElem::Std(n.into())
    }

    pub fn nonstd(num: i64, den: i64, a: i64) -> Self {
        KElem::NonStd(BigRational::new(num.into(), den.into()), a.into())
    }

    pub fn is_standard(&self) -> bool {
        matches!(self, KElem::Std(_))
    }
}

impl Ord for KElem {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (KElem::Std(m), KElem::Std(n)) => m.cmp(n),
            (KElem::Std(_), KElem::NonStd(..)) => Ordering::Less,
            (KElem::NonStd(..), KElem::Std(_)) => Ordering::Greater,
            (KElem::NonStd(q, a), KElem::NonStd(r, b)) => q.cmp(r).then_with(|| a.cmp(b)),
        }
    }
}

impl PartialOrd for KElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn k_less(u: &KElem, v: &KElem) -> bool {
    u < v
}

pub fn k_successor(u: &KElem) -> KElem {
    match u {
        KElem::Std(n) => KElem::Std(n + 1u32),
        KElem::NonStd(q, a) => KElem::NonStd(q.clone(), a + 1),
    }
}

/// `None` only for `Std(0)`.
pub fn k_predecessor(u: &KElem) -> Option<KElem> {
    match u {
        KElem::Std(n) if n.is_zero() => None,
        KElem::Std(n) => Some(KElem::Std(n - 1u32)),
        KElem::NonStd(q, a) => Some(KElem::NonStd(q.clone(), a - 1)),
    }
}

/// A nonstandard element strictly between two nonstandard elements in
/// different copies of `ℤ`; none exists inside a single copy.
pub fn k_between(u: &KElem, v: &KElem) -> Option<KElem> {
    match (u, v) {
        (KElem::NonStd(q, _), KElem::NonStd(r, _)) if q < r => {
            let mid = (q + r) / BigRational::from_integer(2.into());
            Some(KElem::NonStd(mid, BigInt::zero()))
        }
        _ => None,
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KElem::Std(n) => write!(f, "{n}"),
            KElem::NonStd(q, a) if q.denom().is_one() => write!(f, "({}, {a})", q.numer()),
            KElem::NonStd(q, a) => write!(f, "({}/{}, {a})", q.numer(), q.denom()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot read `{text}` as an element: {reason}")]
pub struct KParseError {
    pub text: String,
    pub reason: &'static str,
}

impl FromStr for KElem {
    type Err = KParseError;

    /// `n` for a standard element, `(p/q, a)` or `(p, a)` otherwise.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| KParseError { text: s.to_string(), reason };
        let t = s.trim();
        if let Some(inner) = t.strip_prefix('(') {
            let inner = inner.strip_suffix(')').ok_or_else(|| err("missing `)`"))?;
            let (q, a) = inner.split_once(',').ok_or_else(|| err("expected `(p/q, a)`"))?;
            let (p, d) = match q.split_once('/') {
                Some((p, d)) => (p.trim(), d.trim()),
                None => (q.trim(), "1"),
            };
            let p: BigInt = p.parse().map_err(|_| err("bad numerator"))?;
            let d: BigInt = d.parse().map_err(|_| err("bad denominator"))?;
            if d.is_zero() {
                return Err(err("zero denominator"));
            }
            let a: BigInt = a.trim().parse().map_err(|_| err("bad integer part"))?;
            Ok(KElem::NonStd(BigRational::new(p, d), a))
        } else {
            t.parse::<BigUint>().map(KElem::Std).map_err(|_| err("expected a natural number"))
        }
    }
}

impl Serialize for KElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for KElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
