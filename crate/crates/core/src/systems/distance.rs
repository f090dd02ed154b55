use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

/// A distance value computed without rounding.
///
/// Finite systems carry rational metrics; subshift distances are powers of
/// two. Values of different representations still compare correctly.
#[derive(Clone, Copy)]
pub enum ExactDistance {
    Zero,
    /// `2^-e`
    Dyadic(u32),
    /// A positive rational.
    Rational(Ratio<u64>),
}

impl ExactDistance {
    pub fn from_ratio(r: Ratio<u64>) -> Self {
        if *r.numer() == 0 {
            ExactDistance::Zero
        } else {
            ExactDistance::Rational(r)
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactDistance::Zero)
    }

    /// Divides by `2^k`.
    pub fn div_pow2(self, k: u32) -> Self {
        match self {
            ExactDistance::Zero => ExactDistance::Zero,
            ExactDistance::Dyadic(e) => ExactDistance::Dyadic(e + k),
            ExactDistance::Rational(r) => ExactDistance::Rational(r / Ratio::from_integer(1u64 << k)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactDistance::Zero => 0.0,
            ExactDistance::Dyadic(e) => 0.5f64.powi(*e as i32),
            ExactDistance::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
        }
    }
}

fn cmp_dyadic_ratio(e: u32, r: &Ratio<u64>) -> Ordering {
    // 2^-e  vs  n/d   <=>   d  vs  n·2^e
    let (n, d) = (*r.numer() as u128, *r.denom() as u128);
    if e >= 64 {
        return Ordering::Less;
    }
    d.cmp(&(n << e))
}

impl Ord for ExactDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExactDistance::*;
        match (self, other) {
            (Zero, Zero) => Ordering::Equal,
            (Zero, _) => Ordering::Less,
            (_, Zero) => Ordering::Greater,
            (Dyadic(a), Dyadic(b)) => b.cmp(a),
            (Rational(a), Rational(b)) => a.cmp(b),
            (Dyadic(e), Rational(r)) => cmp_dyadic_ratio(*e, r),
            (Rational(r), Dyadic(e)) => cmp_dyadic_ratio(*e, r).reverse(),
        }
    }
}

impl PartialOrd for ExactDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ExactDistance {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactDistance {}

impl fmt::Debug for ExactDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactDistance::Zero => write!(f, "0"),
            ExactDistance::Dyadic(e) => write!(f, "2^-{e}"),
            ExactDistance::Rational(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Display for ExactDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for ExactDistance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
