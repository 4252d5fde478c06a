//! Exact rational values used for attention, detachment and path costs.

use std::fmt;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, ToPrimitive, Zero};

/// Arbitrary-precision rational. All attention/detachment quantities and
/// weighted distances are carried exactly; floats appear only at reporting
/// boundaries.
pub type Rational = Ratio<BigInt>;

pub fn ratio(num: i64, den: i64) -> Rational {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_u64(v: u64) -> Rational {
    Ratio::from_integer(BigInt::from(v))
}

/// A distance that may be infinite (target unreachable). `Finite` sorts
/// before `Infinite`, so ordering matches the numeric intuition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance<T> {
    Finite(T),
    Infinite,
}

impl<T> Distance<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Distance::Finite(v) => Some(v),
            Distance::Infinite => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Distance<U> {
        match self {
            Distance::Finite(v) => Distance::Finite(f(v)),
            Distance::Infinite => Distance::Infinite,
        }
    }
}

/// Hop-count distance.
pub type HopDistance = Distance<u32>;
/// Exact weighted distance.
pub type CostDistance = Distance<Rational>;

impl<T: fmt::Display> fmt::Display for Distance<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(v) => v.fmt(f),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Format a rational for CSV/report output: integers bare, terminating
/// decimals as decimals (`3/2` -> `1.5`), everything else as `num/den`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        return r.numer().to_string();
    }
    // Terminating decimal iff the reduced denominator is 2^a * 5^b.
    let mut d = r.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if d.is_one() && twos <= 18 && fives <= 18 {
        let digits = twos.max(fives);
        let scale = BigInt::from(10).pow(digits);
        let scaled = r.numer() * &scale / r.denom();
        let neg = scaled < BigInt::zero();
        let abs = scaled.magnitude().to_string();
        let abs = if abs.len() <= digits as usize {
            format!("{:0>width$}", abs, width = digits as usize + 1)
        } else {
            abs
        };
        let (int_part, frac_part) = abs.split_at(abs.len() - digits as usize);
        format!("{}{int_part}.{frac_part}", if neg { "-" } else { "" })
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse a rational from `a/b`, decimal (`0.25`) or integer text.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        let frac: BigInt = frac_part.parse().ok()?;
        let scale = BigInt::from(10).pow(frac_part.len() as u32);
        let mag = int.magnitude().clone() * scale.magnitude() + frac.magnitude();
        let mut v = Ratio::new(BigInt::from(mag), scale);
        if neg {
            v = -v;
        }
        return Some(v);
    }
    let n: BigInt = s.parse().ok()?;
    Some(Ratio::from_integer(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
