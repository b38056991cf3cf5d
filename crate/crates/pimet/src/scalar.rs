//! Length values: exact rationals for combinatorial path metrics, binary64
//! for the analytic model spaces.
//!
//! Arithmetic between two exact values stays exact; anything touching an
//! approximate value collapses to f64. Exact values print as `n` or `p/q`,
//! approximate values print with f64 round-trip formatting.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// 2^-k as an exact rational.
    pub fn pow2_inv(k: u32) -> Self {
        Scalar::Exact(BigRational::new(BigInt::one(), BigInt::from(2u8).pow(k)))
    }

    pub fn exact(r: BigRational) -> Self {
        Scalar::Exact(r)
    }

    pub fn approx(v: f64) -> Self {
        Scalar::Approx(v)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(v) => *v == 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Approx(v) => Scalar::Approx(v.abs()),
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Parses `"p/q"`, decimal strings like `"0.25"` (exact), and plain
    /// integers. Used wherever length fields enter from JSON.
    pub fn parse(s: &str) -> Result<Scalar> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num: BigInt = p
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad rational {s:?}")))?;
            let den: BigInt = q
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad rational {s:?}")))?;
            if den.is_zero() {
                return Err(Error::Malformed(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::Exact(BigRational::new(num, den)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int = if int.is_empty() || int == "-" {
                format!("{int}0")
            } else {
                int.to_string()
            };
            let sign = if int.starts_with('-') { -1 } else { 1 };
            let whole: BigInt = int
                .parse()
                .map_err(|_| Error::Malformed(format!("bad decimal {s:?}")))?;
            if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(Error::Malformed(format!("bad decimal {s:?}")));
            }
            let digits: BigInt = frac
                .parse()
                .map_err(|_| Error::Malformed(format!("bad decimal {s:?}")))?;
            let scale = BigInt::from(10u8).pow(frac.len() as u32);
            let value = BigRational::from_integer(whole)
                + BigRational::new(digits * BigInt::from(sign), scale);
            return Ok(Scalar::Exact(value));
        }
        let n: BigInt = s
            .parse()
            .map_err(|_| Error::Malformed(format!("bad number {s:?}")))?;
        Ok(Scalar::Exact(BigRational::from_integer(n)))
    }
}

fn binop(a: &Scalar, b: &Scalar, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(f(x, y)),
        _ => unreachable!(),
    }
}

macro_rules! scalar_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(_), Scalar::Exact(_)) => binop(self, rhs, |x, y| x $op y),
                    _ => Scalar::Approx(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
    };
}

scalar_op!(Add, add, +);
scalar_op!(Sub, sub, -);
scalar_op!(Mul, mul, *);
scalar_op!(Div, div, /);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(v) => Scalar::Approx(-v),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .expect("NaN in scalar comparison"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx(v) => write!(f, "{v}"),
        }
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_decimal_is_exact() {
        let v = Scalar::parse("0.25").unwrap();
        assert_eq!(v, Scalar::ratio(1, 4));
        assert!(v.is_exact());
        assert_eq!(Scalar::parse("-0.5").unwrap(), Scalar::ratio(-1, 2));
        assert_eq!(Scalar::parse("3").unwrap(), Scalar::from_int(3));
        assert_eq!(Scalar::parse("2/6").unwrap(), Scalar::ratio(1, 3));
    }

    #[test]
    fn display_round_trips() {
        for s in ["1/3", "7", "-5/4"] {
            let v = Scalar::parse(s).unwrap();
            assert_eq!(v.to_string(), s);
        }
    }

    #[test]
    fn mixed_arithmetic_degrades_to_f64() {
        let e = Scalar::ratio(1, 2);
        let a = Scalar::approx(0.5);
        assert!((&e + &e).is_exact());
        assert!(!(&e + &a).is_exact());
        assert_eq!((&e + &a).to_f64(), 1.0);
    }

    #[test]
    fn ordering_exact() {
        assert!(Scalar::ratio(1, 3) < Scalar::ratio(1, 2));
        assert_eq!(Scalar::pow2_inv(3), Scalar::ratio(1, 8));
    }
}
