//! Scalar parameters that remember whether they are exact.
//!
//! Regime boundaries (log versus power law) are discrete decisions taken on
//! lattices such as `(2|mu| - 1)/beta in Z`. A [`Param`] built from `"p/q"`
//! text stays an exact rational through all arithmetic, so those decisions
//! are made exactly; anything built from a decimal falls back to `f64` and
//! lattice tests use [`LATTICE_TOL`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Absolute tolerance used for lattice detection on inexact inputs.
pub const LATTICE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Exact(BigRational),
    Approx(f64),
}

impl Param {
    pub fn int(v: i64) -> Self {
        Param::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Param::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn approx(v: f64) -> Self {
        Param::Approx(v)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Param::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Param::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Param::Approx(v) => *v,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Param::Exact(r) => Param::Exact(r.abs()),
            Param::Approx(v) => Param::Approx(v.abs()),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Param::Exact(r) => r.is_negative(),
            Param::Approx(v) => *v < 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Param::Exact(r) => r.is_positive(),
            Param::Approx(v) => *v > 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Param::Exact(r) => r.is_zero(),
            Param::Approx(v) => *v == 0.0,
        }
    }

    /// Returns `Some(n)` when the value is the integer `n`: exactly for
    /// rationals, within [`LATTICE_TOL`] otherwise.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Param::Exact(r) => {
                if r.is_integer() {
                    r.to_integer().to_i64()
                } else {
                    None
                }
            }
            Param::Approx(v) => {
                let n = v.round();
                if (v - n).abs() <= LATTICE_TOL {
                    n.to_i64()
                } else {
                    None
                }
            }
        }
    }

    /// Integer part (floor) of the value.
    pub fn floor(&self) -> i64 {
        match self {
            Param::Exact(r) => r.floor().to_integer().to_i64().unwrap_or(i64::MAX),
            Param::Approx(v) => v.floor() as i64,
        }
    }

    pub fn cmp_value(&self, other: &Param) -> std::cmp::Ordering {
        match (self, other) {
            (Param::Exact(a), Param::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(std::cmp::Ordering::Equal),
        }
    }

    fn lift(self) -> Either {
        match self {
            Param::Exact(r) => Either::Exact(r),
            Param::Approx(v) => Either::Approx(v),
        }
    }
}

enum Either {
    Exact(BigRational),
    Approx(f64),
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Param {
            type Output = Param;
            fn $method(self, rhs: Param) -> Param {
                match (self.lift(), rhs.lift()) {
                    (Either::Exact(a), Either::Exact(b)) => Param::Exact(a $op b),
                    (a, b) => {
                        let a = match a { Either::Exact(r) => r.to_f64().unwrap_or(f64::NAN), Either::Approx(v) => v };
                        let b = match b { Either::Exact(r) => r.to_f64().unwrap_or(f64::NAN), Either::Approx(v) => v };
                        Param::Approx(a $op b)
                    }
                }
            }
        }
        impl<'a> $trait<&'a Param> for &'a Param {
            type Output = Param;
            fn $method(self, rhs: &'a Param) -> Param {
                self.clone() $op rhs.clone()
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Div for Param {
    type Output = Param;
    fn div(self, rhs: Param) -> Param {
        match (self, rhs) {
            (Param::Exact(a), Param::Exact(b)) if !b.is_zero() => Param::Exact(a / b),
            (a, b) => Param::Approx(a.to_f64() / b.to_f64()),
        }
    }
}

impl<'a> Div<&'a Param> for &'a Param {
    type Output = Param;
    fn div(self, rhs: &'a Param) -> Param {
        self.clone() / rhs.clone()
    }
}

impl Neg for Param {
    type Output = Param;
    fn neg(self) -> Param {
        match self {
            Param::Exact(r) => Param::Exact(-r),
            Param::Approx(v) => Param::Approx(-v),
        }
    }
}

impl From<i64> for Param {
    fn from(v: i64) -> Self {
        Param::int(v)
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Approx(v)
    }
}

impl From<BigRational> for Param {
    fn from(r: BigRational) -> Self {
        Param::Exact(r)
    }
}

impl FromStr for Param {
    type Err = Error;

    /// Accepts `"p/q"`, plain integers (both exact) and decimals (inexact).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse number '{s}'"));
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::InvalidParameter(format!("zero denominator in '{s}'")));
            }
            return Ok(Param::Exact(BigRational::new(num, den)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Param::Exact(BigRational::from_integer(n)));
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(Param::Approx(v))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Exact(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Param::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Param::Approx(v) => write!(f, "{v}"),
        }
    }
}

/// Exact conversion of a finite `f64` to a rational (binary expansion).
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_f64(v)
}
