//! Exact and floating-point scalars.
//!
//! The default arithmetic is exact complex-rational: preclusion and the null
//! structure hinge on exact zero tests, and rounding would corrupt them.
//! Float mode exists for irrational inputs; every zero test and equality in
//! float mode is a tolerance test against the theory's epsilon.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default comparison tolerance for float mode.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Arithmetic mode of a theory. All scalars in one theory share a mode.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

/// A real number in the theory's arithmetic mode.
///
/// Binary operations panic on mixed modes; a theory validates at construction
/// that all its scalars agree, so a mix here is a bug, not an input error.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(BigRational),
    Float(f64),
}

impl Real {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Real::Exact(BigRational::zero()),
            Mode::Float => Real::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Real::Exact(BigRational::from_integer(BigInt::from(1))),
            Mode::Float => Real::Float(1.0),
        }
    }

    pub fn from_integer(v: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Real::Exact(BigRational::from_integer(BigInt::from(v))),
            Mode::Float => Real::Float(v as f64),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Real::Exact(_) => Mode::Exact,
            Real::Float(_) => Mode::Float,
        }
    }

    pub fn add(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a + b),
            (Real::Float(a), Real::Float(b)) => Real::Float(a + b),
            _ => panic!("mixed-mode arithmetic"),
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a - b),
            (Real::Float(a), Real::Float(b)) => Real::Float(a - b),
            _ => panic!("mixed-mode arithmetic"),
        }
    }

    pub fn mul(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * b),
            (Real::Float(a), Real::Float(b)) => Real::Float(a * b),
            _ => panic!("mixed-mode arithmetic"),
        }
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Exact(a) => Real::Exact(-a),
            Real::Float(a) => Real::Float(-a),
        }
    }

    /// Zero test: exact in exact mode, |x| <= tol in float mode.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        match self {
            Real::Exact(a) => a.is_zero(),
            Real::Float(a) => a.abs() <= tol,
        }
    }

    pub fn eq_within(&self, other: &Real, tol: f64) -> bool {
        self.sub(other).is_zero_within(tol)
    }

    /// True when the value is strictly below zero (beyond tolerance).
    pub fn is_negative_within(&self, tol: f64) -> bool {
        match self {
            Real::Exact(a) => a.is_negative(),
            Real::Float(a) => *a < -tol,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(a) => a.to_f64().unwrap_or(f64::NAN),
            Real::Float(a) => *a,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Real::Exact(a) => Some(a),
            Real::Float(_) => None,
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(a) => write!(f, "{}", format_rational(a)),
            Real::Float(a) => write!(f, "{a}"),
        }
    }
}

/// A complex scalar; an entry of a decoherence matrix or an amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct Scalar {
    re: Real,
    im: Real,
}

impl Scalar {
    pub fn new(re: Real, im: Real) -> Result<Self> {
        if re.mode() != im.mode() {
            return Err(Error::MixedModes);
        }
        Ok(Scalar { re, im })
    }

    pub fn exact(re: BigRational, im: BigRational) -> Self {
        Scalar {
            re: Real::Exact(re),
            im: Real::Exact(im),
        }
    }

    pub fn exact_int(re: i64, im: i64) -> Self {
        Scalar::exact(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar {
            re: Real::Float(re),
            im: Real::Float(im),
        }
    }

    pub fn zero(mode: Mode) -> Self {
        Scalar {
            re: Real::zero(mode),
            im: Real::zero(mode),
        }
    }

    pub fn one(mode: Mode) -> Self {
        Scalar {
            re: Real::one(mode),
            im: Real::zero(mode),
        }
    }

    pub fn mode(&self) -> Mode {
        self.re.mode()
    }

    pub fn re(&self) -> &Real {
        &self.re
    }

    pub fn im(&self) -> &Real {
        &self.im
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        Scalar {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        Scalar {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        // (a+bi)(c+di) = (ac - bd) + (ad + bc)i
        Scalar {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    pub fn conj(&self) -> Scalar {
        Scalar {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn norm_sq(&self) -> Real {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.re.is_zero_within(tol) && self.im.is_zero_within(tol)
    }

    pub fn eq_within(&self, other: &Scalar, tol: f64) -> bool {
        self.sub(other).is_zero_within(tol)
    }

    /// Complex division; `None` when the divisor is exactly zero.
    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        let denom = other.norm_sq();
        if denom.is_zero_within(0.0) {
            return None;
        }
        let num = self.mul(&other.conj());
        let inv = match denom {
            Real::Exact(d) => Scalar::exact(d.recip(), BigRational::zero()),
            Real::Float(d) => Scalar::float(1.0 / d, 0.0),
        };
        Some(num.mul(&inv))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

/// Parse a rational literal: "p/q" or an integer string.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = |reason: &str| Error::BadNumber {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let parse_int = |s: &str| -> Result<BigInt> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| bad("not an integer"))
    };
    match text.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(text)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Canonical rendering: "p/q", or just "p" for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn rational_parse_and_format() {
        assert_eq!(format_rational(&rat("3/4")), "3/4");
        assert_eq!(format_rational(&rat("6/8")), "3/4");
        assert_eq!(format_rational(&rat("-2/4")), "-1/2");
        assert_eq!(format_rational(&rat("5")), "5");
        assert_eq!(format_rational(&rat("4/2")), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn complex_arithmetic_is_exact() {
        let i = Scalar::exact_int(0, 1);
        let z = Scalar::exact(rat("1/3"), rat("1/2"));
        let w = z.mul(&i); // (1/3 + i/2) * i = -1/2 + i/3
        assert_eq!(w, Scalar::exact(rat("-1/2"), rat("1/3")));
        assert_eq!(z.mul(&z.conj()).re(), &Real::Exact(rat("13/36")));
        assert_eq!(z.norm_sq(), Real::Exact(rat("13/36")));
    }

    #[test]
    fn division_round_trips() {
        let z = Scalar::exact(rat("2/3"), rat("-1/5"));
        let w = Scalar::exact(rat("1/2"), rat("3"));
        let q = z.div(&w).unwrap();
        assert!(q.mul(&w).eq_within(&z, 0.0));
        assert!(z.div(&Scalar::zero(Mode::Exact)).is_none());
    }

    #[test]
    fn float_tolerance() {
        let x = Real::Float(0.1 + 0.2);
        assert!(x.eq_within(&Real::Float(0.3), DEFAULT_TOLERANCE));
        assert!(!x.eq_within(&Real::Float(0.3), 0.0));
        assert!(Real::Float(-1e-12).is_zero_within(DEFAULT_TOLERANCE));
        assert!(Real::Float(-1e-3).is_negative_within(DEFAULT_TOLERANCE));
    }

    #[test]
    #[should_panic(expected = "mixed-mode")]
    fn mixed_mode_panics() {
        let _ = Real::Exact(rat("1")).add(&Real::Float(1.0));
    }
}
