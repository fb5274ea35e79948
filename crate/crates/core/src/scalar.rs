//! Coefficient fields.
//!
//! Three modes are supported: exact rationals, exact Gaussian rationals and
//! complex doubles. A [`Scalar`] carries one value in one mode; series keep
//! their coefficients in a single mode and never coerce between modes.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact complex numbers with rational real and imaginary parts.
pub type GaussRat = Complex<BigRational>;

/// Relative tolerance attached to float-mode comparisons.
pub const FLOAT_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMode {
    ExactRational,
    ExactGaussian,
    ComplexFloat,
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ScalarMode::ExactRational => "exact rational",
            ScalarMode::ExactGaussian => "exact Gaussian rational",
            ScalarMode::ComplexFloat => "complex float",
        };
        f.write_str(name)
    }
}

/// A value of a moment sequence or another real weight: exact when possible.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Exact(BigRational),
    Float(f64),
}

impl Weight {
    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(r) => rational_to_f64(r),
            Weight::Float(x) => *x,
        }
    }

    /// Natural log of the absolute value, safe for values far outside the f64 range.
    pub fn ln_abs(&self) -> f64 {
        match self {
            Weight::Exact(r) => ln_abs_rational(r),
            Weight::Float(x) => x.abs().ln(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Weight::Exact(_))
    }

    pub fn recip(&self) -> Weight {
        match self {
            Weight::Exact(r) => Weight::Exact(r.recip()),
            Weight::Float(x) => Weight::Float(1.0 / x),
        }
    }

    pub fn mul(&self, other: &Weight) -> Weight {
        match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a * b),
            (a, b) => Weight::Float(a.to_f64() * b.to_f64()),
        }
    }
}

/// Arithmetic shared by every coefficient mode.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: ScalarMode;

    fn from_rational(r: &BigRational) -> Self;

    /// Converts a weight into this field. Exact fields refuse float weights.
    fn from_weight(w: &Weight) -> Option<Self>;

    fn to_complex(&self) -> Complex64;

    /// `ln |x|`, finite for any nonzero value regardless of magnitude.
    fn ln_abs(&self) -> f64;

    fn arg(&self) -> f64 {
        self.to_complex().arg()
    }

    fn into_scalar(self) -> Scalar;

    fn from_scalar(s: &Scalar) -> Option<Self>;
}

impl Coeff for BigRational {
    const MODE: ScalarMode = ScalarMode::ExactRational;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_weight(w: &Weight) -> Option<Self> {
        match w {
            Weight::Exact(r) => Some(r.clone()),
            Weight::Float(_) => None,
        }
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn ln_abs(&self) -> f64 {
        ln_abs_rational(self)
    }

    fn arg(&self) -> f64 {
        if self.is_negative() {
            std::f64::consts::PI
        } else {
            0.0
        }
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Rational(self)
    }

    fn from_scalar(s: &Scalar) -> Option<Self> {
        match s {
            Scalar::Rational(r) => Some(r.clone()),
            _ => None,
        }
    }
}

impl Coeff for GaussRat {
    const MODE: ScalarMode = ScalarMode::ExactGaussian;

    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }

    fn from_weight(w: &Weight) -> Option<Self> {
        match w {
            Weight::Exact(r) => Some(Self::from_rational(r)),
            Weight::Float(_) => None,
        }
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn ln_abs(&self) -> f64 {
        if self.im.is_zero() {
            return ln_abs_rational(&self.re);
        }
        if self.re.is_zero() {
            return ln_abs_rational(&self.im);
        }
        // ln|z| = ln|re| + 0.5 ln(1 + (im/re)^2), arranged so the ratio is at most 1
        let (big, small) = if self.re.abs() >= self.im.abs() {
            (&self.re, &self.im)
        } else {
            (&self.im, &self.re)
        };
        let ratio = rational_to_f64(&(small / big));
        ln_abs_rational(big) + 0.5 * (1.0 + ratio * ratio).ln()
    }

    fn arg(&self) -> f64 {
        // sign-correct even when the parts overflow f64
        let re = self.re.signum().to_f64().unwrap_or(0.0);
        let im = self.im.signum().to_f64().unwrap_or(0.0);
        if self.re.is_zero() || self.im.is_zero() {
            return im.atan2(re);
        }
        let ln_re = ln_abs_rational(&self.re);
        let ln_im = ln_abs_rational(&self.im);
        let d = ln_im - ln_re;
        (im * d.min(700.0).exp()).atan2(re)
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Gaussian(self)
    }

    fn from_scalar(s: &Scalar) -> Option<Self> {
        match s {
            Scalar::Gaussian(g) => Some(g.clone()),
            _ => None,
        }
    }
}

impl Coeff for Complex64 {
    const MODE: ScalarMode = ScalarMode::ComplexFloat;

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }

    fn from_weight(w: &Weight) -> Option<Self> {
        Some(Complex64::new(w.to_f64(), 0.0))
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn ln_abs(&self) -> f64 {
        self.norm().ln()
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }

    fn from_scalar(s: &Scalar) -> Option<Self> {
        match s {
            Scalar::Float(z) => Some(*z),
            _ => None,
        }
    }
}

/// A single coefficient in one of the three modes.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Gaussian(GaussRat),
    Float(Complex64),
}

impl Scalar {
    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Rational(_) => ScalarMode::ExactRational,
            Scalar::Gaussian(_) => ScalarMode::ExactGaussian,
            Scalar::Float(_) => ScalarMode::ComplexFloat,
        }
    }

    pub fn rational(r: BigRational) -> Self {
        Scalar::Rational(r)
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(n.into()))
    }

    pub fn float(re: f64) -> Self {
        Scalar::Float(Complex64::new(re, 0.0))
    }

    pub fn zero_in(mode: ScalarMode) -> Self {
        Self::from_rational_in(mode, &BigRational::zero())
    }

    pub fn one_in(mode: ScalarMode) -> Self {
        Self::from_rational_in(mode, &BigRational::one())
    }

    pub fn from_rational_in(mode: ScalarMode, r: &BigRational) -> Self {
        match mode {
            ScalarMode::ExactRational => Scalar::Rational(r.clone()),
            ScalarMode::ExactGaussian => Scalar::Gaussian(GaussRat::from_rational(r)),
            ScalarMode::ComplexFloat => Scalar::Float(Complex64::from_rational(r)),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Rational(r) => r.to_complex(),
            Scalar::Gaussian(g) => g.to_complex(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn ln_abs(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.ln_abs(),
            Scalar::Gaussian(g) => g.ln_abs(),
            Scalar::Float(z) => z.ln_abs(),
        }
    }

    pub fn arg(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.arg(),
            Scalar::Gaussian(g) => g.arg(),
            Scalar::Float(z) => z.arg(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Gaussian(g) => g.is_zero(),
            Scalar::Float(z) => z.is_zero(),
        }
    }

    /// The value as an exact rational, if it is one.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Converts to float mode. Always allowed: it only discards exactness.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_complex())
    }

    /// Equality within the float tolerance in float mode, exact otherwise.
    pub fn approx_eq(&self, other: &Scalar) -> Result<bool> {
        match (self, other) {
            (Scalar::Float(a), Scalar::Float(b)) => {
                let scale = a.norm().max(b.norm()).max(1.0);
                Ok((a - b).norm() <= FLOAT_EPS * scale)
            }
            (a, b) if a.mode() == b.mode() => Ok(a == b),
            (a, b) => Err(Error::ModeMismatch(a.mode(), b.mode())),
        }
    }
}

macro_rules! scalar_binop {
    ($name:ident, $op:tt) => {
        impl Scalar {
            pub fn $name(&self, other: &Scalar) -> Result<Scalar> {
                match (self, other) {
                    (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a $op b)),
                    (Scalar::Gaussian(a), Scalar::Gaussian(b)) => {
                        Ok(Scalar::Gaussian(a.clone() $op b.clone()))
                    }
                    (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a $op b)),
                    (a, b) => Err(Error::ModeMismatch(a.mode(), b.mode())),
                }
            }
        }
    };
}

scalar_binop!(try_add, +);
scalar_binop!(try_sub, -);
scalar_binop!(try_mul, *);

impl Scalar {
    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a / b)),
            (Scalar::Gaussian(a), Scalar::Gaussian(b)) => Ok(Scalar::Gaussian(a.clone() / b.clone())),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a / b)),
            (a, b) => Err(Error::ModeMismatch(a.mode(), b.mode())),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Gaussian(g) => write!(f, "({})+({})i", g.re, g.im),
            Scalar::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Scalar::Float(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}

/// Parses `p/q`, `p` or a leading-minus variant (ASCII `-` or U+2212).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let (neg, body) = if let Some(rest) = t.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = t.strip_prefix('\u{2212}') {
        (true, rest)
    } else {
        (false, t)
    };
    let bad = || Error::Parse(format!("not a rational literal: {text:?}"));
    if body.is_empty() || body.contains(['.', 'e', 'E', '+', '-', ' ']) {
        return Err(bad());
    }
    let r = match body.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p).map_err(|_| bad())?;
            let q = BigInt::from_str(q).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            BigRational::new(p, q)
        }
        None => BigRational::from_integer(BigInt::from_str(body).map_err(|_| bad())?),
    };
    Ok(if neg { -r } else { r })
}

pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// `ln |r|` without overflowing on huge numerators or denominators.
pub fn ln_abs_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())
}

pub fn ln_abs_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).abs().ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift as usize).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Nearest f64; saturates to +/- infinity or 0 instead of failing.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(x) => x,
        None => {
            let ln = ln_abs_rational(r);
            let sign = if r.is_negative() { -1.0 } else { 1.0 };
            sign * ln.exp()
        }
    }
}

pub fn f64_to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Rational(r) => serializer.serialize_str(&format_rational(r)),
            Scalar::Gaussian(g) => {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("re", &format_rational(&g.re))?;
                map.serialize_entry("im", &format_rational(&g.im))?;
                map.end()
            }
            Scalar::Float(z) if z.im == 0.0 => serializer.serialize_f64(z.re),
            Scalar::Float(z) => {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("re", &z.re)?;
                map.serialize_entry("im", &z.im)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        Scalar::from_json(&value).map_err(de::Error::custom)
    }
}

impl Scalar {
    pub fn from_json(value: &serde_json::Value) -> Result<Scalar> {
        use serde_json::Value;
        match value {
            Value::String(s) => Ok(Scalar::Rational(parse_rational(s)?)),
            Value::Number(n) => {
                // integers written as JSON numbers are still exact
                if let Some(i) = n.as_i64() {
                    if !n.to_string().contains(['.', 'e', 'E']) {
                        return Ok(Scalar::int(i));
                    }
                }
                let x = n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}")))?;
                Ok(Scalar::float(x))
            }
            Value::Object(map) => {
                let re = map.get("re").ok_or_else(|| Error::Parse("missing \"re\"".into()))?;
                let im = map.get("im").ok_or_else(|| Error::Parse("missing \"im\"".into()))?;
                match (re, im) {
                    (Value::String(a), Value::String(b)) => Ok(Scalar::Gaussian(Complex::new(
                        parse_rational(a)?,
                        parse_rational(b)?,
                    ))),
                    (Value::Number(a), Value::Number(b)) => Ok(Scalar::Float(Complex64::new(
                        a.as_f64().unwrap_or(f64::NAN),
                        b.as_f64().unwrap_or(f64::NAN),
                    ))),
                    _ => Err(Error::Parse("mixed string/number parts in complex scalar".into())),
                }
            }
            other => Err(Error::Parse(format!("not a scalar: {other}"))),
        }
    }
}

/// Parses an exact rational from either a string literal or a JSON integer.
pub fn rational_from_json(value: &serde_json::Value) -> Result<BigRational> {
    match Scalar::from_json(value)? {
        Scalar::Rational(r) => Ok(r),
        other => Err(Error::Parse(format!(
            "expected an exact rational, got {} value",
            other.mode()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_rational_literals() {
        assert_eq!(r("3/4"), BigRational::new(3.into(), 4.into()));
        assert_eq!(r("-3/4"), BigRational::new((-3).into(), 4.into()));
        assert_eq!(r("\u{2212}1/2"), BigRational::new((-1).into(), 2.into()));
        assert_eq!(r("6/4"), BigRational::new(3.into(), 2.into()));
        assert_eq!(r("7"), BigRational::from_integer(7.into()));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("--1").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn json_forms() {
        let s: Scalar = serde_json::from_str("\"-5/3\"").unwrap();
        assert_eq!(s, Scalar::Rational(r("-5/3")));
        let g: Scalar = serde_json::from_str(r#"{"re":"1/2","im":"-1"}"#).unwrap();
        assert_eq!(g, Scalar::Gaussian(Complex::new(r("1/2"), r("-1"))));
        let f: Scalar = serde_json::from_str("0.25").unwrap();
        assert_eq!(f, Scalar::float(0.25));
        let i: Scalar = serde_json::from_str("3").unwrap();
        assert_eq!(i, Scalar::int(3));
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"re":"1/2","im":"-1"}"#);
        assert_eq!(serde_json::to_string(&Scalar::Rational(r("-5/3"))).unwrap(), "\"-5/3\"");
        assert_eq!(serde_json::to_string(&Scalar::float(0.25)).unwrap(), "0.25");
    }

    #[test]
    fn mixed_modes_are_rejected() {
        let a = Scalar::int(1);
        let b = Scalar::float(1.0);
        assert!(matches!(a.try_add(&b), Err(Error::ModeMismatch(..))));
        assert!(matches!(a.try_div(&Scalar::int(0)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn log_of_huge_rationals() {
        let big = BigInt::from(10).pow(2000);
        let x = BigRational::new(big.clone() * 3, 1.into());
        let expected = 2000.0 * 10f64.ln() + 3f64.ln();
        assert!((ln_abs_rational(&x) - expected).abs() < 1e-9);
        let tiny = BigRational::new(1.into(), big);
        assert!((ln_abs_rational(&tiny) + 2000.0 * 10f64.ln()).abs() < 1e-9);
        assert_eq!(rational_to_f64(&tiny), 0.0);
    }

    #[test]
    fn gaussian_log_and_arg() {
        let g = Complex::new(r("3"), r("-4"));
        assert!((g.ln_abs() - 5f64.ln()).abs() < 1e-14);
        assert!((g.arg() - (-4f64).atan2(3.0)).abs() < 1e-14);
    }
}
