//! q-numbers, q-factorials, q-Pochhammer symbols, basic hypergeometric
//! series and the q-difference operator `D_{q,t}`.

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rational_to_f64, Coeff, Scalar};
use crate::series::{Coeffs, TruncatedSeries};
use crate::try_map_coeffs;

/// The base `q`, an exact rational with `0 ≤ q < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QParam(BigRational);

impl QParam {
    pub fn new(q: BigRational) -> Result<Self> {
        if q < BigRational::zero() || q >= BigRational::one() {
            return Err(Error::InvalidQ(q.to_string()));
        }
        Ok(Self(q))
    }

    /// Parses an exact literal such as `"1/2"`. Decimal input is rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let q = parse_rational(text).map_err(|_| Error::InvalidQ(text.to_string()))?;
        Self::new(q)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for QParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

/// `[n]_q = 1 + q + … + q^{n-1}`.
pub fn q_number(n: usize, q: &QParam) -> BigRational {
    let mut acc = BigRational::zero();
    let mut power = BigRational::one();
    for _ in 0..n {
        acc += &power;
        power *= q.value();
    }
    acc
}

/// `[0]_q!, …, [n]_q!`.
pub fn q_factorials(n: usize, q: &QParam) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut fact = BigRational::one();
    let mut qn = BigRational::zero();
    let mut power = BigRational::one();
    out.push(fact.clone());
    for _ in 1..=n {
        qn += &power;
        power *= q.value();
        fact *= &qn;
        out.push(fact.clone());
    }
    out
}

/// `([n]_q, [n]_q!)`, both exact.
pub fn q_number_factorial(n: usize, q: &QParam) -> (BigRational, BigRational) {
    let facts = q_factorials(n, q);
    (q_number(n, q), facts[n].clone())
}

/// Length of a q-Pochhammer product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochhammerLength {
    Finite(usize),
    Infinite,
}

/// Result of an infinite q-Pochhammer product.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfiniteProduct {
    pub value: Complex64,
    /// Bound on `|true - value|`.
    pub error_bound: f64,
    pub factors: usize,
}

/// `(a;q)_n` in the mode of `a`, exactly for exact modes.
pub fn q_pochhammer_finite(a: &Scalar, q: &QParam, n: usize) -> Scalar {
    fn go<T: Coeff>(a: &T, q: &BigRational, n: usize) -> T {
        let q = T::from_rational(q);
        let mut acc = T::one();
        let mut aq = a.clone();
        for _ in 0..n {
            acc = acc * (T::one() - aq.clone());
            aq = aq * q.clone();
        }
        acc
    }
    match a {
        Scalar::Rational(x) => go(x, q.value(), n).into_scalar(),
        Scalar::Gaussian(x) => go(x, q.value(), n).into_scalar(),
        Scalar::Float(x) => go(x, q.value(), n).into_scalar(),
    }
}

/// `(a;q)_∞` in float arithmetic.
///
/// Factors are multiplied until `|a q^k| < tol·(1-q)`; the reported bound
/// covers the dropped tail `∏_{j≥k} (1 - a q^j)`.
pub fn q_pochhammer_infinite(a: Complex64, q: &QParam, tol: f64) -> Result<InfiniteProduct> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let qf = q.to_f64();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut aq = a;
    let mut factors = 0;
    loop {
        if aq.norm() < tol * (1.0 - qf) {
            break;
        }
        acc *= 1.0 - aq;
        aq *= qf;
        factors += 1;
        if factors > 1_000_000 {
            return Err(Error::NoConvergence(factors));
        }
    }
    // |log tail| ≤ Σ_j |x_j| / (1 - |x_j|) with Σ_j |x_j| ≤ |a q^k| / (1 - q)
    let x = aq.norm() / (1.0 - qf);
    let log_bound = x / (1.0 - aq.norm());
    let error_bound = acc.norm() * (log_bound.exp() - 1.0);
    Ok(InfiniteProduct { value: acc, error_bound, factors })
}

/// `(a;q)_n` for finite or infinite `n`. The infinite case is float-valued.
pub fn q_pochhammer(a: &Scalar, q: &QParam, n: PochhammerLength, tol: f64) -> Result<Scalar> {
    match n {
        PochhammerLength::Finite(n) => Ok(q_pochhammer_finite(a, q, n)),
        PochhammerLength::Infinite => {
            Ok(Scalar::Float(q_pochhammer_infinite(a.to_complex(), q, tol)?.value))
        }
    }
}

/// Partial sum of a basic hypergeometric series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypergeometricSum {
    pub value: Complex64,
    /// Magnitude of the last term added.
    pub last_term: f64,
    pub terms: usize,
}

/// `_{r}φ_{r-1}(upper; lower; q, z)` summed over `n < terms`.
///
/// Denominator factors `(b;q)_n` are checked for exact vanishing when `b` is exact.
pub fn q_hypergeometric(
    upper: &[Scalar],
    lower: &[Scalar],
    q: &QParam,
    z: &Scalar,
    terms: usize,
) -> Result<HypergeometricSum> {
    if upper.len() != lower.len() + 1 {
        return Err(Error::Parse(format!(
            "need len(upper) = len(lower) + 1, got {} and {}",
            upper.len(),
            lower.len()
        )));
    }
    for b in lower {
        if let Some(j) = vanishing_index(b, q, terms) {
            return Err(Error::VanishingDenominator(b.to_string(), j + 1));
        }
    }
    let qf = q.to_f64();
    let zf = z.to_complex();
    let ups: Vec<Complex64> = upper.iter().map(Scalar::to_complex).collect();
    let lows: Vec<Complex64> = lower.iter().map(Scalar::to_complex).collect();
    let mut sum = Complex64::zero();
    let mut term = Complex64::new(1.0, 0.0);
    let mut last = 0.0;
    let mut qn = 1.0;
    for n in 0..terms {
        sum += term;
        last = term.norm();
        // ratio t_{n+1}/t_n = Π(1 - a q^n) / (Π(1 - b q^n) (1 - q^{n+1})) · z
        let mut num = zf;
        for a in &ups {
            num *= 1.0 - a * qn;
        }
        let mut den = Complex64::new(1.0 - qn * qf, 0.0);
        for b in &lows {
            den *= 1.0 - b * qn;
        }
        if den.is_zero() {
            return Err(Error::VanishingDenominator(format!("q^{}", n + 1), n + 1));
        }
        term = term * num / den;
        qn *= qf;
    }
    Ok(HypergeometricSum { value: sum, last_term: last, terms })
}

/// Smallest `j < n` with `b q^j = 1`, for exact `b`.
fn vanishing_index(b: &Scalar, q: &QParam, n: usize) -> Option<usize> {
    let b = b.as_rational()?;
    let mut x = b.clone();
    for j in 0..n {
        if x.is_one() {
            return Some(j);
        }
        if x.is_zero() {
            return None;
        }
        x *= q.value();
    }
    None
}

/// `D_{q,t} u = (u(qt) - u(t)) / (qt - t)`, coefficientwise `[n+1]_q u_{n+1}`.
pub fn q_difference(u: &TruncatedSeries, q: &QParam) -> Result<TruncatedSeries> {
    let order = u.order();
    if order == 0 {
        return Err(Error::OrderTooLarge { order: 1, truncation: 0 });
    }
    let weights: Vec<BigRational> = (1..=order).map(|n| q_number(n, q)).collect();
    fn go<T: Coeff>(v: &[T], w: &[BigRational]) -> Result<Vec<T>> {
        Ok(v[1..].iter().zip(w).map(|(a, w)| a.clone() * T::from_rational(w)).collect())
    }
    let coeffs: Coeffs = try_map_coeffs!(u.coeffs(), |v| go(v, &weights));
    TruncatedSeries::new(coeffs, u.var())
}

/// One evaluated instance of a q-series identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub q: String,
    pub params: Vec<String>,
    #[serde(skip)]
    pub lhs: Complex64,
    #[serde(skip)]
    pub rhs: Complex64,
    /// `|lhs - rhs| / max(1, |rhs|)`.
    pub error: f64,
}

const IDENTITY_TERMS: usize = 600;
const PRODUCT_TOL: f64 = 1e-16;

fn ratio_of_products(num: &[Complex64], den: &[Complex64], q: &QParam) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for a in num {
        acc *= q_pochhammer_infinite(*a, q, PRODUCT_TOL)?.value;
    }
    for b in den {
        acc /= q_pochhammer_infinite(*b, q, PRODUCT_TOL)?.value;
    }
    Ok(acc)
}

/// `1φ0(a; -; q, z) = (az; q)_∞ / (z; q)_∞`.
pub fn check_q_binomial(a: &BigRational, z: &BigRational, q: &QParam) -> Result<IdentityCheck> {
    let lhs = q_hypergeometric(&[Scalar::Rational(a.clone())], &[], q, &Scalar::Rational(z.clone()), IDENTITY_TERMS)?.value;
    let (af, zf) = (Complex64::new(rational_to_f64(a), 0.0), Complex64::new(rational_to_f64(z), 0.0));
    let rhs = ratio_of_products(&[af * zf], &[zf], q)?;
    Ok(IdentityCheck {
        identity: "q-binomial",
        q: q.to_string(),
        params: vec![a.to_string(), z.to_string()],
        lhs,
        rhs,
        error: (lhs - rhs).norm() / rhs.norm().max(1.0),
    })
}

/// `2φ1(a, b; c; q, z) = (b, az; q)_∞ / (c, z; q)_∞ · 2φ1(c/b, z; az; q, b)`.
pub fn check_heine(a: &BigRational, b: &BigRational, c: &BigRational, z: &BigRational, q: &QParam) -> Result<IdentityCheck> {
    let s = |x: &BigRational| Scalar::Rational(x.clone());
    let f = |x: &BigRational| Complex64::new(rational_to_f64(x), 0.0);
    let lhs = q_hypergeometric(&[s(a), s(b)], &[s(c)], q, &s(z), IDENTITY_TERMS)?.value;
    let az = a * z;
    let inner = q_hypergeometric(&[s(&(c / b)), s(z)], &[s(&az)], q, &s(b), IDENTITY_TERMS)?.value;
    let rhs = ratio_of_products(&[f(b), f(&az)], &[f(c), f(z)], q)? * inner;
    Ok(IdentityCheck {
        identity: "heine",
        q: q.to_string(),
        params: vec![a.to_string(), b.to_string(), c.to_string(), z.to_string()],
        lhs,
        rhs,
        error: (lhs - rhs).norm() / rhs.norm().max(1.0),
    })
}

/// The standard grids: nine parameter points per identity for each of `q = 1/4, 1/2, 3/4`.
pub fn identity_suite() -> Result<Vec<IdentityCheck>> {
    let r = |s: &str| parse_rational(s).expect("literal");
    let mut out = Vec::new();
    for qs in ["1/4", "1/2", "3/4"] {
        let q = QParam::parse(qs)?;
        for a in ["1/3", "-1/2", "2"] {
            for z in ["1/5", "-1/3", "1/2"] {
                out.push(check_q_binomial(&r(a), &r(z), &q)?);
            }
        }
        for a in ["1/2", "-1/3", "3/2"] {
            for (b, c, z) in [("1/3", "1/5", "1/4"), ("-1/4", "2/3", "-1/2"), ("1/2", "-1/3", "1/3")] {
                out.push(check_heine(&r(a), &r(b), &r(c), &r(z), &q)?);
            }
        }
    }
    Ok(out)
}
