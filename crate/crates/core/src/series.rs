//! Truncated univariate power series and the two-variable [`BiSeries`].

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Coeff, GaussRat, Scalar, ScalarMode, Weight};

/// Variable tag of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    #[default]
    T,
    Z,
}

impl Var {
    pub fn symbol(self) -> char {
        match self {
            Var::T => 't',
            Var::Z => 'z',
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Coefficient storage: one vector in exactly one mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeffs {
    Rational(Vec<BigRational>),
    Gaussian(Vec<GaussRat>),
    Float(Vec<Complex64>),
}

/// Runs a generic body on the typed coefficient vector, rebuilding the same variant.
#[macro_export]
#[doc(hidden)]
macro_rules! map_coeffs {
    ($c:expr, |$x:ident| $body:expr) => {
        match $c {
            $crate::series::Coeffs::Rational($x) => $crate::series::Coeffs::Rational($body),
            $crate::series::Coeffs::Gaussian($x) => $crate::series::Coeffs::Gaussian($body),
            $crate::series::Coeffs::Float($x) => $crate::series::Coeffs::Float($body),
        }
    };
}

/// Like `map_coeffs!` but the body returns `Result<Vec<_>>`.
#[macro_export]
#[doc(hidden)]
macro_rules! try_map_coeffs {
    ($c:expr, |$x:ident| $body:expr) => {
        match $c {
            $crate::series::Coeffs::Rational($x) => $crate::series::Coeffs::Rational($body?),
            $crate::series::Coeffs::Gaussian($x) => $crate::series::Coeffs::Gaussian($body?),
            $crate::series::Coeffs::Float($x) => $crate::series::Coeffs::Float($body?),
        }
    };
}

/// Runs a generic body on two coefficient vectors of the same mode.
#[macro_export]
#[doc(hidden)]
macro_rules! zip_coeffs {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            ($crate::series::Coeffs::Rational($x), $crate::series::Coeffs::Rational($y)) => {
                Ok($crate::series::Coeffs::Rational($body))
            }
            ($crate::series::Coeffs::Gaussian($x), $crate::series::Coeffs::Gaussian($y)) => {
                Ok($crate::series::Coeffs::Gaussian($body))
            }
            ($crate::series::Coeffs::Float($x), $crate::series::Coeffs::Float($y)) => {
                Ok($crate::series::Coeffs::Float($body))
            }
            (a, b) => Err($crate::error::Error::ModeMismatch(a.mode(), b.mode())),
        }
    };
}

impl Coeffs {
    pub fn mode(&self) -> ScalarMode {
        match self {
            Coeffs::Rational(_) => ScalarMode::ExactRational,
            Coeffs::Gaussian(_) => ScalarMode::ExactGaussian,
            Coeffs::Float(_) => ScalarMode::ComplexFloat,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Coeffs::Rational(v) => v.len(),
            Coeffs::Gaussian(v) => v.len(),
            Coeffs::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, n: usize) -> Option<Scalar> {
        match self {
            Coeffs::Rational(v) => v.get(n).cloned().map(Scalar::Rational),
            Coeffs::Gaussian(v) => v.get(n).cloned().map(Scalar::Gaussian),
            Coeffs::Float(v) => v.get(n).copied().map(Scalar::Float),
        }
    }

    pub fn zeros(mode: ScalarMode, len: usize) -> Coeffs {
        match mode {
            ScalarMode::ExactRational => Coeffs::Rational(vec![num_traits::zero(); len]),
            ScalarMode::ExactGaussian => Coeffs::Gaussian(vec![num_traits::zero(); len]),
            ScalarMode::ComplexFloat => Coeffs::Float(vec![num_traits::zero(); len]),
        }
    }

    /// Collects scalars that must all share one mode.
    pub fn from_scalars(values: &[Scalar]) -> Result<Coeffs> {
        let first = values.first().ok_or(Error::WindowTooShort { needed: 1, have: 0 })?;
        fn collect<T: Coeff>(values: &[Scalar]) -> Result<Vec<T>> {
            values
                .iter()
                .map(|s| T::from_scalar(s).ok_or(Error::ModeMismatch(T::MODE, s.mode())))
                .collect()
        }
        Ok(match first.mode() {
            ScalarMode::ExactRational => Coeffs::Rational(collect(values)?),
            ScalarMode::ExactGaussian => Coeffs::Gaussian(collect(values)?),
            ScalarMode::ComplexFloat => Coeffs::Float(collect(values)?),
        })
    }

    pub fn to_scalars(&self) -> Vec<Scalar> {
        (0..self.len()).filter_map(|n| self.get(n)).collect()
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Coeffs::Rational(v) => v.iter().map(Coeff::to_complex).collect(),
            Coeffs::Gaussian(v) => v.iter().map(Coeff::to_complex).collect(),
            Coeffs::Float(v) => v.clone(),
        }
    }

    pub fn ln_abs(&self) -> Vec<f64> {
        match self {
            Coeffs::Rational(v) => v.iter().map(Coeff::ln_abs).collect(),
            Coeffs::Gaussian(v) => v.iter().map(Coeff::ln_abs).collect(),
            Coeffs::Float(v) => v.iter().map(Coeff::ln_abs).collect(),
        }
    }

    pub fn args(&self) -> Vec<f64> {
        match self {
            Coeffs::Rational(v) => v.iter().map(Coeff::arg).collect(),
            Coeffs::Gaussian(v) => v.iter().map(Coeff::arg).collect(),
            Coeffs::Float(v) => v.iter().map(Coeff::arg).collect(),
        }
    }

    pub fn truncated(&self, len: usize) -> Coeffs {
        map_coeffs!(self, |v| v[..len.min(v.len())].to_vec())
    }

    /// Multiplies coefficient `n` by `weights[n]`; exact modes need exact weights.
    pub fn scale_by(&self, weights: &[Weight]) -> Result<Coeffs> {
        fn go<T: Coeff>(v: &[T], w: &[Weight]) -> Result<Vec<T>> {
            v.iter()
                .zip(w)
                .enumerate()
                .map(|(n, (a, w))| Ok(a.clone() * T::from_weight(w).ok_or(Error::InexactWeight(n))?))
                .collect()
        }
        Ok(try_map_coeffs!(self, |v| go(v, weights)))
    }
}

/// `Σ_{k≤n} a_k b_{n-k}` for `n < len`.
pub(crate) fn convolve<T: Coeff>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    (0..len)
        .map(|n| {
            (0..=n).fold(T::zero(), |acc, k| acc + a[k].clone() * b[n - k].clone())
        })
        .collect()
}

pub(crate) fn horner<T: Coeff>(a: &[T], x: &T) -> T {
    a.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Taylor coefficients of `numer/denom` up to index `len-1`.
pub(crate) fn divide_series<T: Coeff>(numer: &[T], denom: &[T], len: usize) -> Result<Vec<T>> {
    let d0 = denom.first().cloned().unwrap_or_else(T::zero);
    if d0.is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let mut out: Vec<T> = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = numer.get(n).cloned().unwrap_or_else(T::zero);
        for k in 1..=n.min(denom.len().saturating_sub(1)) {
            acc = acc - denom[k].clone() * out[n - k].clone();
        }
        out.push(acc / d0.clone());
    }
    Ok(out)
}

/// A power series truncated at order `N` (coefficients `0..=N`).
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Coeffs,
    var: Var,
}

impl TruncatedSeries {
    pub fn new(coeffs: Coeffs, var: Var) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::WindowTooShort { needed: 1, have: 0 });
        }
        Ok(Self { coeffs, var })
    }

    pub fn from_scalars(values: &[Scalar], var: Var) -> Result<Self> {
        Self::new(Coeffs::from_scalars(values)?, var)
    }

    pub fn from_rationals(values: Vec<BigRational>, var: Var) -> Result<Self> {
        Self::new(Coeffs::Rational(values), var)
    }

    pub fn from_complex(values: Vec<Complex64>, var: Var) -> Result<Self> {
        Self::new(Coeffs::Float(values), var)
    }

    pub fn zero(mode: ScalarMode, order: usize, var: Var) -> Self {
        Self { coeffs: Coeffs::zeros(mode, order + 1), var }
    }

    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Coeffs {
        self.coeffs
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn mode(&self) -> ScalarMode {
        self.coeffs.mode()
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Option<Scalar> {
        self.coeffs.get(n)
    }

    pub fn rationals(&self) -> Option<&[BigRational]> {
        match &self.coeffs {
            Coeffs::Rational(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs.to_complex()
    }

    /// Same series in float mode.
    pub fn to_float(&self) -> TruncatedSeries {
        Self { coeffs: Coeffs::Float(self.coeffs.to_complex()), var: self.var }
    }

    pub fn truncate(&self, order: usize) -> TruncatedSeries {
        Self { coeffs: self.coeffs.truncated(order + 1), var: self.var }
    }

    fn check_compatible(&self, other: &TruncatedSeries) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch(self.var.symbol(), other.var.symbol()));
        }
        if self.mode() != other.mode() {
            return Err(Error::ModeMismatch(self.mode(), other.mode()));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = zip_coeffs!(&self.coeffs, &other.coeffs, |a, b| {
            a.iter().zip(b).take(len).map(|(x, y)| x.clone() + y.clone()).collect()
        })?;
        Ok(Self { coeffs, var: self.var })
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = zip_coeffs!(&self.coeffs, &other.coeffs, |a, b| {
            a.iter().zip(b).take(len).map(|(x, y)| x.clone() - y.clone()).collect()
        })?;
        Ok(Self { coeffs, var: self.var })
    }

    pub fn scale(&self, c: &Scalar) -> Result<TruncatedSeries> {
        fn go<T: Coeff>(v: &[T], c: &Scalar) -> Result<Vec<T>> {
            let c = T::from_scalar(c).ok_or(Error::ModeMismatch(T::MODE, c.mode()))?;
            Ok(v.iter().map(|x| x.clone() * c.clone()).collect())
        }
        Ok(Self { coeffs: try_map_coeffs!(&self.coeffs, |v| go(v, c)), var: self.var })
    }

    /// Cauchy product truncated at `min(N_a, N_b)`.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = zip_coeffs!(&self.coeffs, &other.coeffs, |a, b| convolve(a, b, len))?;
        Ok(Self { coeffs, var: self.var })
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        fn go<T: Coeff>(v: &[T], x: &Scalar) -> Result<Scalar> {
            let x = T::from_scalar(x).ok_or(Error::ModeMismatch(T::MODE, x.mode()))?;
            Ok(horner(v, &x).into_scalar())
        }
        match &self.coeffs {
            Coeffs::Rational(v) => go(v, x),
            Coeffs::Gaussian(v) => go(v, x),
            Coeffs::Float(v) => go(v, x),
        }
    }

    /// Float evaluation at a complex point regardless of mode.
    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        horner(&self.to_complex(), &x)
    }
}

/// `a·b` truncated at `min(N_a, N_b)`.
pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.mul(b)
}

pub fn series_eval(a: &TruncatedSeries, x: &Scalar) -> Result<Scalar> {
    a.eval(x)
}

/// Taylor expansion of `numer/denom` to order `order`.
pub fn rational_series(
    numer: &[Scalar],
    denom: &[Scalar],
    order: usize,
    var: Var,
) -> Result<TruncatedSeries> {
    let n = Coeffs::from_scalars(numer)?;
    let d = Coeffs::from_scalars(denom)?;
    let coeffs = match (&n, &d) {
        (Coeffs::Rational(a), Coeffs::Rational(b)) => Coeffs::Rational(divide_series(a, b, order + 1)?),
        (Coeffs::Gaussian(a), Coeffs::Gaussian(b)) => Coeffs::Gaussian(divide_series(a, b, order + 1)?),
        (Coeffs::Float(a), Coeffs::Float(b)) => Coeffs::Float(divide_series(a, b, order + 1)?),
        (a, b) => return Err(Error::ModeMismatch(a.mode(), b.mode())),
    };
    TruncatedSeries::new(coeffs, var)
}

/// An element of `O(D)[[t]]`: one z-series per power of t.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    t_coeffs: Vec<TruncatedSeries>,
}

impl BiSeries {
    pub fn new(t_coeffs: Vec<TruncatedSeries>) -> Result<Self> {
        let first = t_coeffs.first().ok_or(Error::WindowTooShort { needed: 1, have: 0 })?;
        let (order, mode) = (first.order(), first.mode());
        for s in &t_coeffs {
            if s.mode() != mode {
                return Err(Error::ModeMismatch(mode, s.mode()));
            }
            if s.var() != Var::Z {
                return Err(Error::VariableMismatch('z', s.var().symbol()));
            }
            if s.order() != order {
                return Err(Error::InvalidProblem(format!(
                    "z-series orders differ: {} vs {}",
                    order,
                    s.order()
                )));
            }
        }
        Ok(Self { t_coeffs })
    }

    pub fn t_coeffs(&self) -> &[TruncatedSeries] {
        &self.t_coeffs
    }

    /// `(N_t, N_z)`.
    pub fn orders(&self) -> (usize, usize) {
        (self.t_coeffs.len() - 1, self.t_coeffs[0].order())
    }

    pub fn mode(&self) -> ScalarMode {
        self.t_coeffs[0].mode()
    }

    /// `u(t, 0)` as a t-series.
    pub fn trace_z0(&self) -> TruncatedSeries {
        let values: Vec<Scalar> =
            self.t_coeffs.iter().map(|s| s.coeff(0).expect("nonempty z-series")).collect();
        TruncatedSeries::from_scalars(&values, Var::T).expect("uniform mode")
    }

    /// `u(0, z)`.
    pub fn trace_t0(&self) -> &TruncatedSeries {
        &self.t_coeffs[0]
    }

    /// Multiplies the n-th t-coefficient by `weights[n]`.
    pub fn scale_t(&self, weights: &[Weight]) -> Result<BiSeries> {
        let t_coeffs = self
            .t_coeffs
            .iter()
            .zip(weights)
            .enumerate()
            .map(|(n, (s, w))| {
                let coeffs = s.coeffs().scale_by(&vec![w.clone(); s.order() + 1]).map_err(|e| match e {
                    Error::InexactWeight(_) => Error::InexactWeight(n),
                    e => e,
                })?;
                TruncatedSeries::new(coeffs, Var::Z)
            })
            .collect::<Result<Vec<_>>>()?;
        BiSeries::new(t_coeffs)
    }

    pub fn truncate(&self, n_t: usize, n_z: usize) -> BiSeries {
        BiSeries {
            t_coeffs: self.t_coeffs.iter().take(n_t + 1).map(|s| s.truncate(n_z)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn rats(v: &[&str]) -> Vec<BigRational> {
        v.iter().map(|s| parse_rational(s).unwrap()).collect()
    }

    fn series(v: &[&str]) -> TruncatedSeries {
        TruncatedSeries::from_rationals(rats(v), Var::T).unwrap()
    }

    fn scalars(v: &[&str]) -> Vec<Scalar> {
        rats(v).into_iter().map(Scalar::Rational).collect()
    }

    #[test]
    fn difference_of_squares() {
        let p = series(&["1", "1", "0"]).mul(&series(&["1", "-1", "0"])).unwrap();
        assert_eq!(p, series(&["1", "0", "-1"]));
    }

    #[test]
    fn multiplicative_identity() {
        let a = series(&["3", "-1/2", "7/9", "2"]);
        let one = series(&["1", "0", "0", "0"]);
        assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn geometric_times_one_minus_t() {
        let geo = series(&["1"; 7]);
        let p = geo.mul(&series(&["1", "-1", "0", "0", "0", "0", "0"])).unwrap();
        // brute-force convolution
        let a = rats(&["1"; 7]);
        let b = rats(&["1", "-1", "0", "0", "0", "0", "0"]);
        let mut expected = vec![BigRational::zero(); 7];
        for i in 0..7 {
            for j in 0..7 {
                if i + j < 7 {
                    expected[i + j] += &a[i] * &b[j];
                }
            }
        }
        assert_eq!(p.rationals().unwrap(), expected.as_slice());
        assert_eq!(p, series(&["1", "0", "0", "0", "0", "0", "0"]));
    }

    #[test]
    fn product_truncates_to_shorter() {
        let p = series(&["1", "1", "1", "1"]).mul(&series(&["1", "1"])).unwrap();
        assert_eq!(p.order(), 1);
    }

    #[test]
    fn mismatches_are_errors() {
        let a = series(&["1", "1"]);
        let b = a.to_float();
        assert!(matches!(a.mul(&b), Err(Error::ModeMismatch(..))));
        let c = a.clone().with_var(Var::Z);
        assert!(matches!(a.mul(&c), Err(Error::VariableMismatch('t', 'z'))));
    }

    #[test]
    fn evaluation() {
        let a = series(&["1", "1", "1"]);
        let half = Scalar::Rational(parse_rational("1/2").unwrap());
        assert_eq!(a.eval(&half).unwrap(), Scalar::Rational(parse_rational("7/4").unwrap()));
        let b = series(&["-5/7", "3", "11"]);
        assert_eq!(b.eval(&Scalar::int(0)).unwrap(), Scalar::Rational(parse_rational("-5/7").unwrap()));
        let geo = series(&["1"; 21]);
        let expected = BigRational::from_integer(2.into())
            - BigRational::new(1.into(), num_bigint::BigInt::from(2).pow(20));
        assert_eq!(geo.eval(&half).unwrap(), Scalar::Rational(expected));
    }

    #[test]
    fn rational_series_examples() {
        let s = rational_series(&scalars(&["1"]), &scalars(&["1", "-1"]), 4, Var::T).unwrap();
        assert_eq!(s, series(&["1"; 5]));
        let s = rational_series(&scalars(&["1", "2"]), &scalars(&["1", "0", "-1"]), 5, Var::T).unwrap();
        assert_eq!(s, series(&["1", "2", "1", "2", "1", "2"]));
        // 1/(1-t)^2 against the convolution of two geometric series
        let s = rational_series(&scalars(&["1"]), &scalars(&["1", "-2", "1"]), 3, Var::T).unwrap();
        let geo = series(&["1"; 4]);
        assert_eq!(s, geo.mul(&geo).unwrap());
        assert_eq!(s, series(&["1", "2", "3", "4"]));
        let err = rational_series(&scalars(&["1"]), &scalars(&["0", "1"]), 3, Var::T);
        assert!(matches!(err, Err(Error::ZeroConstantTerm)));
    }

    #[test]
    fn gaussian_rational_series() {
        let i = GaussRat::new(BigRational::zero(), BigRational::one());
        let one = GaussRat::new(BigRational::one(), BigRational::zero());
        // 1/(1 - i t) = Σ i^n t^n
        let s = rational_series(
            &[Scalar::Gaussian(one.clone())],
            &[Scalar::Gaussian(one.clone()), Scalar::Gaussian(-i.clone())],
            4,
            Var::T,
        )
        .unwrap();
        let expected: Vec<Scalar> = (0..5)
            .map(|n| Scalar::Gaussian(num_traits::pow(i.clone(), n)))
            .collect();
        assert_eq!(s.coeffs().to_scalars(), expected);
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-20i64..20, 1i64..9).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
    }

    fn exact_series(len: usize) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec(small_rational(), len)
            .prop_map(|v| TruncatedSeries::from_rationals(v, Var::T).unwrap())
    }

    proptest! {
        #[test]
        fn ring_laws(a in exact_series(8), b in exact_series(8), c in exact_series(8)) {
            let lhs = a.add(&b).unwrap().add(&c).unwrap();
            let rhs = a.add(&b.add(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        }

        #[test]
        fn rational_series_times_denominator(n in exact_series(4), mut d in exact_series(4)) {
            let mut dv = d.rationals().unwrap().to_vec();
            if dv[0].is_zero() {
                dv[0] = BigRational::one();
            }
            d = TruncatedSeries::from_rationals(dv.clone(), Var::T).unwrap();
            let numer: Vec<Scalar> = n.coeffs().to_scalars();
            let denom: Vec<Scalar> = d.coeffs().to_scalars();
            let order = 10;
            let s = rational_series(&numer, &denom, order, Var::T).unwrap();
            let mut dpad = dv;
            dpad.resize(order + 1, BigRational::zero());
            let back = s.mul(&TruncatedSeries::from_rationals(dpad, Var::T).unwrap()).unwrap();
            let mut npad = n.rationals().unwrap().to_vec();
            npad.resize(order + 1, BigRational::zero());
            prop_assert_eq!(back.rationals().unwrap(), npad.as_slice());
        }

        #[test]
        fn evaluation_is_multiplicative(a in exact_series(5), b in exact_series(5), x in small_rational()) {
            // the product of two degree-4 polynomials only agrees up to degree 4, so pad first
            let pad = |s: &TruncatedSeries| {
                let mut v = s.rationals().unwrap().to_vec();
                v.resize(9, BigRational::zero());
                TruncatedSeries::from_rationals(v, Var::T).unwrap()
            };
            let x = Scalar::Rational(x);
            let prod = pad(&a).mul(&pad(&b)).unwrap().eval(&x).unwrap();
            let expected = a.eval(&x).unwrap().try_mul(&b.eval(&x).unwrap()).unwrap();
            prop_assert_eq!(prod, expected);
        }
    }
}
