//! Moment sequences: a small closed catalog, order estimation, kernel series
//! and the preserves-summability check.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{least_squares, ln_factorials, ln_gamma};
use crate::probe::{stable_poles, PoleConfig, Pole};
use crate::qcalc::{q_factorials, QParam};
use crate::scalar::{format_rational, rational_from_json, Weight};
use crate::series::{Coeffs, TruncatedSeries, Var};

/// Expression tree over catalog atoms.
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSpec {
    One,
    /// `a^n`, `a > 0`.
    Geometric(BigRational),
    /// `n!`.
    Factorial,
    /// `Γ(1 + n/k)`.
    GammaK(f64),
    /// `[n]_q!`.
    QFactorial(QParam),
    /// `1, odd, 1, odd, …`. The even value must be 1 so that `m(0) = 1`.
    Interleave { even: BigRational, odd: BigRational },
    Product(Vec<SequenceSpec>),
    Inverse(Box<SequenceSpec>),
}

/// A positive sequence with `m(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    spec: SequenceSpec,
}

impl MomentSequence {
    pub fn new(spec: SequenceSpec) -> Result<Self> {
        validate(&spec)?;
        Ok(Self { spec })
    }

    pub fn one() -> Self {
        Self { spec: SequenceSpec::One }
    }

    pub fn factorial() -> Self {
        Self { spec: SequenceSpec::Factorial }
    }

    pub fn q_factorial(q: QParam) -> Self {
        Self { spec: SequenceSpec::QFactorial(q) }
    }

    pub fn gamma_k(k: f64) -> Result<Self> {
        Self::new(SequenceSpec::GammaK(k))
    }

    pub fn geometric(a: BigRational) -> Result<Self> {
        Self::new(SequenceSpec::Geometric(a))
    }

    pub fn interleave(even: BigRational, odd: BigRational) -> Result<Self> {
        Self::new(SequenceSpec::Interleave { even, odd })
    }

    pub fn product(factors: Vec<MomentSequence>) -> Self {
        Self { spec: SequenceSpec::Product(factors.into_iter().map(|m| m.spec).collect()) }
    }

    pub fn inverse(&self) -> Self {
        Self { spec: SequenceSpec::Inverse(Box::new(self.spec.clone())) }
    }

    pub fn times(&self, other: &MomentSequence) -> Self {
        Self::product(vec![self.clone(), other.clone()])
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    /// `m(0), …, m(n_max)`. Values are computed in one pass; there is no shared cache.
    pub fn values(&self, n_max: usize) -> Vec<Weight> {
        values_of(&self.spec, n_max)
    }

    /// `m(n)`.
    pub fn value(&self, n: usize) -> Weight {
        self.values(n).pop().expect("nonempty")
    }

    /// `ln m(n)` for `n = 0..=n_max`, finite even where `m(n)` overflows f64.
    pub fn ln_values(&self, n_max: usize) -> Vec<f64> {
        ln_values_of(&self.spec, n_max)
    }

    /// Whether every value up to `n_max` is exact.
    pub fn is_exact_up_to(&self, n_max: usize) -> bool {
        self.values(n_max).iter().all(Weight::is_exact)
    }

    /// The order `s` in `m(n) ≍ C^n (n!)^s`, read off the catalog definition.
    pub fn nominal_order(&self) -> f64 {
        nominal_order_of(&self.spec)
    }

    pub fn to_json(&self) -> Value {
        spec_to_json(&self.spec)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        Self::new(spec_from_json(value)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }
}

impl fmt::Display for MomentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl Serialize for MomentSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        MomentSequence::from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn validate(spec: &SequenceSpec) -> Result<()> {
    match spec {
        SequenceSpec::One | SequenceSpec::Factorial | SequenceSpec::QFactorial(_) => Ok(()),
        SequenceSpec::Geometric(a) if a.is_positive() => Ok(()),
        SequenceSpec::Geometric(a) => Err(Error::InvalidSequence(format!("geometric base {a} must be positive"))),
        SequenceSpec::GammaK(k) if k.is_finite() && *k > 0.0 => Ok(()),
        SequenceSpec::GammaK(k) => Err(Error::InvalidSequence(format!("gamma_k needs k > 0, got {k}"))),
        SequenceSpec::Interleave { even, odd } => {
            if !even.is_one() {
                return Err(Error::InvalidSequence(format!("interleave even value must be 1 (m(0) = 1), got {even}")));
            }
            if !odd.is_positive() {
                return Err(Error::InvalidSequence(format!("interleave odd value must be positive, got {odd}")));
            }
            Ok(())
        }
        SequenceSpec::Product(fs) => fs.iter().try_for_each(validate),
        SequenceSpec::Inverse(inner) => validate(inner),
    }
}

fn factorials(n_max: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut f = BigInt::one();
    out.push(BigRational::one());
    for n in 1..=n_max {
        f *= n;
        out.push(BigRational::from_integer(f.clone()));
    }
    out
}

/// `Some(k)` when `k` is a positive integer.
fn integral_k(k: f64) -> Option<usize> {
    (k.fract() == 0.0 && k >= 1.0 && k < 1e6).then_some(k as usize)
}

fn values_of(spec: &SequenceSpec, n_max: usize) -> Vec<Weight> {
    let exact = |v: Vec<BigRational>| v.into_iter().map(Weight::Exact).collect();
    match spec {
        SequenceSpec::One => vec![Weight::Exact(BigRational::one()); n_max + 1],
        SequenceSpec::Geometric(a) => {
            let mut out = Vec::with_capacity(n_max + 1);
            let mut p = BigRational::one();
            for _ in 0..=n_max {
                out.push(p.clone());
                p *= a;
            }
            exact(out)
        }
        SequenceSpec::Factorial => exact(factorials(n_max)),
        SequenceSpec::GammaK(k) => {
            let facts = integral_k(*k).map(|ki| factorials(n_max / ki));
            (0..=n_max)
                .map(|n| match (integral_k(*k), &facts) {
                    (Some(ki), Some(f)) if n % ki == 0 => Weight::Exact(f[n / ki].clone()),
                    _ => Weight::Float(ln_gamma(1.0 + n as f64 / k).exp()),
                })
                .collect()
        }
        SequenceSpec::QFactorial(q) => exact(q_factorials(n_max, q)),
        SequenceSpec::Interleave { even, odd } => (0..=n_max)
            .map(|n| Weight::Exact(if n % 2 == 0 { even.clone() } else { odd.clone() }))
            .collect(),
        SequenceSpec::Product(fs) => {
            let mut acc = vec![Weight::Exact(BigRational::one()); n_max + 1];
            for f in fs {
                let v = values_of(f, n_max);
                acc = acc.iter().zip(&v).map(|(a, b)| a.mul(b)).collect();
            }
            acc
        }
        SequenceSpec::Inverse(inner) => values_of(inner, n_max).iter().map(Weight::recip).collect(),
    }
}

fn ln_values_of(spec: &SequenceSpec, n_max: usize) -> Vec<f64> {
    match spec {
        SequenceSpec::GammaK(k) => (0..=n_max).map(|n| ln_gamma(1.0 + n as f64 / k)).collect(),
        SequenceSpec::Factorial => ln_factorials(n_max),
        SequenceSpec::QFactorial(q) => {
            // float route: the exact values carry O(n^2)-bit denominators
            let qf = q.to_f64();
            let mut acc = 0.0;
            let mut qk = 1.0;
            let mut out = vec![0.0];
            for _ in 1..=n_max {
                qk *= qf;
                acc += ((1.0 - qk) / (1.0 - qf)).ln();
                out.push(acc);
            }
            out
        }
        SequenceSpec::Product(fs) => {
            let mut acc = vec![0.0; n_max + 1];
            for f in fs {
                for (a, b) in acc.iter_mut().zip(ln_values_of(f, n_max)) {
                    *a += b;
                }
            }
            acc
        }
        SequenceSpec::Inverse(inner) => ln_values_of(inner, n_max).into_iter().map(|x| -x).collect(),
        other => values_of(other, n_max).iter().map(Weight::ln_abs).collect(),
    }
}

fn spec_to_json(spec: &SequenceSpec) -> Value {
    match spec {
        SequenceSpec::One => json!({"kind": "one"}),
        SequenceSpec::Geometric(a) => json!({"kind": "geometric", "a": format_rational(a)}),
        SequenceSpec::Factorial => json!({"kind": "factorial"}),
        SequenceSpec::GammaK(k) => json!({"kind": "gamma_k", "k": k}),
        SequenceSpec::QFactorial(q) => json!({"kind": "q_factorial", "q": q.to_string()}),
        SequenceSpec::Interleave { even, odd } => {
            json!({"kind": "interleave", "even": format_rational(even), "odd": format_rational(odd)})
        }
        SequenceSpec::Product(fs) => {
            json!({"kind": "product", "factors": fs.iter().map(spec_to_json).collect::<Vec<_>>()})
        }
        SequenceSpec::Inverse(inner) => json!({"kind": "inverse", "of": spec_to_json(inner)}),
    }
}

fn spec_from_json(v: &Value) -> Result<SequenceSpec> {
    let field = |name: &str| v.get(name).ok_or_else(|| Error::Parse(format!("sequence spec missing \"{name}\"")));
    let kind = field("kind")?.as_str().ok_or_else(|| Error::Parse("\"kind\" must be a string".into()))?;
    Ok(match kind {
        "one" => SequenceSpec::One,
        "factorial" => SequenceSpec::Factorial,
        "geometric" => SequenceSpec::Geometric(rational_from_json(field("a")?)?),
        "gamma_k" => SequenceSpec::GammaK(
            field("k")?.as_f64().ok_or_else(|| Error::Parse("\"k\" must be a number".into()))?,
        ),
        "q_factorial" => {
            let q = field("q")?;
            let text = q.as_str().ok_or_else(|| Error::InvalidQ(q.to_string()))?;
            SequenceSpec::QFactorial(QParam::parse(text)?)
        }
        "interleave" => SequenceSpec::Interleave {
            even: rational_from_json(field("even")?)?,
            odd: rational_from_json(field("odd")?)?,
        },
        "product" => SequenceSpec::Product(
            field("factors")?
                .as_array()
                .ok_or_else(|| Error::Parse("\"factors\" must be a list".into()))?
                .iter()
                .map(spec_from_json)
                .collect::<Result<_>>()?,
        ),
        "inverse" => SequenceSpec::Inverse(Box::new(spec_from_json(field("of")?)?)),
        other => return Err(Error::Parse(format!("unknown sequence kind {other:?}"))),
    })
}

fn nominal_order_of(spec: &SequenceSpec) -> f64 {
    match spec {
        SequenceSpec::One | SequenceSpec::Geometric(_) | SequenceSpec::QFactorial(_) | SequenceSpec::Interleave { .. } => 0.0,
        SequenceSpec::Factorial => 1.0,
        SequenceSpec::GammaK(k) => 1.0 / k,
        SequenceSpec::Product(fs) => fs.iter().map(nominal_order_of).sum(),
        SequenceSpec::Inverse(inner) => -nominal_order_of(inner),
    }
}

/// Least-squares order fit `ln x_n ≈ α + βn + s ln n!`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub s_hat: f64,
    /// RMS of the fit residuals.
    pub residual: f64,
    pub window: (usize, usize),
    /// Set when the window held no usable (nonzero) values.
    pub degenerate: bool,
}

/// Fits `s` in `ln_vals[n] ≈ α + βn + s ln n!` over `n ∈ [lo, hi]`, skipping non-finite entries.
pub(crate) fn fit_order(ln_vals: &[f64], lo: usize, hi: usize) -> OrderEstimate {
    let ln_fact = ln_factorials(hi);
    let (rows, y): (Vec<Vec<f64>>, Vec<f64>) = (lo..=hi)
        .filter(|&n| ln_vals[n].is_finite())
        .map(|n| (vec![1.0, n as f64, ln_fact[n]], ln_vals[n]))
        .unzip();
    match least_squares(&rows, &y) {
        Some((beta, rms)) if rows.len() >= 4 => {
            OrderEstimate { s_hat: beta[2], residual: rms, window: (lo, hi), degenerate: false }
        }
        _ => OrderEstimate { s_hat: 0.0, residual: 0.0, window: (lo, hi), degenerate: true },
    }
}

/// Estimates the order `s` of `m(n) ≍ C^n (n!)^s` over `n ∈ [N/2, N]`.
pub fn sequence_order(m: &MomentSequence, n: usize) -> Result<OrderEstimate> {
    if n < 16 {
        return Err(Error::WindowTooShort { needed: 16, have: n });
    }
    Ok(fit_order(&m.ln_values(n), n / 2, n))
}

/// `ψ(t) = Σ t^n / m(n)`; exact when every `m(n)` is exact.
pub fn kernel_series(m: &MomentSequence, order: usize) -> TruncatedSeries {
    let values = m.values(order);
    let coeffs = if values.iter().all(Weight::is_exact) {
        Coeffs::Rational(
            values
                .iter()
                .map(|w| match w {
                    Weight::Exact(r) => r.recip(),
                    Weight::Float(_) => unreachable!(),
                })
                .collect(),
        )
    } else {
        Coeffs::Float(m.ln_values(order).iter().map(|l| Complex64::new((-l).exp(), 0.0)).collect())
    };
    TruncatedSeries::new(coeffs, Var::T).expect("nonempty")
}

/// Outcome of [`preserves_summability`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreservationVerdict {
    #[serde(rename = "PRESERVES-LIKELY")]
    PreservesLikely,
    #[serde(rename = "VIOLATES")]
    Violates,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl fmt::Display for PreservationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PreservationVerdict::PreservesLikely => "PRESERVES-LIKELY",
            PreservationVerdict::Violates => "VIOLATES",
            PreservationVerdict::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreservationReport {
    pub verdict: PreservationVerdict,
    /// Stable poles of `ψ_m`.
    pub kernel_poles: Vec<Pole>,
    /// Stable poles of `ψ_{1/m}`.
    pub inverse_kernel_poles: Vec<Pole>,
    pub diagnostics: Vec<String>,
}

/// Heuristic check that `m` preserves summability: the kernels of `m` and
/// `1/m` may only have singularities on the positive real axis.
pub fn preserves_summability(m: &MomentSequence, order: usize, config: &PoleConfig) -> Result<PreservationReport> {
    if order < 48 {
        return Err(Error::WindowTooShort { needed: 48, have: order });
    }
    let mut diagnostics = Vec::new();
    let mut kernel_poles = |seq: &MomentSequence, label: &str| -> Option<Vec<Pole>> {
        let ln = seq.ln_values(order);
        let coeffs: Vec<Complex64> = ln.iter().map(|l| Complex64::new((-l).exp(), 0.0)).collect();
        match stable_poles(&coeffs, config) {
            Ok(p) => Some(p.poles),
            Err(e) => {
                diagnostics.push(format!("{label}: {e}"));
                None
            }
        }
    };
    let direct = kernel_poles(m, "kernel");
    let inverse = kernel_poles(&m.inverse(), "inverse kernel");
    let (direct, inverse) = match (direct, inverse) {
        (Some(a), Some(b)) => (a, b),
        (a, b) => {
            return Ok(PreservationReport {
                verdict: PreservationVerdict::Inconclusive,
                kernel_poles: a.unwrap_or_default(),
                inverse_kernel_poles: b.unwrap_or_default(),
                diagnostics,
            })
        }
    };
    let off_axis = direct.iter().chain(&inverse).any(|p| p.location.arg().abs() > config.pole_tol);
    let verdict = if off_axis {
        PreservationVerdict::Violates
    } else if direct.is_empty() || inverse.is_empty() {
        diagnostics.push("no stable poles detected in at least one kernel".into());
        PreservationVerdict::Inconclusive
    } else {
        PreservationVerdict::PreservesLikely
    };
    Ok(PreservationReport { verdict, kernel_poles: direct, inverse_kernel_poles: inverse, diagnostics })
}
