//! Residue-series evaluation of the q-Borel boundary map and its inverse,
//! the q-Laplace initial map.
//!
//! For `φ(z) = Σ c_n z^n` the boundary map produces `ψ̃(t) = Σ c_n t^n / [n]_q!`,
//! summed here through the poles of `1/((1-q)t/ζ; q)_∞`:
//!
//! ```text
//! ψ̃(t) = Σ_n φ((1-q) t q^n) (-1)^n q^{n(n+1)/2} / ((q;q)_n (q;q)_∞)
//! φ(z)  = (q;q)_∞ Σ_n ψ̃(z q^n / (1-q)) q^n / (q;q)_n
//! ```

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcalc::{q_pochhammer_infinite, QParam};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

type Evaluator = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// A deterministic complex function that can be sampled pointwise.
#[derive(Clone)]
pub struct AnalyticSample {
    evaluator: Arc<Evaluator>,
    pub domain_note: String,
}

impl fmt::Debug for AnalyticSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticSample").field("domain_note", &self.domain_note).finish()
    }
}

impl AnalyticSample {
    pub fn new<F>(domain_note: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self { evaluator: Arc::new(f), domain_note: domain_note.into() }
    }

    /// `numer(z) / denom(z)` with ascending coefficient lists.
    pub fn rational(numer: &[Scalar], denom: &[Scalar]) -> Self {
        let n: Vec<Complex64> = numer.iter().map(Scalar::to_complex).collect();
        let d: Vec<Complex64> = denom.iter().map(Scalar::to_complex).collect();
        let note = format!("rational function of degrees ({}, {})", n.len().saturating_sub(1), d.len().saturating_sub(1));
        Self::new(note, move |z| {
            let den = crate::numeric::horner_c(&d, z);
            if den.norm() == 0.0 {
                return Err(Error::Evaluation { point: z.to_string(), reason: "pole".into() });
            }
            Ok(crate::numeric::horner_c(&n, z) / den)
        })
    }

    /// A truncated series, refusing points beyond `0.9` of its estimated radius.
    pub fn from_series(series: &TruncatedSeries) -> Self {
        let coeffs = series.to_complex();
        let radius = cauchy_hadamard_radius(&series.coeffs().ln_abs());
        let limit = 0.9 * radius;
        Self::new(format!("truncated series, |z| < {limit:.6e}"), move |z| {
            if z.norm() > limit {
                return Err(Error::Evaluation {
                    point: z.to_string(),
                    reason: format!("outside 0.9 x estimated radius {radius:.6e}"),
                });
            }
            Ok(crate::numeric::horner_c(&coeffs, z))
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = (self.evaluator)(z)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Evaluation { point: z.to_string(), reason: "non-finite value".into() });
        }
        Ok(v)
    }
}

/// Radius of convergence from a fit of `ln|c_n| ≈ α - n ln R` over the upper half.
pub fn cauchy_hadamard_radius(ln_abs: &[f64]) -> f64 {
    let n = ln_abs.len().saturating_sub(1);
    let (rows, y): (Vec<Vec<f64>>, Vec<f64>) = (n / 2..=n)
        .filter(|&i| ln_abs[i].is_finite())
        .map(|i| (vec![1.0, i as f64], ln_abs[i]))
        .unzip();
    if rows.len() < 2 {
        return f64::INFINITY;
    }
    match crate::numeric::least_squares(&rows, &y) {
        Some((beta, _)) => (-beta[1]).exp(),
        None => f64::INFINITY,
    }
}

const MAX_TERMS: usize = 100_000;

/// Boundary values `ψ̃(t) = u(t, 0)` from the initial datum `φ`.
pub fn q_borel_boundary(phi: &AnalyticSample, q: &QParam, t: Complex64, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    if t.norm() == 0.0 || q.is_zero() {
        // all sample points collapse to (1-q)t with total weight 1
        let qf = q.to_f64();
        return phi.eval(t * (1.0 - qf));
    }
    let qf = q.to_f64();
    let euler = q_pochhammer_infinite(Complex64::new(qf, 0.0), q, tol * 1e-3)?.value.re;
    let base = t * (1.0 - qf);
    let mut sum = Complex64::new(0.0, 0.0);
    // w_n = (-1)^n q^{n(n+1)/2} / (q;q)_n, updated by w_{n+1} = -w_n q^{n+1} / (1 - q^{n+1})
    let mut weight = 1.0f64;
    let mut qn = 1.0f64;
    for n in 0..MAX_TERMS {
        let value = phi.eval(base * qn)?;
        let term = value * weight / euler;
        sum += term;
        let q_next = qn * qf;
        let next_weight = -weight * q_next / (1.0 - q_next);
        // the weights decay super-geometrically, so a small next weight bounds the tail
        if n > 0 && (term.norm() < tol && (next_weight / euler).abs() * value.norm().max(1.0) < tol) {
            return Ok(sum);
        }
        weight = next_weight;
        qn = q_next;
    }
    Err(Error::NoConvergence(MAX_TERMS))
}

/// Initial datum `φ(z) = u(0, z)` from boundary values `ψ̃`.
pub fn q_laplace_initial(psi: &AnalyticSample, q: &QParam, z: Complex64, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let qf = q.to_f64();
    if z.norm() == 0.0 || q.is_zero() {
        return psi.eval(z / (1.0 - qf));
    }
    let euler = q_pochhammer_infinite(Complex64::new(qf, 0.0), q, tol * 1e-3)?.value.re;
    let base = z / (1.0 - qf);
    let mut sum = Complex64::new(0.0, 0.0);
    // w_n = q^n / (q;q)_n
    let mut weight = 1.0f64;
    let mut qn = 1.0f64;
    for _ in 0..MAX_TERMS {
        let value = psi.eval(base * qn)?;
        let term = value * weight * euler;
        sum += term;
        let q_next = qn * qf;
        weight *= qf / (1.0 - q_next);
        qn = q_next;
        // geometric decay: remaining terms are bounded by |term| q / (1 - q)
        if term.norm() / (1.0 - qf) < tol {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence(MAX_TERMS))
}
