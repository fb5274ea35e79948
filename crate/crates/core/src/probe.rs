//! Numeric diagnostics on truncated series.
//!
//! Nothing here decides summability: a finite window of coefficients cannot.
//! The classifier reports a three-valued verdict together with the evidence
//! it used (Borel radius, stable Padé poles, growth along the ray).

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::calculus::moment_borel;
use crate::error::{Error, Result};
use crate::moments::{fit_order, MomentSequence, OrderEstimate};
use crate::numeric::{angle_distance, canonical_angle, horner_c, least_squares, ln_gamma, poly_roots};
use crate::residue::{cauchy_hadamard_radius, AnalyticSample};
use crate::scalar::Coeff;
use crate::series::{Coeffs, TruncatedSeries};

/// Tolerances shared by the summability classifier and the preservation check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleConfig {
    /// Angular tolerance (radians) for "a pole lies on this direction".
    pub pole_tol: f64,
    /// Relative distance within which a pole must persist between the two Padé runs.
    pub stability_rel: f64,
    /// Relative singular-value cutoff for Padé degree reduction.
    pub svd_tol: f64,
    /// Half-opening of the sector around `d` that must be pole free.
    pub sector_half_opening: f64,
    /// Allowed excess of the fitted growth order over `k`.
    pub growth_slack: f64,
}

impl Default for PoleConfig {
    fn default() -> Self {
        Self { pole_tol: 1e-2, stability_rel: 1e-3, svd_tol: 1e-13, sector_half_opening: 0.1, growth_slack: 0.2 }
    }
}

/// A pole of a Padé approximant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub location: Complex64,
}

impl Serialize for Pole {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Pole", 2)?;
        st.serialize_field("re", &self.location.re)?;
        st.serialize_field("im", &self.location.im)?;
        st.end()
    }
}

/// Rational approximant `P(t/scale) / Q(t/scale)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PadeApproximant {
    pub numer: Coeffs,
    pub denom: Coeffs,
    /// Degrees after any reduction.
    pub degrees: (usize, usize),
    /// Variable scaling applied before solving (1 for exact solves).
    pub scale: f64,
    pub poles: Vec<Complex64>,
    /// Ratio of the smallest retained to the largest singular value (float path), 1 for exact solves.
    pub condition: f64,
    pub exact: bool,
}

impl PadeApproximant {
    pub fn eval(&self, t: Complex64) -> Complex64 {
        let s = t / self.scale;
        horner_c(&self.numer.to_complex(), s) / horner_c(&self.denom.to_complex(), s)
    }

    pub fn to_sample(&self) -> AnalyticSample {
        let me = self.clone();
        AnalyticSample::new(format!("Pade approximant [{}/{}]", self.degrees.0, self.degrees.1), move |t| Ok(me.eval(t)))
    }
}

/// `[L/M]` Padé approximant of `u`. Needs `L + M ≤ N`.
///
/// Exact modes solve the linear system exactly; if it is singular they fall
/// back to the float path, which reduces degrees by SVD rank detection.
pub fn pade(u: &TruncatedSeries, l: usize, m: usize) -> Result<PadeApproximant> {
    pade_with(u, l, m, PoleConfig::default().svd_tol)
}

pub fn pade_with(u: &TruncatedSeries, l: usize, m: usize, svd_tol: f64) -> Result<PadeApproximant> {
    if l + m > u.order() {
        return Err(Error::WindowTooShort { needed: l + m + 1, have: u.order() + 1 });
    }
    let exact = match u.coeffs() {
        Coeffs::Rational(v) => exact_pade(v, l, m).map(|(a, b)| (Coeffs::Rational(a), Coeffs::Rational(b))),
        Coeffs::Gaussian(v) => exact_pade(v, l, m).map(|(a, b)| (Coeffs::Gaussian(a), Coeffs::Gaussian(b))),
        Coeffs::Float(_) => None,
    };
    if let Some((numer, denom)) = exact {
        let poles = poly_roots(&denom.to_complex());
        return Ok(PadeApproximant {
            degrees: (numer.len() - 1, denom.len() - 1),
            numer,
            denom,
            scale: 1.0,
            poles,
            condition: 1.0,
            exact: true,
        });
    }
    float_pade(&u.to_complex(), &u.coeffs().ln_abs(), l, m, svd_tol)
}

/// Exact solve with `b_0 = 1`; `None` when the system is singular.
fn exact_pade<T: Coeff>(c: &[T], l: usize, m: usize) -> Option<(Vec<T>, Vec<T>)> {
    let coef = |k: isize| if k < 0 { T::zero() } else { c[k as usize].clone() };
    // Σ_{j=1..M} b_j c_{L+i-j} = -c_{L+i}, i = 1..M
    let mut a: Vec<Vec<T>> = (1..=m)
        .map(|i| {
            let mut row: Vec<T> = (1..=m).map(|j| coef(l as isize + i as isize - j as isize)).collect();
            row.push(-coef((l + i) as isize));
            row
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for k in col..=m {
            a[col][k] = a[col][k].clone() / p.clone();
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..=m {
                    a[r][k] = a[r][k].clone() - f.clone() * a[col][k].clone();
                }
            }
        }
    }
    let mut b = vec![T::one()];
    b.extend(a.iter().map(|row| row[m].clone()));
    let numer: Vec<T> = (0..=l)
        .map(|i| (0..=i.min(m)).fold(T::zero(), |acc, j| acc + b[j].clone() * c[i - j].clone()))
        .collect();
    Some((numer, b))
}

/// Robust Padé in the rescaled variable `s = t / R`, `R` the Cauchy–Hadamard radius.
fn float_pade(c: &[Complex64], ln_abs: &[f64], l: usize, m: usize, svd_tol: f64) -> Result<PadeApproximant> {
    let radius = cauchy_hadamard_radius(&ln_abs[..=l + m]);
    let scale = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
    let ln_scale = scale.ln();
    let c: Vec<Complex64> = (0..=l + m)
        .map(|n| {
            if c[n].is_zero() {
                Complex64::zero()
            } else {
                Complex64::from_polar((ln_abs[n] + n as f64 * ln_scale).exp(), c[n].arg())
            }
        })
        .collect();
    if c.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::SingularPade("non-finite coefficients after rescaling".into()));
    }
    let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::SingularPade("all coefficients vanish".into()));
    }
    let ts = svd_tol * norm;
    let (mut l, mut m) = (l, m);
    let mut condition = 1.0;
    if c[..=l].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() <= ts {
        return Err(Error::SingularPade("numerator block vanishes".into()));
    }
    let b: Vec<Complex64> = loop {
        if m == 0 {
            break vec![Complex64::new(1.0, 0.0)];
        }
        // rows L+1..L+M of the Toeplitz matrix Z[i][j] = c_{i-j}, padded with a zero row
        let toeplitz = DMatrix::from_fn(m + 1, m + 1, |i, j| {
            let row = l + 1 + i;
            if i < m && row >= j {
                c[row - j]
            } else {
                Complex64::zero()
            }
        });
        let svd = toeplitz.svd(false, true);
        let sv = &svd.singular_values;
        let mut order: Vec<usize> = (0..=m).collect();
        order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
        let rank = order.iter().take(m).filter(|&&k| sv[k] > ts).count();
        if rank == m {
            condition = sv[order[m - 1]] / sv[order[0]];
            let v_t = svd.v_t.ok_or_else(|| Error::SingularPade("SVD failed".into()))?;
            let null = order[m];
            break (0..=m).map(|j| v_t[(null, j)].conj()).collect();
        }
        let drop = m - rank;
        l = l.saturating_sub(drop);
        m = rank;
    };
    let mut numer: Vec<Complex64> = (0..=l)
        .map(|i| (0..=i.min(m)).map(|j| b[j] * c[i - j]).sum())
        .collect();
    let mut denom = b;
    // cancel a common power of s
    let lead = denom.iter().position(|x| x.norm() > svd_tol).unwrap_or(0);
    if lead > 0 {
        denom.drain(..lead);
        numer.drain(..lead.min(numer.len().saturating_sub(1)));
    }
    while numer.len() > 1 && numer.last().is_some_and(|x| x.norm() <= ts) {
        numer.pop();
    }
    while denom.len() > 1 && denom.last().is_some_and(|x| x.norm() <= svd_tol) {
        denom.pop();
    }
    let b0 = denom[0];
    if b0.norm() == 0.0 {
        return Err(Error::SingularPade("denominator vanishes at the origin".into()));
    }
    let numer: Vec<Complex64> = numer.iter().map(|x| x / b0).collect();
    let denom: Vec<Complex64> = denom.iter().map(|x| x / b0).collect();
    let poles = poly_roots(&denom).into_iter().map(|p| p * scale).collect();
    Ok(PadeApproximant {
        degrees: (numer.len() - 1, denom.len() - 1),
        numer: Coeffs::Float(numer),
        denom: Coeffs::Float(denom),
        scale,
        poles,
        condition,
        exact: false,
    })
}

/// Poles that persist between the `[N/2-1 / N/2]` and `[N/2 / N/2]` approximants.
#[derive(Clone, Debug)]
pub struct StablePoles {
    pub poles: Vec<Pole>,
    /// The second approximant, used for continuation.
    pub approximant: PadeApproximant,
    pub radius: f64,
}

pub(crate) fn stable_poles(coeffs: &[Complex64], config: &PoleConfig) -> Result<StablePoles> {
    let n = coeffs.len() - 1;
    let half = n / 2;
    let ln_abs: Vec<f64> = coeffs.iter().map(|c| c.norm().ln()).collect();
    let first = float_pade(coeffs, &ln_abs, half.saturating_sub(1), half, config.svd_tol)?;
    let second = float_pade(coeffs, &ln_abs, half, half, config.svd_tol)?;
    let poles = second
        .poles
        .iter()
        .filter(|p| {
            first.poles.iter().any(|q| (*p - q).norm() <= config.stability_rel * p.norm().max(q.norm()))
        })
        .map(|&location| Pole { location })
        .collect::<Vec<_>>();
    let mut poles = poles;
    poles.sort_by(|a, b| a.location.norm().total_cmp(&b.location.norm()).then(a.location.arg().total_cmp(&b.location.arg())));
    Ok(StablePoles { poles, radius: cauchy_hadamard_radius(&ln_abs), approximant: second })
}

/// Fits the Gevrey order `s` in `|a_n| ≤ B C^n (n!)^s` over the upper half window.
pub fn gevrey_estimate(u: &TruncatedSeries) -> Result<OrderEstimate> {
    let n = u.order();
    if n < 32 {
        return Err(Error::WindowTooShort { needed: 33, have: n + 1 });
    }
    Ok(fit_order(&u.coeffs().ln_abs(), n / 2, n))
}

/// Fitted exponential growth order along a ray.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub order: f64,
    pub residual: f64,
}

/// Slope of `ln ln(e + max_{s≤r} |f(s e^{id})|)` against `ln r`.
pub fn growth_order(f: &AnalyticSample, d: f64, r_grid: &[f64]) -> Result<GrowthFit> {
    if r_grid.len() < 2 {
        return Err(Error::WindowTooShort { needed: 2, have: r_grid.len() });
    }
    let dir = Complex64::from_polar(1.0, d);
    let mut running = 0.0f64;
    let mut rows = Vec::with_capacity(r_grid.len());
    let mut y = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let v = f.eval(dir * r).map_err(|_| Error::NonFinite(r))?;
        if !v.norm().is_finite() {
            return Err(Error::NonFinite(r));
        }
        running = running.max(v.norm());
        let g = (std::f64::consts::E + running).ln().ln();
        rows.push(vec![1.0, r.ln()]);
        y.push(g);
    }
    let (beta, rms) = least_squares(&rows, &y).ok_or(Error::WindowTooShort { needed: 2, have: rows.len() })?;
    Ok(GrowthFit { order: beta[1], residual: rms })
}

/// Geometric grid of `count` radii from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (count.max(2) - 1) as f64;
    (0..count).map(|i| lo * (step * i as f64).exp()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "SUMMABLE-LIKELY")]
    SummableLikely,
    #[serde(rename = "NONSUMMABLE-LIKELY")]
    NonsummableLikely,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SummableLikely => "SUMMABLE-LIKELY",
            Verdict::NonsummableLikely => "NONSUMMABLE-LIKELY",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    /// Estimated radius of convergence of the Borel transform.
    pub radius: f64,
    pub poles: Vec<Pole>,
    /// `(order, residual)` of the growth fit along `d`.
    pub growth_fit: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub k: f64,
    pub d: f64,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

/// Borel coefficients `a_n / Γ(1 + n/k)` as floats.
pub fn borel_coefficients(u: &TruncatedSeries, k: f64) -> Result<Vec<Complex64>> {
    let gamma = MomentSequence::gamma_k(k)?;
    if !matches!(u.coeffs(), Coeffs::Float(_)) {
        if let Ok(b) = moment_borel(&gamma, u) {
            return Ok(b.to_complex());
        }
    }
    // log route: |a_n| and Γ(1 + n/k) may both overflow f64 on their own
    let ln_abs = u.coeffs().ln_abs();
    let args = u.coeffs().args();
    Ok((0..=u.order())
        .map(|n| {
            if ln_abs[n] == f64::NEG_INFINITY {
                Complex64::zero()
            } else {
                Complex64::from_polar((ln_abs[n] - ln_gamma(1.0 + n as f64 / k)).exp(), args[n])
            }
        })
        .collect())
}

/// Three-valued heuristic for `k`-summability of `u` in direction `d`.
pub fn classify_summability(u: &TruncatedSeries, k: f64, d: f64, config: &PoleConfig) -> Result<ProbeReport> {
    if u.order() < 48 {
        return Err(Error::WindowTooShort { needed: 49, have: u.order() + 1 });
    }
    if !(k > 0.0) {
        return Err(Error::InvalidSequence(format!("k must be positive, got {k}")));
    }
    let d = canonical_angle(d);
    let borel = borel_coefficients(u, k)?;
    let report = |verdict, evidence| ProbeReport { k, d, verdict, evidence };

    if borel.iter().skip(borel.len() / 2).all(|c| c.is_zero()) {
        // polynomial Borel transform: entire, polynomial growth
        let evidence = Evidence { radius: f64::INFINITY, poles: Vec::new(), growth_fit: (0.0, 0.0) };
        return Ok(report(Verdict::SummableLikely, evidence));
    }

    let stable = stable_poles(&borel, config)?;
    let radius = stable.radius;
    let nearest = stable
        .poles
        .iter()
        .map(|p| angle_distance(p.location.arg(), d))
        .fold(f64::INFINITY, f64::min);

    let r0 = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
    let growth = growth_order(&stable.approximant.to_sample(), d, &geometric_grid(2.0 * r0, 200.0 * r0, 16));
    let growth_fit = match &growth {
        Ok(g) => (g.order, g.residual),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let evidence = Evidence { radius, poles: stable.poles, growth_fit };

    let verdict = if nearest <= config.pole_tol {
        Verdict::NonsummableLikely
    } else if nearest > config.sector_half_opening && growth.is_ok_and(|g| g.order <= k + config.growth_slack) {
        Verdict::SummableLikely
    } else {
        Verdict::Inconclusive
    };
    Ok(report(verdict, evidence))
}

/// The probe's direction grid helper: `count` equally spaced directions in `[0, 2π)`.
pub fn direction_grid(count: usize) -> Vec<f64> {
    (0..count).map(|i| 2.0 * PI * i as f64 / count as f64).collect()
}
