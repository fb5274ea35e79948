//! Newton polygon of `P(λ, ζ)`, Gevrey order and direction predictions.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{angle_distance, canonical_angle, cluster_roots, horner_c, poly_roots};
use crate::scalar::{format_rational, rational_to_f64, Scalar};

/// Leaders are grouped when their relative distance is below this.
pub const LEADER_CLUSTER_TOL: f64 = 1e-6;
/// Default tolerance for deduplicating and matching directions.
pub const DIRECTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Leader {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub mult: usize,
    /// Scaled residual of the edge polynomial at `value`.
    pub residual: f64,
}

fn ser_complex<S: serde::Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(2))?;
    map.serialize_entry("re", &c.re)?;
    map.serialize_entry("im", &c.im)?;
    map.end()
}

/// One edge of the polygon: roots `λ ~ c ζ^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub q: BigRational,
    pub mu: i64,
    pub nu: u64,
    pub leaders: Vec<Leader>,
}

impl Branch {
    pub fn q_f64(&self) -> f64 {
        rational_to_f64(&self.q)
    }

    /// Total multiplicity of the edge.
    pub fn multiplicity(&self) -> usize {
        self.leaders.iter().map(|l| l.mult).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygonResult {
    /// Branches with `q_1 > q_2 > …`.
    pub branches: Vec<Branch>,
    /// λ-degree of `P`.
    pub p: usize,
    /// Multiplicity of the root `λ = 0`, which carries no leader.
    pub zero_roots: usize,
    /// lcm of the denominators of the `q_j`.
    pub kappa: u64,
    /// Number of branches with `q_j > 0`.
    pub tilde_n: usize,
    /// Some leader residual exceeds `1e-8`.
    pub ill_conditioned: bool,
}

/// Computes the Newton polygon of `P` given as `grid[j][i]`, the coefficient of `λ^{p-j} ζ^i`.
pub fn newton_polygon(grid: &[Vec<Scalar>]) -> Result<NewtonPolygonResult> {
    if grid.is_empty() {
        return Err(Error::InvalidProblem("empty polynomial".into()));
    }
    let p_nominal = grid.len() - 1;
    // points[i] = (e, coefficient) for every nonzero coefficient of λ^i ζ^e
    let mut points: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); p_nominal + 1];
    for (j, row) in grid.iter().enumerate() {
        for (e, c) in row.iter().enumerate() {
            if !c.is_zero() {
                points[p_nominal - j].push((e, c.to_complex()));
            }
        }
    }
    let top: Vec<(usize, usize)> = points
        .iter()
        .enumerate()
        .filter_map(|(i, pts)| pts.iter().map(|&(e, _)| e).max().map(|e| (i, e)))
        .collect();
    if top.is_empty() {
        return Err(Error::InvalidProblem("P is identically zero".into()));
    }
    let p = top.last().unwrap().0;
    let zero_roots = top[0].0;

    // upper hull, left to right
    let mut hull: Vec<(usize, usize)> = Vec::new();
    for &pt in &top {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as i64 - a.0 as i64) * (pt.1 as i64 - a.1 as i64)
                - (b.1 as i64 - a.1 as i64) * (pt.0 as i64 - a.0 as i64);
            if cross >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut branches = Vec::new();
    let mut ill_conditioned = false;
    for w in hull.windows(2).rev() {
        let ((ia, ea), (ib, eb)) = (w[0], w[1]);
        let q = BigRational::new(BigInt::from(ea as i64 - eb as i64), BigInt::from((ib - ia) as i64));
        let mu = q.numer().to_i64().expect("small numerator");
        let nu = q.denom().to_u64().expect("small denominator");
        let mut edge = vec![Complex64::zero(); ib - ia + 1];
        for i in ia..=ib {
            for &(e, c) in &points[i] {
                let on_line = (e as i64 - ea as i64) * (ib - ia) as i64 == (eb as i64 - ea as i64) * (i - ia) as i64;
                if on_line {
                    edge[i - ia] += c;
                }
            }
        }
        let roots = poly_roots(&edge);
        let mut leaders: Vec<Leader> = cluster_roots(&roots, LEADER_CLUSTER_TOL)
            .into_iter()
            .map(|(value, mult)| {
                let scale: f64 = edge.iter().enumerate().map(|(k, c)| c.norm() * value.norm().powi(k as i32)).sum();
                let residual = horner_c(&edge, value).norm() / scale.max(f64::MIN_POSITIVE);
                Leader { value, mult, residual }
            })
            .collect();
        leaders.sort_by(|a, b| {
            let (aa, ba) = (canonical_angle(a.value.arg()), canonical_angle(b.value.arg()));
            aa.total_cmp(&ba).then(a.value.norm().total_cmp(&b.value.norm()))
        });
        ill_conditioned |= leaders.iter().any(|l| l.residual > 1e-8);
        branches.push(Branch { q, mu, nu, leaders });
    }
    let kappa = branches.iter().fold(1u64, |acc, b| acc.lcm(&b.nu));
    let tilde_n = branches.iter().filter(|b| b.q.is_positive()).count();
    Ok(NewtonPolygonResult { branches, p, zero_roots, kappa, tilde_n, ill_conditioned })
}

/// `max(q_1, 0) - s` where `s` is the order of the moment sequence.
pub fn predict_gevrey(npr: &NewtonPolygonResult, m_order: f64) -> Result<f64> {
    let q1 = npr.branches.first().ok_or_else(|| Error::InvalidProblem("P has no λ-roots".into()))?.q_f64();
    Ok(q1.max(0.0) - m_order)
}

/// Direction data for the single positive level.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionReport {
    pub q1: BigRational,
    pub mu: i64,
    pub nu: u64,
    /// Distinct leaders on the top branch.
    pub leaders: Vec<Complex64>,
    /// Directions `d` in `[0, 2π)` for which some required direction hits a bad direction.
    pub nonsummable: Vec<f64>,
    pub tol: f64,
    /// Whether failure at the listed directions also needs the lower initial data to vanish.
    pub necessity_conditional: bool,
}

impl DirectionReport {
    /// `(d + arg λ + 2nπ) / q_1` for every leader and `n = 0, …, μ - 1`, in `[0, 2π)`.
    pub fn required_dirs(&self, d: f64) -> Vec<f64> {
        let q1 = rational_to_f64(&self.q1);
        self.leaders
            .iter()
            .flat_map(|l| {
                let arg = l.arg();
                (0..self.mu).map(move |n| canonical_angle((d + arg + TAU * n as f64) / q1))
            })
            .collect()
    }

    /// `d` is in the predicted nonsummable set.
    pub fn is_nonsummable(&self, d: f64) -> bool {
        self.nonsummable.iter().any(|&x| angle_distance(x, d) <= self.tol)
    }
}

/// Nonsummable directions for `ñ = 1`, from the bad directions of the initial data.
///
/// Requires the lower initial data `φ_0, …, φ_{p-2}` to vanish for the necessity half;
/// the report records that assumption rather than checking it.
pub fn predict_directions(npr: &NewtonPolygonResult, bad_dirs: &[f64]) -> Result<DirectionReport> {
    if npr.tilde_n != 1 {
        return Err(Error::Multisummable(npr.tilde_n));
    }
    let top = &npr.branches[0];
    let q1 = top.q_f64();
    let leaders: Vec<Complex64> = top.leaders.iter().map(|l| l.value).collect();
    let mut nonsummable: Vec<f64> = Vec::new();
    for l in &leaders {
        for &b in bad_dirs {
            for j in 0..top.nu {
                // rotations by 2π j / ν cover every residue of q_1 · 2π j' modulo 2π
                let d = canonical_angle(q1 * b - l.arg() + TAU * j as f64 / top.nu as f64);
                if !nonsummable.iter().any(|&x| angle_distance(x, d) <= DIRECTION_TOL) {
                    nonsummable.push(d);
                }
            }
        }
    }
    nonsummable.sort_by(f64::total_cmp);
    Ok(DirectionReport {
        q1: top.q.clone(),
        mu: top.mu,
        nu: top.nu,
        leaders,
        nonsummable,
        tol: DIRECTION_TOL,
        necessity_conditional: npr.p > 1,
    })
}

/// Per-level required directions `(d + arg λ_{jl} + 2nπ) / q_j` for branch `j`.
pub fn level_directions(npr: &NewtonPolygonResult, level: usize, d: f64) -> Result<Vec<f64>> {
    let b = npr.branches.get(level).filter(|b| b.q.is_positive()).ok_or_else(|| {
        Error::InvalidProblem(format!("no positive level {level}"))
    })?;
    let q = b.q_f64();
    Ok(b.leaders
        .iter()
        .flat_map(|l| (0..b.mu).map(move |n| canonical_angle((d + l.value.arg() + TAU * n as f64) / q)))
        .collect())
}

/// `|d_j - d_{j-1}| ≤ π (1/k_j - 1/k_{j-1}) / 2` for all consecutive levels.
pub fn admissible_multidirection(k: &[f64], d: &[f64]) -> Result<bool> {
    if k.len() != d.len() {
        return Err(Error::InvalidProblem(format!("{} levels but {} directions", k.len(), d.len())));
    }
    if k.iter().any(|&x| !(x > 0.0 && x.is_finite())) || k.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::UnsortedLevels);
    }
    Ok(k.windows(2).zip(d.windows(2)).all(|(kw, dw)| {
        let bound = std::f64::consts::PI * (1.0 / kw[1] - 1.0 / kw[0]) / 2.0;
        (dw[1] - dw[0]).abs() <= bound + 1e-12
    }))
}

/// JSON report of the polygon, Gevrey prediction and (when `ñ = 1`) nonsummable directions.
pub fn roots_report(npr: &NewtonPolygonResult, m_order: f64, bad_dirs: &[f64]) -> Result<Value> {
    let branches: Vec<Value> = npr
        .branches
        .iter()
        .map(|b| {
            json!({
                "q": format_rational(&b.q),
                "leaders": b.leaders.iter().map(|l| json!({"re": l.value.re, "im": l.value.im, "mult": l.mult})).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut report = json!({
        "branches": branches,
        "kappa": npr.kappa,
        "tilde_n": npr.tilde_n,
        "gevrey": predict_gevrey(npr, m_order)?,
    });
    if npr.ill_conditioned {
        report["ill_conditioned"] = json!(true);
    }
    match predict_directions(npr, bad_dirs) {
        Ok(dirs) => {
            report["nonsummable"] = dirs.nonsummable.iter().map(|d| json!({"dir": d, "tol": dirs.tol})).collect::<Value>();
            report["necessity_conditional"] = json!(dirs.necessity_conditional);
        }
        Err(Error::Multisummable(_)) => {
            report["nonsummable"] = Value::Null;
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}
