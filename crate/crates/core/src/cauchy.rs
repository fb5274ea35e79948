//! Formal solvers for moment differential Cauchy problems
//! `P(∂_{m,t}, ∂_z) u = 0`, `∂^j_{m,t} u(0, z) = φ_j(z)` with constant leading
//! coefficient, the two-operator equation `(∂_{m1,t} - ∂_{m2,z}) u = 0`, and
//! the transfer between `û = Σ u_n t^n / m(n)` and `v̂ = Σ u_n t^n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use serde_json::Value;

use crate::calculus::moment_derivative;
use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::scalar::{Coeff, GaussRat, Scalar, ScalarMode, Weight};
use crate::series::{rational_series, BiSeries, Coeffs, TruncatedSeries, Var};
use num_complex::Complex64;

/// A constant-leading-coefficient Cauchy problem.
///
/// `grid[j][i]` is the coefficient of `λ^{p-j} ζ^i`, so row 0 is `P_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyProblem {
    pub grid: Vec<Vec<Scalar>>,
    pub m: MomentSequence,
    /// `φ_0, …, φ_{p-1}` as z-series.
    pub initial: Vec<TruncatedSeries>,
    pub n_t: usize,
    pub n_z: usize,
    /// Smallest z-order that every reported t-coefficient must still resolve.
    pub z_report_order: usize,
}

impl CauchyProblem {
    pub fn new(grid: Vec<Vec<Scalar>>, m: MomentSequence, initial: Vec<TruncatedSeries>, n_t: usize, n_z: usize) -> Result<Self> {
        let problem = Self { grid, m, initial, n_t, n_z, z_report_order: 0 };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_report_order(mut self, z_order: usize) -> Self {
        self.z_report_order = z_order;
        self
    }

    /// λ-order `p`.
    pub fn p(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn mode(&self) -> ScalarMode {
        self.grid[0][0].mode()
    }

    /// ζ-degree of row `j`, ignoring trailing zeros; `None` for an all-zero row.
    pub fn row_degree(&self, j: usize) -> Option<usize> {
        self.grid[j].iter().rposition(|c| !c.is_zero())
    }

    /// Largest ζ-degree over all rows.
    pub fn zeta_degree(&self) -> usize {
        (0..self.grid.len()).filter_map(|j| self.row_degree(j)).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 2 {
            return Err(Error::InvalidProblem("need p >= 1 (at least two rows in P)".into()));
        }
        if self.grid.iter().any(Vec::is_empty) {
            return Err(Error::InvalidProblem("empty row in P".into()));
        }
        let mode = self.grid[0][0].mode();
        for s in self.grid.iter().flatten() {
            if s.mode() != mode {
                return Err(Error::ModeMismatch(mode, s.mode()));
            }
        }
        match self.row_degree(0) {
            Some(0) => {}
            Some(_) => return Err(Error::UnsupportedNormalization),
            None => return Err(Error::InvalidProblem("leading coefficient P0 is zero".into())),
        }
        if self.initial.len() != self.p() {
            return Err(Error::InvalidProblem(format!(
                "need {} initial functions, got {}",
                self.p(),
                self.initial.len()
            )));
        }
        for phi in &self.initial {
            if phi.mode() != mode {
                return Err(Error::ModeMismatch(mode, phi.mode()));
            }
            if phi.var() != Var::Z {
                return Err(Error::VariableMismatch('z', phi.var().symbol()));
            }
        }
        Ok(())
    }

    /// Parses the problem JSON schema.
    ///
    /// Initial data are either `{"coeffs": [...]}` or `{"numer": [...], "denom": [...]}`,
    /// the latter expanded to order `N_z`.
    pub fn from_json(v: &Value) -> Result<Self> {
        Self::from_json_with_defaults(v, 64, 256)
    }

    /// As [`from_json`](Self::from_json), with the given orders when `N_t`/`N_z` are absent.
    pub fn from_json_with_defaults(v: &Value, default_n_t: usize, default_n_z: usize) -> Result<Self> {
        let get = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("problem missing \"{k}\"")));
        let grid = get("P")?
            .as_array()
            .ok_or_else(|| Error::Parse("\"P\" must be a list of rows".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("each row of \"P\" must be a list".into()))?
                    .iter()
                    .map(Scalar::from_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let m = MomentSequence::from_json(get("m")?)?;
        let n_t = v.get("N_t").and_then(Value::as_u64).map_or(default_n_t, |x| x as usize);
        let n_z = v.get("N_z").and_then(Value::as_u64).map_or(default_n_z, |x| x as usize);
        let initial = get("initial")?
            .as_array()
            .ok_or_else(|| Error::Parse("\"initial\" must be a list".into()))?
            .iter()
            .map(|phi| series_from_json(phi, n_z, Var::Z))
            .collect::<Result<Vec<_>>>()?;
        let mut problem = Self::new(grid, m, initial, n_t, n_z)?;
        if let Some(z) = v.get("z_report_order").and_then(Value::as_u64) {
            problem.z_report_order = z as usize;
        }
        Ok(problem)
    }
}

/// Parses `{"coeffs": [...]}` or `{"numer": [...], "denom": [...]}` into a series.
pub fn series_from_json(v: &Value, order: usize, var: Var) -> Result<TruncatedSeries> {
    let list = |k: &str| -> Result<Option<Vec<Scalar>>> {
        match v.get(k) {
            None => Ok(None),
            Some(a) => a
                .as_array()
                .ok_or_else(|| Error::Parse(format!("\"{k}\" must be a list")))?
                .iter()
                .map(Scalar::from_json)
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    };
    if let Some(coeffs) = list("coeffs")? {
        let var = match v.get("var").and_then(Value::as_str) {
            Some("t") => Var::T,
            Some("z") => Var::Z,
            _ => var,
        };
        return TruncatedSeries::from_scalars(&coeffs, var);
    }
    match (list("numer")?, list("denom")?) {
        (Some(n), Some(d)) => rational_series(&n, &d, order, var),
        _ => Err(Error::Parse("series needs \"coeffs\" or \"numer\"/\"denom\"".into())),
    }
}

/// Output of [`solve_cauchy`].
#[derive(Clone, Debug, PartialEq)]
pub struct CauchySolution {
    /// t-coefficients `u_n(z) / m(n)`.
    pub series: BiSeries,
    /// Largest t-order computed with every z-coefficient up to `z_report_order` intact.
    pub valid_t: usize,
    /// Common z-order of all reported t-coefficients.
    pub valid_z: usize,
}

/// `(∂_z^i f)_k = (k+1)⋯(k+i) f_{k+i}`, for `i ≤ deg`, as exact multipliers.
fn falling_factors(len: usize, deg: usize) -> Vec<Vec<BigRational>> {
    (0..=deg)
        .map(|i| {
            (0..len)
                .map(|k| {
                    let mut acc = BigInt::one();
                    for s in 1..=i {
                        acc *= k + s;
                    }
                    BigRational::from_integer(acc)
                })
                .collect()
        })
        .collect()
}

/// `Q(∂_z) f` for `Q = Σ_i row[i] ζ^i`; output length `len(f) - deg Q`.
fn apply_row<T: Coeff>(row: &[T], deg: usize, f: &[T], falling: &[Vec<BigRational>]) -> Vec<T> {
    let out_len = f.len().saturating_sub(deg);
    (0..out_len)
        .map(|k| {
            (0..=deg).fold(T::zero(), |acc, i| {
                if row[i].is_zero() {
                    acc
                } else {
                    acc + row[i].clone() * T::from_rational(&falling[i][k]) * f[k + i].clone()
                }
            })
        })
        .collect()
}

struct Rows<T> {
    rows: Vec<Vec<T>>,
    degrees: Vec<Option<usize>>,
}

fn typed_rows<T: Coeff>(problem: &CauchyProblem) -> Result<Rows<T>> {
    let rows = problem
        .grid
        .iter()
        .map(|row| row.iter().map(|s| T::from_scalar(s).ok_or(Error::ModeMismatch(T::MODE, s.mode()))).collect())
        .collect::<Result<Vec<Vec<T>>>>()?;
    let degrees = (0..problem.grid.len()).map(|j| problem.row_degree(j)).collect();
    Ok(Rows { rows, degrees })
}

fn typed_initial<T: Coeff>(problem: &CauchyProblem) -> Result<Vec<Vec<T>>> {
    problem
        .initial
        .iter()
        .map(|phi| {
            let phi = phi.truncate(problem.n_z);
            phi.coeffs()
                .to_scalars()
                .iter()
                .map(|s| T::from_scalar(s).ok_or(Error::ModeMismatch(T::MODE, s.mode())))
                .collect()
        })
        .collect()
}

/// The sequence `u_0(z), …` of the recursion `c u_{n+p} = -Σ_j P_j(∂_z) u_{n+p-j}`.
fn recursion<T: Coeff>(problem: &CauchyProblem) -> Result<Vec<Vec<T>>> {
    let p = problem.p();
    let Rows { rows, degrees } = typed_rows::<T>(problem)?;
    let lead = rows[0][0].clone();
    let mut u = typed_initial::<T>(problem)?;
    let max_len = u.iter().map(Vec::len).max().unwrap_or(0);
    let falling = falling_factors(max_len, problem.zeta_degree());
    let min_len = problem.z_report_order + 1;
    if u.iter().any(|phi| phi.len() < min_len) {
        return Err(Error::WindowTooShort { needed: min_len, have: u.iter().map(Vec::len).min().unwrap_or(0) });
    }
    while u.len() <= problem.n_t {
        let n = u.len();
        let len = (1..=p)
            .filter_map(|j| degrees[j].map(|d| u[n - j].len().saturating_sub(d)))
            .min()
            .unwrap_or(u[n - 1].len());
        if len < min_len {
            break;
        }
        let mut next = vec![T::zero(); len];
        for j in 1..=p {
            let Some(d) = degrees[j] else { continue };
            let term = apply_row(&rows[j], d, &u[n - j], &falling);
            for (acc, x) in next.iter_mut().zip(term) {
                *acc = acc.clone() - x;
            }
        }
        u.push(next.into_iter().map(|x| x / lead.clone()).collect());
    }
    Ok(u)
}

fn build_solution<T: Coeff>(problem: &CauchyProblem, u: Vec<Vec<T>>, wrap: fn(Vec<T>) -> Coeffs) -> Result<CauchySolution> {
    let valid_t = u.len() - 1;
    let valid_z = u.iter().map(Vec::len).min().unwrap_or(1) - 1;
    let weights = problem.m.values(valid_t);
    let t_coeffs = u
        .into_iter()
        .enumerate()
        .map(|(n, mut un)| {
            un.truncate(valid_z + 1);
            let w = T::from_weight(&weights[n]).ok_or(Error::InexactWeight(n))?;
            TruncatedSeries::new(wrap(un.into_iter().map(|x| x / w.clone()).collect()), Var::Z)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CauchySolution { series: BiSeries::new(t_coeffs)?, valid_t, valid_z })
}

/// Unique formal solution `û = Σ u_n(z) t^n / m(n)`.
pub fn solve_cauchy(problem: &CauchyProblem) -> Result<CauchySolution> {
    problem.validate()?;
    match problem.mode() {
        ScalarMode::ExactRational => build_solution(problem, recursion::<BigRational>(problem)?, Coeffs::Rational),
        ScalarMode::ExactGaussian => build_solution(problem, recursion::<GaussRat>(problem)?, Coeffs::Gaussian),
        ScalarMode::ComplexFloat => build_solution(problem, recursion::<Complex64>(problem)?, Coeffs::Float),
    }
}

/// Summary of [`residual`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residual {
    /// Largest coefficient magnitude of `P(∂_{m,t}, ∂_z) û` on the checked window.
    pub max_abs: f64,
    /// `(t-order, z-order)` of the checked window.
    pub window: (usize, usize),
}

/// Applies `P(∂_{m,t}, ∂_z)` to a candidate and reports the largest coefficient.
pub fn residual(problem: &CauchyProblem, candidate: &BiSeries) -> Result<Residual> {
    problem.validate()?;
    if candidate.mode() != problem.mode() {
        return Err(Error::ModeMismatch(problem.mode(), candidate.mode()));
    }
    fn go<T: Coeff>(problem: &CauchyProblem, candidate: &BiSeries) -> Result<Residual> {
        let p = problem.p();
        let (n_t, n_z) = candidate.orders();
        if n_t < p {
            return Ok(Residual { max_abs: 0.0, window: (0, 0) });
        }
        let v = transfer(&problem.m, candidate, TransferDirection::ToV)?;
        let u: Vec<Vec<T>> = v
            .t_coeffs()
            .iter()
            .map(|s| s.coeffs().to_scalars().iter().map(|x| T::from_scalar(x).expect("uniform mode")).collect())
            .collect();
        let Rows { rows, degrees } = typed_rows::<T>(problem)?;
        let max_deg = degrees.iter().flatten().copied().max().unwrap_or(0);
        if n_z < max_deg {
            return Ok(Residual { max_abs: 0.0, window: (0, 0) });
        }
        let len = n_z + 1 - max_deg;
        let falling = falling_factors(n_z + 1, max_deg);
        let weights = problem.m.values(n_t - p);
        let mut max_abs = 0.0f64;
        for n in 0..=n_t - p {
            let mut r = vec![T::zero(); len];
            for j in 0..=p {
                let Some(d) = degrees[j] else { continue };
                for (acc, x) in r.iter_mut().zip(apply_row(&rows[j], d, &u[n + p - j], &falling)) {
                    *acc = acc.clone() + x;
                }
            }
            // the t^n coefficient of the result carries a 1/m(n)
            let scale = 1.0 / weights[n].to_f64();
            for x in &r {
                if !x.is_zero() {
                    max_abs = max_abs.max(x.to_complex().norm() * scale);
                }
            }
        }
        Ok(Residual { max_abs, window: (n_t - p, len - 1) })
    }
    match problem.mode() {
        ScalarMode::ExactRational => go::<BigRational>(problem, candidate),
        ScalarMode::ExactGaussian => go::<GaussRat>(problem, candidate),
        ScalarMode::ComplexFloat => go::<Complex64>(problem, candidate),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferDirection {
    /// `û = Σ u_n t^n / m(n)` to `v̂ = Σ u_n t^n`.
    ToV,
    ToU,
}

pub fn transfer(m: &MomentSequence, u: &BiSeries, direction: TransferDirection) -> Result<BiSeries> {
    let (n_t, _) = u.orders();
    let weights = m.values(n_t);
    match direction {
        TransferDirection::ToV => u.scale_t(&weights),
        TransferDirection::ToU => u.scale_t(&weights.iter().map(Weight::recip).collect::<Vec<_>>()),
    }
}

/// `û(t, z) = Σ ∂^n_{m2,z} φ(z) / m1(n) t^n`, the solution of
/// `(∂_{m1,t} - ∂_{m2,z}) u = 0`, `u(0, z) = φ(z)`.
pub fn solve_two_operator(m1: &MomentSequence, m2: &MomentSequence, phi: &TruncatedSeries, n_t: usize) -> Result<BiSeries> {
    if phi.var() != Var::Z {
        return Err(Error::VariableMismatch('z', phi.var().symbol()));
    }
    let n_z = phi.order();
    if n_t > n_z {
        return Err(Error::OrderTooLarge { order: n_t, truncation: n_z });
    }
    let weights = m1.values(n_t);
    let t_coeffs = (0..=n_t)
        .map(|n| {
            let d = moment_derivative(m2, phi, n)?.truncate(n_z - n_t);
            let coeffs = d.coeffs().scale_by(&vec![weights[n].recip(); d.order() + 1]).map_err(|e| match e {
                Error::InexactWeight(_) => Error::InexactWeight(n),
                e => e,
            })?;
            TruncatedSeries::new(coeffs, Var::Z)
        })
        .collect::<Result<Vec<_>>>()?;
    BiSeries::new(t_coeffs)
}

/// Exact `1/(1 - z)` expanded to order `n`; a common initial datum.
pub fn geometric_datum(n: usize) -> TruncatedSeries {
    TruncatedSeries::from_rationals(vec![BigRational::one(); n + 1], Var::Z).expect("nonempty")
}

/// `P = λ - Σ coeffs[i] ζ^i` as a grid.
pub fn first_order_grid(rhs: &[BigRational]) -> Vec<Vec<Scalar>> {
    vec![
        vec![Scalar::int(1)],
        rhs.iter().map(|c| Scalar::Rational(-c.clone())).collect(),
    ]
}
