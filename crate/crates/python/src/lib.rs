//! Python bindings for `gqlab`.
//!
//! Rationals cross the boundary as strings (`"3/4"`), floats as Python
//! `complex`. Structured reports come back as JSON text.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyString};

use gqlab::characteristic::{newton_polygon, predict_directions, roots_report};
use gqlab::scalar::parse_rational;
use gqlab::series::rational_series;
use gqlab::{
    AnalyticSample, CauchyProblem, MomentSequence as CoreSequence, PoleConfig, QParam, Scalar,
    TruncatedSeries, Var,
};

fn err(e: gqlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn qparam(q: &str) -> PyResult<QParam> {
    QParam::parse(q).map_err(err)
}

fn scalar_from_py(obj: &Bound<'_, PyAny>) -> PyResult<Scalar> {
    if let Ok(s) = obj.cast::<PyString>() {
        return parse_rational(s.to_str()?).map(Scalar::Rational).map_err(err);
    }
    if let Ok(n) = obj.extract::<i64>() {
        return Ok(Scalar::int(n));
    }
    if let Ok(c) = obj.cast::<PyComplex>() {
        return Ok(Scalar::Float(Complex64::new(c.real(), c.imag())));
    }
    let x: f64 = obj.extract()?;
    Ok(Scalar::Float(Complex64::new(x, 0.0)))
}

fn scalars_from_py(list: &Bound<'_, PyAny>) -> PyResult<Vec<Scalar>> {
    list.try_iter()?.map(|item| scalar_from_py(&item?)).collect()
}

fn scalar_to_py<'py>(py: Python<'py>, s: &Scalar) -> PyResult<Bound<'py, PyAny>> {
    match s {
        Scalar::Float(z) => Ok(PyComplex::from_doubles(py, z.re, z.im).into_any()),
        other => Ok(PyString::new(py, &other.to_string()).into_any()),
    }
}

fn to_json_text<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// A truncated power series in `t` or `z`.
#[pyclass(module = "pygqlab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Series {
    inner: TruncatedSeries,
}

#[pymethods]
impl Series {
    #[new]
    #[pyo3(signature = (coeffs, var = "t"))]
    fn new(coeffs: &Bound<'_, PyAny>, var: &str) -> PyResult<Self> {
        let var = match var {
            "t" => Var::T,
            "z" => Var::Z,
            other => return Err(PyValueError::new_err(format!("unknown variable {other:?}"))),
        };
        let inner = TruncatedSeries::from_scalars(&scalars_from_py(coeffs)?, var).map_err(err)?;
        Ok(Self { inner })
    }

    /// Taylor expansion of `numer / denom` to `order`.
    #[staticmethod]
    #[pyo3(signature = (numer, denom, order, var = "t"))]
    fn rational(numer: &Bound<'_, PyAny>, denom: &Bound<'_, PyAny>, order: usize, var: &str) -> PyResult<Self> {
        let var = if var == "z" { Var::Z } else { Var::T };
        let inner = rational_series(&scalars_from_py(numer)?, &scalars_from_py(denom)?, order, var).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode().to_string()
    }

    fn coeffs<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.coeffs().to_scalars().iter().map(|s| scalar_to_py(py, s)).collect()
    }

    fn __mul__(&self, other: &Series) -> PyResult<Series> {
        Ok(Series { inner: self.inner.mul(&other.inner).map_err(err)? })
    }

    fn __add__(&self, other: &Series) -> PyResult<Series> {
        Ok(Series { inner: self.inner.add(&other.inner).map_err(err)? })
    }

    fn eval(&self, x: Complex64) -> Complex64 {
        self.inner.eval_complex(x)
    }

    fn to_float(&self) -> Series {
        Series { inner: self.inner.to_float() }
    }

    fn borel(&self, m: &MomentSequence) -> PyResult<Series> {
        Ok(Series { inner: gqlab::moment_borel(&m.inner, &self.inner).map_err(err)? })
    }

    #[pyo3(signature = (m, j = 1))]
    fn derivative(&self, m: &MomentSequence, j: usize) -> PyResult<Series> {
        Ok(Series { inner: gqlab::moment_derivative(&m.inner, &self.inner, j).map_err(err)? })
    }

    fn q_difference(&self, q: &str) -> PyResult<Series> {
        Ok(Series { inner: gqlab::qcalc::q_difference(&self.inner, &qparam(q)?).map_err(err)? })
    }

    /// `[∂^n_m û(0)]_n`.
    fn taylor_data<'py>(&self, py: Python<'py>, m: &MomentSequence) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let data = gqlab::moment_derivatives_at_zero(&m.inner, &self.inner).map_err(err)?;
        data.iter().map(|s| scalar_to_py(py, s)).collect()
    }

    fn gevrey_estimate(&self) -> PyResult<f64> {
        Ok(gqlab::gevrey_estimate(&self.inner).map_err(err)?.s_hat)
    }

    /// Probe report as JSON text.
    fn classify(&self, k: f64, d: f64) -> PyResult<String> {
        let report = gqlab::classify_summability(&self.inner, k, d, &PoleConfig::default()).map_err(err)?;
        Ok(to_json_text(&report))
    }

    /// Poles of the `[l/m]` Padé approximant.
    fn pade_poles(&self, l: usize, m: usize) -> PyResult<Vec<Complex64>> {
        let p = gqlab::pade(&self.inner, l, m).map_err(err)?;
        Ok(p.poles.clone())
    }

    fn __eq__(&self, other: &Series) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Series(order={}, var={}, mode={})", self.inner.order(), self.inner.var(), self.inner.mode())
    }
}

/// A moment sequence, built from its JSON spec.
#[pyclass(module = "pygqlab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct MomentSequence {
    inner: CoreSequence,
}

#[pymethods]
impl MomentSequence {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: CoreSequence::parse(spec).map_err(err)? })
    }

    #[staticmethod]
    fn q_factorial(q: &str) -> PyResult<Self> {
        Ok(Self { inner: CoreSequence::q_factorial(qparam(q)?) })
    }

    #[staticmethod]
    fn factorial() -> Self {
        Self { inner: CoreSequence::factorial() }
    }

    fn times(&self, other: &MomentSequence) -> Self {
        Self { inner: self.inner.times(&other.inner) }
    }

    fn inverse(&self) -> Self {
        Self { inner: self.inner.inverse() }
    }

    /// `m(0), …, m(n_max)`: strings when exact, floats otherwise.
    fn values<'py>(&self, py: Python<'py>, n_max: usize) -> Vec<Bound<'py, PyAny>> {
        self.inner
            .values(n_max)
            .iter()
            .map(|w| match w {
                gqlab::scalar::Weight::Exact(r) => PyString::new(py, &r.to_string()).into_any(),
                gqlab::scalar::Weight::Float(x) => x.into_pyobject(py).expect("float").into_any(),
            })
            .collect()
    }

    #[pyo3(signature = (n = 64))]
    fn order(&self, n: usize) -> PyResult<f64> {
        Ok(gqlab::sequence_order(&self.inner, n).map_err(err)?.s_hat)
    }

    fn kernel(&self, order: usize) -> Series {
        Series { inner: gqlab::kernel_series(&self.inner, order) }
    }

    /// Preservation report as JSON text.
    #[pyo3(signature = (order = 64))]
    fn preserves(&self, order: usize) -> PyResult<String> {
        let report = gqlab::preserves_summability(&self.inner, order, &PoleConfig::default()).map_err(err)?;
        Ok(to_json_text(&report))
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        format!("MomentSequence({})", self.inner)
    }
}

#[pyfunction]
fn q_number(n: usize, q: &str) -> PyResult<String> {
    Ok(gqlab::q_number(n, &qparam(q)?).to_string())
}

#[pyfunction]
fn q_factorials(n: usize, q: &str) -> PyResult<Vec<String>> {
    Ok(gqlab::q_factorials(n, &qparam(q)?).iter().map(ToString::to_string).collect())
}

/// `(a;q)_n`, or `(a;q)_∞` when `n` is `None`.
#[pyfunction]
#[pyo3(signature = (a, q, n = None, tol = 1e-14))]
fn q_pochhammer<'py>(py: Python<'py>, a: &Bound<'py, PyAny>, q: &str, n: Option<usize>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let a = scalar_from_py(a)?;
    let len = match n {
        Some(n) => gqlab::qcalc::PochhammerLength::Finite(n),
        None => gqlab::qcalc::PochhammerLength::Infinite,
    };
    scalar_to_py(py, &gqlab::q_pochhammer(&a, &qparam(q)?, len, tol).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (upper, lower, q, z, terms = 400))]
fn q_hypergeometric(upper: &Bound<'_, PyAny>, lower: &Bound<'_, PyAny>, q: &str, z: &Bound<'_, PyAny>, terms: usize) -> PyResult<Complex64> {
    let sum = gqlab::q_hypergeometric(&scalars_from_py(upper)?, &scalars_from_py(lower)?, &qparam(q)?, &scalar_from_py(z)?, terms)
        .map_err(err)?;
    Ok(sum.value)
}

/// Largest error over the q-binomial and Heine grids.
#[pyfunction]
fn identity_max_error() -> PyResult<f64> {
    let checks = gqlab::qcalc::identity_suite().map_err(err)?;
    Ok(checks.iter().map(|c| c.error).fold(0.0, f64::max))
}

/// `ψ̃(t)` for `φ = numer / denom`.
#[pyfunction]
#[pyo3(signature = (numer, denom, q, t, tol = 1e-14))]
fn q_borel_boundary(numer: &Bound<'_, PyAny>, denom: &Bound<'_, PyAny>, q: &str, t: Complex64, tol: f64) -> PyResult<Complex64> {
    let phi = AnalyticSample::rational(&scalars_from_py(numer)?, &scalars_from_py(denom)?);
    gqlab::q_borel_boundary(&phi, &qparam(q)?, t, tol).map_err(err)
}

/// `φ(z)` recovered from the boundary values of `numer / denom`.
#[pyfunction]
#[pyo3(signature = (numer, denom, q, z, tol = 1e-14))]
fn roundtrip(numer: &Bound<'_, PyAny>, denom: &Bound<'_, PyAny>, q: &str, z: Complex64, tol: f64) -> PyResult<Complex64> {
    let phi = AnalyticSample::rational(&scalars_from_py(numer)?, &scalars_from_py(denom)?);
    let q = qparam(q)?;
    let psi = {
        let q = q.clone();
        AnalyticSample::new("boundary values", move |t| gqlab::q_borel_boundary(&phi, &q, t, tol))
    };
    gqlab::q_laplace_initial(&psi, &q, z, tol).map_err(err)
}

/// Solves a problem given as JSON text; returns `{"trace_z0", "valid_t", "valid_z", "residual"}` as JSON text.
#[pyfunction]
fn solve(problem: &str) -> PyResult<String> {
    let v: serde_json::Value = serde_json::from_str(problem).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let problem = CauchyProblem::from_json(&v).map_err(err)?;
    let sol = gqlab::solve_cauchy(&problem).map_err(err)?;
    let res = gqlab::residual(&problem, &sol.series).map_err(err)?;
    let report = serde_json::json!({
        "trace_z0": sol.series.trace_z0().coeffs().to_scalars(),
        "valid_t": sol.valid_t,
        "valid_z": sol.valid_z,
        "residual": res,
    });
    Ok(report.to_string())
}

/// Newton polygon report for `P` (rows of coefficient strings); JSON text.
#[pyfunction]
#[pyo3(signature = (grid, m_order = 0.0, bad_dirs = Vec::new()))]
fn roots(grid: &Bound<'_, PyAny>, m_order: f64, bad_dirs: Vec<f64>) -> PyResult<String> {
    let rows = grid.try_iter()?.map(|row| scalars_from_py(&row?)).collect::<PyResult<Vec<_>>>()?;
    let npr = newton_polygon(&rows).map_err(err)?;
    Ok(roots_report(&npr, m_order, &bad_dirs).map_err(err)?.to_string())
}

/// Predicted nonsummable directions for a single positive level.
#[pyfunction]
fn nonsummable_directions(grid: &Bound<'_, PyAny>, bad_dirs: Vec<f64>) -> PyResult<Vec<f64>> {
    let rows = grid.try_iter()?.map(|row| scalars_from_py(&row?)).collect::<PyResult<Vec<_>>>()?;
    let npr = newton_polygon(&rows).map_err(err)?;
    Ok(predict_directions(&npr, &bad_dirs).map_err(err)?.nonsummable)
}

#[pyfunction]
fn admissible_multidirection(k: Vec<f64>, d: Vec<f64>) -> PyResult<bool> {
    gqlab::admissible_multidirection(&k, &d).map_err(err)
}

/// Runs the command-line front end; returns `(exit_code, stdout)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    let out = gqlab::cli::run(std::iter::once("gqlab".to_string()).chain(args));
    (out.code, out.stdout + &out.stderr)
}

#[pymodule]
fn pygqlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Series>()?;
    m.add_class::<MomentSequence>()?;
    m.add_function(wrap_pyfunction!(q_number, m)?)?;
    m.add_function(wrap_pyfunction!(q_factorials, m)?)?;
    m.add_function(wrap_pyfunction!(q_pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(q_hypergeometric, m)?)?;
    m.add_function(wrap_pyfunction!(identity_max_error, m)?)?;
    m.add_function(wrap_pyfunction!(q_borel_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(roundtrip, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(roots, m)?)?;
    m.add_function(wrap_pyfunction!(nonsummable_directions, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_multidirection, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
