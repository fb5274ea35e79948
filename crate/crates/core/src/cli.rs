//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::calculus::moment_borel;
use crate::cauchy::{residual, series_from_json, solve_cauchy, CauchyProblem};
use crate::characteristic::{newton_polygon, roots_report};
use crate::error::{Error, Result};
use crate::moments::{kernel_series, preserves_summability, sequence_order, MomentSequence};
use crate::numeric::{canonical_angle, poly_roots};
use crate::probe::{classify_summability, gevrey_estimate, PoleConfig};
use crate::qcalc::{identity_suite, QParam};
use crate::residue::{q_borel_boundary, q_laplace_initial, AnalyticSample};
use crate::scalar::Scalar;
use crate::series::{TruncatedSeries, Var};

/// Largest identity error accepted by `identities`.
pub const IDENTITY_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Defaults shared by every subcommand.
#[derive(Clone, Debug, PartialEq, clap::Args)]
pub struct Config {
    /// Truncation order in t.
    #[arg(long = "n-t", env = "GQLAB_N_T", default_value_t = 64, global = true)]
    pub default_n_t: usize,
    /// Truncation order in z.
    #[arg(long = "n-z", env = "GQLAB_N_Z", default_value_t = 256, global = true)]
    pub default_n_z: usize,
    /// Tolerance for infinite sums and products.
    #[arg(long, env = "GQLAB_TOL", default_value_t = 1e-12, global = true)]
    pub tol: f64,
    /// Angular tolerance for poles on a direction.
    #[arg(long = "pole-tol", env = "GQLAB_POLE_TOL", default_value_t = 1e-2, global = true)]
    pub pole_tol: f64,
    #[arg(long = "format", env = "GQLAB_FORMAT", value_enum, default_value_t = ReportFormat::Json, global = true)]
    pub report_format: ReportFormat,
}

impl Config {
    fn validate(&self) -> Result<()> {
        for t in [self.tol, self.pole_tol] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidTolerance(t));
            }
        }
        Ok(())
    }

    fn pole_config(&self) -> PoleConfig {
        PoleConfig { pole_tol: self.pole_tol, ..PoleConfig::default() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gqlab", version, about = "Formal series tools for q-difference and moment differential equations")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the q-binomial theorem and Heine's transformation on fixed grids.
    Identities,
    /// Kernel series of a moment sequence and the preservation heuristic.
    Kernel {
        /// Sequence spec as JSON text or a path to a JSON file.
        #[arg(long)]
        m: String,
    },
    /// Solve a Cauchy problem and report traces and the residual.
    Solve {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Newton polygon, Gevrey order and nonsummable directions of a problem.
    Roots {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Classify k-summability of a series in direction d.
    Probe {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long, allow_hyphen_values = true)]
        d: f64,
    },
    /// Residue-series round trip for a rational initial datum.
    Roundtrip {
        #[arg(long)]
        q: String,
        /// `{"numer": [...], "denom": [...]}` as JSON text or a path.
        #[arg(long)]
        phi: String,
    },
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: 0, stdout, stderr: String::new() }
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => outcome,
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let cfg = &cli.config;
    cfg.validate()?;
    let csv = cfg.report_format == ReportFormat::Csv;
    match &cli.command {
        Command::Identities => {
            reject_csv(csv)?;
            identities()
        }
        Command::Kernel { m } => kernel(cfg, &MomentSequence::parse(&inline_or_file(m)?)?),
        Command::Solve { problem } => {
            let problem = CauchyProblem::from_json_with_defaults(&read_json(problem)?, cfg.default_n_t, cfg.default_n_z)?;
            solve(cfg, &problem)
        }
        Command::Roots { problem } => {
            reject_csv(csv)?;
            roots(cfg, &read_json(problem)?)
        }
        Command::Probe { series, k, d } => {
            reject_csv(csv)?;
            let u = series_from_json(&read_json(series)?, cfg.default_n_t, Var::T)?;
            let report = classify_summability(&u, *k, *d, &cfg.pole_config())?;
            Ok(Outcome::ok(render(&serde_json::to_value(report).expect("serializable"))))
        }
        Command::Roundtrip { q, phi } => {
            reject_csv(csv)?;
            let phi: Value = serde_json::from_str(&inline_or_file(phi)?).map_err(|e| Error::Parse(e.to_string()))?;
            roundtrip(cfg, &QParam::parse(q)?, &phi)
        }
    }
}

fn reject_csv(csv: bool) -> Result<()> {
    if csv {
        return Err(Error::Parse("csv output is only available for coefficient tables (kernel, solve)".into()));
    }
    Ok(())
}

fn inline_or_file(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn scalars_json(s: &TruncatedSeries) -> Value {
    s.coeffs().to_scalars().iter().map(|c| serde_json::to_value(c).expect("serializable")).collect()
}

fn csv_table(header: &str, s: &TruncatedSeries) -> String {
    let mut out = format!("n,{header}\n");
    for (n, c) in s.coeffs().to_scalars().iter().enumerate() {
        let cell = match c {
            Scalar::Float(z) if z.im == 0.0 => z.re.to_string(),
            other => other.to_string(),
        };
        let _ = writeln!(out, "{n},{cell}");
    }
    out
}

fn identities() -> Result<Outcome> {
    let checks = identity_suite()?;
    let max_error = checks.iter().map(|c| c.error).fold(0.0, f64::max);
    let passed = checks.iter().all(|c| c.error <= IDENTITY_THRESHOLD);
    let report = json!({
        "checks": checks,
        "max_error": max_error,
        "threshold": IDENTITY_THRESHOLD,
        "passed": passed,
    });
    Ok(Outcome { code: if passed { 0 } else { 1 }, stdout: render(&report), stderr: String::new() })
}

fn kernel(cfg: &Config, m: &MomentSequence) -> Result<Outcome> {
    let order = cfg.default_n_t;
    let psi = kernel_series(m, order);
    if cfg.report_format == ReportFormat::Csv {
        return Ok(Outcome::ok(csv_table("kernel", &psi)));
    }
    let preservation = preserves_summability(m, order, &cfg.pole_config())?;
    let report = json!({
        "m": m.to_json(),
        "order": order,
        "kernel": scalars_json(&psi),
        "sequence_order": sequence_order(m, order)?,
        "verdict": preservation.verdict,
        "preservation": preservation,
    });
    Ok(Outcome::ok(render(&report)))
}

fn solve(cfg: &Config, problem: &CauchyProblem) -> Result<Outcome> {
    let sol = solve_cauchy(problem)?;
    let trace = sol.series.trace_z0();
    if cfg.report_format == ReportFormat::Csv {
        return Ok(Outcome::ok(csv_table("u_t0", &trace)));
    }
    let res = residual(problem, &sol.series)?;
    let mut report = json!({
        "valid_t": sol.valid_t,
        "valid_z": sol.valid_z,
        "trace_z0": scalars_json(&trace),
        "trace_t0": scalars_json(sol.series.trace_t0()),
        "residual": res,
    });
    if let Ok(est) = gevrey_estimate(&trace) {
        report["gevrey_estimate"] = serde_json::to_value(est).expect("serializable");
    }
    Ok(Outcome::ok(render(&report)))
}

/// Bad directions of the datum: arguments of the denominator roots.
fn bad_directions(phi: &Value) -> Result<Vec<f64>> {
    let Some(denom) = phi.get("denom").and_then(Value::as_array) else {
        return Ok(Vec::new());
    };
    let coeffs = denom.iter().map(|c| Scalar::from_json(c).map(|s| s.to_complex())).collect::<Result<Vec<Complex64>>>()?;
    let mut dirs: Vec<f64> = poly_roots(&coeffs).iter().map(|z| canonical_angle(z.arg())).collect();
    dirs.sort_by(f64::total_cmp);
    dirs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(dirs)
}

fn roots(cfg: &Config, v: &Value) -> Result<Outcome> {
    let grid = v
        .get("P")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("problem missing \"P\"".into()))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("each row of \"P\" must be a list".into()))?
                .iter()
                .map(Scalar::from_json)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = match v.get("m") {
        Some(spec) => MomentSequence::from_json(spec)?,
        None => MomentSequence::one(),
    };
    let bad = match v.get("bad_dirs") {
        Some(list) => list
            .as_array()
            .ok_or_else(|| Error::Parse("\"bad_dirs\" must be a list".into()))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| Error::Parse("bad direction must be a number".into())))
            .collect::<Result<Vec<_>>>()?,
        None => match v.get("initial").and_then(Value::as_array).and_then(|l| l.last()) {
            Some(phi) => bad_directions(phi)?,
            None => Vec::new(),
        },
    };
    let npr = newton_polygon(&grid)?;
    let mut report = roots_report(&npr, m.nominal_order(), &bad)?;
    report["bad_dirs"] = json!(bad);
    report["m_order"] = json!(m.nominal_order());
    let _ = cfg;
    Ok(Outcome::ok(render(&report)))
}

/// 25 points with `|z| ≤ 1/4`: five radii on five rays.
pub fn roundtrip_grid() -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(25);
    for i in 1..=5 {
        for j in 0..5 {
            pts.push(Complex64::from_polar(0.05 * i as f64, TAU * j as f64 / 5.0 + 0.3));
        }
    }
    pts
}

fn roundtrip(cfg: &Config, q: &QParam, phi_json: &Value) -> Result<Outcome> {
    let list = |k: &str| -> Result<Vec<Scalar>> {
        phi_json
            .get(k)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse(format!("phi needs \"{k}\"")))?
            .iter()
            .map(Scalar::from_json)
            .collect()
    };
    let (numer, denom) = (list("numer")?, list("denom")?);
    let phi = AnalyticSample::rational(&numer, &denom);
    let tol = cfg.tol;
    let psi = {
        let (phi, q) = (phi.clone(), q.clone());
        AnalyticSample::new("boundary values", move |t| q_borel_boundary(&phi, &q, t, tol))
    };
    // coefficientwise oracle: Σ c_n t^n / [n]_q! from the Taylor data of φ
    let taylor = crate::series::rational_series(&numer, &denom, cfg.default_n_z, Var::T)?;
    let oracle = moment_borel(&MomentSequence::q_factorial(q.clone()), &taylor)?;
    let mut points = Vec::new();
    let (mut max_rt, mut max_or) = (0.0f64, 0.0f64);
    for z in roundtrip_grid() {
        let back = q_laplace_initial(&psi, q, z, tol)?;
        let exact = phi.eval(z)?;
        let rt = (back - exact).norm();
        let or = (psi.eval(z)? - oracle.eval_complex(z)).norm();
        max_rt = max_rt.max(rt);
        max_or = max_or.max(or);
        points.push(json!({"z": {"re": z.re, "im": z.im}, "roundtrip_error": rt, "oracle_error": or}));
    }
    let report = json!({
        "q": q.to_string(),
        "points": points,
        "max_roundtrip_error": max_rt,
        "max_oracle_error": max_or,
    });
    Ok(Outcome::ok(render(&report)))
}
