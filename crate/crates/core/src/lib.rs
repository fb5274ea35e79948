//! Formal power series tools for linear q-difference-differential and moment
//! differential Cauchy problems.
//!
//! Coefficients live in one of three modes (exact rationals, exact Gaussian
//! rationals, complex floats) and modes never mix silently. The numeric
//! probes in [`probe`] are heuristics with three-valued verdicts.

pub mod calculus;
pub mod cauchy;
pub mod characteristic;
pub mod cli;
pub mod error;
pub mod moments;
pub mod numeric;
pub mod probe;
pub mod qcalc;
pub mod residue;
pub mod scalar;
pub mod series;

pub use calculus::{from_moment_taylor, moment_borel, moment_borel_bi, moment_derivative, moment_derivatives_at_zero};
pub use cauchy::{residual, solve_cauchy, solve_two_operator, transfer, CauchyProblem, CauchySolution, TransferDirection};
pub use characteristic::{admissible_multidirection, newton_polygon, predict_directions, predict_gevrey, NewtonPolygonResult};
pub use error::{Error, Result};
pub use moments::{kernel_series, preserves_summability, sequence_order, MomentSequence, SequenceSpec};
pub use probe::{classify_summability, gevrey_estimate, pade, PoleConfig, ProbeReport, Verdict};
pub use qcalc::{q_factorials, q_hypergeometric, q_number, q_pochhammer, QParam};
pub use residue::{q_borel_boundary, q_laplace_initial, AnalyticSample};
pub use scalar::{Scalar, ScalarMode};
pub use series::{BiSeries, TruncatedSeries, Var};
