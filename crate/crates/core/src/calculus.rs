//! Moment Borel transform, moment differentiation and moment Taylor coefficients.

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::scalar::{Coeff, Scalar, Weight};
use crate::series::{BiSeries, TruncatedSeries};
use crate::try_map_coeffs;

/// `B_{m} û = Σ a_n / m(n) t^n`. Pass `m.inverse()` for the inverse transform.
pub fn moment_borel(m: &MomentSequence, u: &TruncatedSeries) -> Result<TruncatedSeries> {
    let weights: Vec<Weight> = m.values(u.order()).iter().map(Weight::recip).collect();
    TruncatedSeries::new(u.coeffs().scale_by(&weights)?, u.var())
}

/// Per-t-coefficient Borel transform of a bi-series.
pub fn moment_borel_bi(m: &MomentSequence, u: &BiSeries) -> Result<BiSeries> {
    let (n_t, _) = u.orders();
    let weights: Vec<Weight> = m.values(n_t).iter().map(Weight::recip).collect();
    u.scale_t(&weights)
}

/// `∂^j_m û`: coefficient `n` is `m(n+j)/m(n) · a_{n+j}`, truncation order `N - j`.
pub fn moment_derivative(m: &MomentSequence, u: &TruncatedSeries, j: usize) -> Result<TruncatedSeries> {
    let order = u.order();
    if j > order {
        return Err(Error::OrderTooLarge { order: j, truncation: order });
    }
    let values = m.values(order);
    fn go<T: Coeff>(v: &[T], values: &[Weight], j: usize) -> Result<Vec<T>> {
        (0..v.len() - j)
            .map(|n| {
                let hi = T::from_weight(&values[n + j]).ok_or(Error::InexactWeight(n + j))?;
                let lo = T::from_weight(&values[n]).ok_or(Error::InexactWeight(n))?;
                Ok(hi / lo * v[n + j].clone())
            })
            .collect()
    }
    TruncatedSeries::new(try_map_coeffs!(u.coeffs(), |v| go(v, &values, j)), u.var())
}

/// `[∂^n_m û(0)]_n = [m(n) a_n]_n`.
pub fn moment_derivatives_at_zero(m: &MomentSequence, u: &TruncatedSeries) -> Result<Vec<Scalar>> {
    let values = m.values(u.order());
    Ok(u.coeffs().scale_by(&values)?.to_scalars())
}

/// Rebuilds `û = Σ ∂^n_m û(0) / m(n) t^n` from moment Taylor data.
pub fn from_moment_taylor(m: &MomentSequence, data: &[Scalar], var: crate::series::Var) -> Result<TruncatedSeries> {
    let weights: Vec<Weight> = m.values(data.len().saturating_sub(1)).iter().map(Weight::recip).collect();
    let coeffs = crate::series::Coeffs::from_scalars(data)?.scale_by(&weights)?;
    TruncatedSeries::new(coeffs, var)
}
