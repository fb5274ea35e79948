//! Small float utilities: least squares, polynomial roots, log-gamma.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Least-squares fit `y ≈ X β`. Returns `(β, rms residual)`.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = rows.len();
    let k = rows.first()?.len();
    if m < k {
        return None;
    }
    // column scaling keeps the normal equations well conditioned
    let mut scales = vec![0.0f64; k];
    for row in rows {
        for (s, x) in scales.iter_mut().zip(row) {
            *s = s.max(x.abs());
        }
    }
    for s in &mut scales {
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    let a = DMatrix::from_fn(m, k, |i, j| rows[i][j] / scales[j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let beta = svd.solve(&b, 1e-12).ok()?;
    let resid = &a * &beta - &b;
    let rms = (resid.norm_squared() / m as f64).sqrt();
    Some((beta.iter().zip(&scales).map(|(x, s)| x / s).collect(), rms))
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `ln n!` for `n = 0..=n_max`.
pub fn ln_factorials(n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| ln_gamma(n as f64 + 1.0)).collect()
}

pub fn horner_c(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Roots of `Σ c_i x^i` (ascending coefficients), via companion-matrix
/// eigenvalues followed by a few Newton steps on the original polynomial.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    if deg == 1 {
        return vec![-monic[0]];
    }
    let companion = DMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -monic[deg - 1 - j]
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let eig = match companion.clone().try_schur(1e-15, 10_000) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..deg).map(|i| t[(i, i)]).collect::<Vec<_>>()
        }
        None => aberth(&monic),
    };
    let deriv: Vec<Complex64> =
        (1..=deg).map(|i| monic[i] * i as f64).collect();
    eig.into_iter()
        .map(|mut z| {
            for _ in 0..3 {
                let f = horner_c(&monic, z);
                let df = horner_c(&deriv, z);
                if df.norm() == 0.0 {
                    break;
                }
                let step = f / df;
                let next = z - step;
                if horner_c(&monic, next).norm() < f.norm() {
                    z = next;
                } else {
                    break;
                }
            }
            z
        })
        .collect()
}

/// Aberth–Ehrlich iteration; fallback when the Schur iteration fails.
fn aberth(monic: &[Complex64]) -> Vec<Complex64> {
    let deg = monic.len() - 1;
    let deriv: Vec<Complex64> = (1..=deg).map(|i| monic[i] * i as f64).collect();
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let ratio = horner_c(monic, z[i]) / horner_c(&deriv, z[i]);
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * repulsion);
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Groups roots closer than `rel_tol` (relative to the larger modulus, at
/// least 1) and returns `(mean, multiplicity)` pairs.
pub fn cluster_roots(roots: &[Complex64], rel_tol: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    'outer: for &r in roots {
        for cl in clusters.iter_mut() {
            let centre: Complex64 = cl.iter().sum::<Complex64>() / cl.len() as f64;
            if (centre - r).norm() <= rel_tol * centre.norm().max(r.norm()).max(1.0) {
                cl.push(r);
                continue 'outer;
            }
        }
        clusters.push(vec![r]);
    }
    clusters
        .into_iter()
        .map(|cl| (cl.iter().sum::<Complex64>() / cl.len() as f64, cl.len()))
        .collect()
}

/// Canonical angle in `[0, 2π)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = theta.rem_euclid(two_pi);
    if r >= two_pi {
        0.0
    } else {
        r
    }
}

/// Distance between two directions on the circle, in `[0, π]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = canonical_angle(a - b);
    d.min(2.0 * std::f64::consts::PI - d)
}
