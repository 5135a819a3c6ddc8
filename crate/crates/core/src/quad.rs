//! Gauss–Hermite quadrature for Gaussian conditional expectations.
//!
//! Nodes and weights come from the Golub–Welsch construction: eigenvalues of
//! the symmetric tridiagonal Jacobi matrix of the physicists' Hermite
//! recurrence, with weights from the first eigenvector components. The rule
//! is exposed in probabilist form: `E[f(Z)] ≈ Σ w_i f(z_i)` for `Z ~ N(0,1)`.

use crate::error::SolverError;
use crate::Result;

/// Quadrature rule for standard normal expectations.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    /// Evaluation points for a standard normal argument.
    pub nodes: Vec<f64>,
    /// Probability weights, summing to 1.
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Build an `order`-point rule (exact for polynomials up to degree
    /// `2·order − 1` in the Gaussian argument).
    pub fn new(order: usize) -> Result<Self> {
        if order < 1 {
            return Err(SolverError::InvalidParameter("quadrature order must be >= 1".into()));
        }
        // Jacobi matrix: zero diagonal, off-diagonal sqrt(k/2)
        let n = order;
        let mut diag = vec![0.0f64; n];
        let mut off = vec![0.0f64; n.saturating_sub(1)];
        for (k, o) in off.iter_mut().enumerate() {
            *o = ((k + 1) as f64 / 2.0).sqrt();
        }
        let mut z_first = vec![0.0f64; n];
        z_first[0] = 1.0;
        let mut z = vec![0.0f64; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        tridiag_ql(&mut diag, &mut off, &mut z, n)?;
        // physicists' weights w_i = sqrt(pi) q0i^2; probabilist form divides
        // by sqrt(pi) and maps x -> sqrt(2) x
        let mut pairs: Vec<(f64, f64)> =
            (0..n).map(|i| (diag[i] * std::f64::consts::SQRT_2, z[i] * z[i])).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let wsum: f64 = pairs.iter().map(|p| p.1).sum();
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / wsum).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// Upper tail `P(Z > x)` of the standard normal for `x ≥ 0`, via composite
/// Simpson integration of the density over `[x, x + 14]`; relative accuracy is
/// ample for escape-mass monitoring.
pub fn normal_tail(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    let span = 14.0;
    let m = 4000usize;
    let h = span / m as f64;
    let density = |t: f64| (-0.5 * t * t).exp();
    let mut acc = density(x) + density(x + span);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * density(x + i as f64 * h);
    }
    acc * h / 3.0 / (2.0 * std::f64::consts::PI).sqrt()
}

/// QL with implicit shifts on a symmetric tridiagonal matrix; accumulates the
/// transformations into `z` (row-major, columns become eigenvectors). Adapted
/// from the classical tql2 routine.
fn tridiag_ql(d: &mut [f64], e_in: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(e_in);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(SolverError::InvalidParameter(
                    "tridiagonal eigensolver failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if r == 0.0 && m > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // export first row of z (first components of eigenvectors) back in place:
    // caller reads z[i] for eigenvector i.
    let first_row: Vec<f64> = (0..n).map(|i| z[i]).collect();
    z[..n].copy_from_slice(&first_row);
    Ok(())
}
