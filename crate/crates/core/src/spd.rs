//! Small dense symmetric positive definite matrices.
//!
//! Volatility scenarios live in the SPD cone: a matrix `a` stands for a
//! quadratic-variation density (variance per unit time). Square roots are
//! taken through a symmetric eigendecomposition (cyclic Jacobi rotations),
//! never Cholesky, because `a^{1/2}` must itself be symmetric for the
//! transformed constraint sets `a^{1/2}·C` and the distances to them to be
//! well defined.

use crate::error::SolverError;
use crate::Result;

const SYMMETRY_TOL: f64 = 1e-12;
const EIG_TOL: f64 = 1e-14;

/// Symmetric positive definite `d×d` matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SpdMatrix {
    /// Build from row-major entries, rejecting non-symmetric or
    /// non-positive-definite input.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(SolverError::InvalidParameter(format!(
                "expected {dim}x{dim} entries, got {}",
                entries.len()
            )));
        }
        let mut max_asym = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                max_asym = max_asym.max((entries[i * dim + j] - entries[j * dim + i]).abs());
            }
        }
        if max_asym > SYMMETRY_TOL {
            return Err(SolverError::NotSymmetric { max_asym });
        }
        let m = Self { dim, entries };
        let (eigvals, _) = m.sym_eigen();
        let min_eig = eigvals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig <= 0.0 {
            return Err(SolverError::NotPositiveDefinite { min_eig });
        }
        Ok(m)
    }

    /// 1×1 matrix from a positive scalar.
    pub fn scalar(a: f64) -> Result<Self> {
        Self::new(1, vec![a])
    }

    /// Diagonal matrix with strictly positive entries.
    pub fn diag(values: &[f64]) -> Result<Self> {
        let d = values.len();
        let mut e = vec![0.0; d * d];
        for (i, &v) in values.iter().enumerate() {
            e[i * d + i] = v;
        }
        Self::new(d, e)
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        Self::diag(&vec![1.0; dim]).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Matrix-vector product `a·v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Trace.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest eigenvalue.
    pub fn max_eigenvalue(&self) -> f64 {
        let (vals, _) = self.sym_eigen();
        vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = self.sym_eigen();
        vals.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Quadratic form `v^T a v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(x, y)| x * y).sum()
    }

    /// `|a^{1/2} v|`, computed as `sqrt(v^T a v)`; this avoids forming the
    /// square root when only the norm is needed.
    pub fn half_norm(&self, v: &[f64]) -> f64 {
        self.quad_form(v).max(0.0).sqrt()
    }

    /// Symmetric eigendecomposition (eigenvalues, row-major eigenvector
    /// matrix whose COLUMNS are the eigenvectors) via cyclic Jacobi sweeps.
    pub fn sym_eigen(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let mut a = self.entries.clone();
        // symmetrize tiny asymmetries before rotating
        for i in 0..d {
            for j in (i + 1)..d {
                let s = 0.5 * (a[i * d + j] + a[j * d + i]);
                a[i * d + j] = s;
                a[j * d + i] = s;
            }
        }
        let mut v = vec![0.0; d * d];
        for i in 0..d {
            v[i * d + i] = 1.0;
        }
        if d == 1 {
            return (vec![a[0]], v);
        }
        let scale: f64 = a.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for i in 0..d {
                for j in (i + 1)..d {
                    off = off.max(a[i * d + j].abs());
                }
            }
            if off <= EIG_TOL * scale {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = a[p * d + q];
                    if apq.abs() <= EIG_TOL * scale {
                        continue;
                    }
                    let app = a[p * d + p];
                    let aqq = a[q * d + q];
                    let theta = 0.5 * (aqq - app) / apq;
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..d {
                        let akp = a[k * d + p];
                        let akq = a[k * d + q];
                        a[k * d + p] = c * akp - s * akq;
                        a[k * d + q] = s * akp + c * akq;
                    }
                    for k in 0..d {
                        let apk = a[p * d + k];
                        let aqk = a[q * d + k];
                        a[p * d + k] = c * apk - s * aqk;
                        a[q * d + k] = s * apk + c * aqk;
                    }
                    for k in 0..d {
                        let vkp = v[k * d + p];
                        let vkq = v[k * d + q];
                        v[k * d + p] = c * vkp - s * vkq;
                        v[k * d + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let vals = (0..d).map(|i| a[i * d + i]).collect();
        (vals, v)
    }

    /// Apply `f` to the eigenvalues and recompose `V f(Λ) V^T`.
    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let d = self.dim;
        let (vals, vecs) = self.sym_eigen();
        let fv: Vec<f64> = vals.iter().map(|&l| f(l)).collect();
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += vecs[i * d + k] * fv[k] * vecs[j * d + k];
                }
                out[i * d + j] = s;
                out[j * d + i] = s;
            }
        }
        Self { dim: d, entries: out }
    }

    /// Unique SPD square root `s` with `s·s = a`.
    pub fn sqrt(&self) -> Self {
        self.spectral_map(f64::sqrt)
    }

    /// SPD inverse square root `s` with `s·a·s = I`.
    pub fn inv_sqrt(&self) -> Self {
        self.spectral_map(|l| 1.0 / l.sqrt())
    }

    /// SPD inverse.
    pub fn inverse(&self) -> Self {
        self.spectral_map(|l| 1.0 / l)
    }

    /// Matrix product (not necessarily SPD; returned as raw row-major).
    pub fn mul_mat(&self, other: &SpdMatrix) -> Vec<f64> {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.get(i, k) * other.get(k, j);
                }
                out[i * d + j] = s;
            }
        }
        out
    }
}

/// A volatility scenario together with its precomputed square roots; the
/// generator evaluations and strategy projections need `a^{1/2}` and
/// `a^{-1/2}` constantly, so they are factored once per scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub a: SpdMatrix,
    pub sqrt: SpdMatrix,
    pub inv_sqrt: SpdMatrix,
    pub inv: SpdMatrix,
}

impl Scenario {
    pub fn new(a: SpdMatrix) -> Self {
        let sqrt = a.sqrt();
        let inv_sqrt = a.inv_sqrt();
        let inv = a.inverse();
        Self { a, sqrt, inv_sqrt, inv }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

/// Loewner-ordered pair of volatility bounds `a_lo ≤ a_hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolBounds {
    pub lo: SpdMatrix,
    pub hi: SpdMatrix,
}

impl VolBounds {
    pub fn new(lo: SpdMatrix, hi: SpdMatrix) -> Result<Self> {
        if !loewner_leq(&lo, &hi)? {
            return Err(SolverError::InvalidParameter(
                "volatility bounds are not Loewner ordered".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }
}

/// Loewner partial order: `true` iff `b − a` is positive semidefinite
/// (smallest eigenvalue ≥ −1e-12).
pub fn loewner_leq(a: &SpdMatrix, b: &SpdMatrix) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(SolverError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let d = a.dim();
    let diff: Vec<f64> = (0..d * d).map(|k| b.entries[k] - a.entries[k]).collect();
    // `diff` is symmetric but possibly indefinite; reuse the Jacobi kernel
    // through a shifted SPD construction: eigenvalues of diff are computed on
    // a raw copy via the same sweep.
    let m = SpdMatrix { dim: d, entries: diff };
    let (vals, _) = m.sym_eigen();
    Ok(vals.iter().cloned().fold(f64::INFINITY, f64::min) >= -1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn sqrt_identity_and_diagonal() {
        let i2 = SpdMatrix::identity(2);
        assert!(max_abs_diff(i2.sqrt().entries(), i2.entries()) < 1e-14);
        let d = SpdMatrix::diag(&[4.0, 9.0]).unwrap();
        let s = d.sqrt();
        assert!(max_abs_diff(s.entries(), SpdMatrix::diag(&[2.0, 3.0]).unwrap().entries()) < 1e-12);
    }

    #[test]
    fn sqrt_two_by_two_against_eigen_oracle() {
        // eigenvalues 3 and 1 on the (1,1)/(1,-1) axes; recomposed root
        let a = SpdMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let s = a.sqrt();
        assert!((s.get(0, 0) - 1.36603).abs() < 1e-5);
        assert!((s.get(0, 1) - 0.36603).abs() < 1e-5);
        assert!((s.get(1, 0) - 0.36603).abs() < 1e-5);
        assert!((s.get(1, 1) - 1.36603).abs() < 1e-5);
        // s*s = a within 1e-10
        let ss = s.mul_mat(&s);
        assert!(max_abs_diff(&ss, a.entries()) < 1e-10);
    }

    #[test]
    fn inv_sqrt_cases() {
        let i1 = SpdMatrix::identity(1);
        assert!(max_abs_diff(i1.inv_sqrt().entries(), i1.entries()) < 1e-14);
        let d = SpdMatrix::scalar(4.0).unwrap();
        assert!((d.inv_sqrt().get(0, 0) - 0.5).abs() < 1e-14);

        let a = SpdMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let is = a.inv_sqrt();
        assert!((is.get(0, 0) - 0.78868).abs() < 1e-5);
        assert!((is.get(0, 1) + 0.21132).abs() < 1e-5);
        assert!((is.get(1, 1) - 0.78868).abs() < 1e-5);
        // s·a·s = I within 1e-10
        let m = SpdMatrix { dim: 2, entries: is.mul_mat(&a) };
        let sas = m.mul_mat(&is);
        assert!(max_abs_diff(&sas, SpdMatrix::identity(2).entries()) < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SpdMatrix::new(2, vec![1.0, 0.5, 0.2, 1.0]),
            Err(SolverError::NotSymmetric { .. })
        ));
        assert!(matches!(
            SpdMatrix::new(2, vec![1.0, 2.0, 2.0, 1.0]),
            Err(SolverError::NotPositiveDefinite { .. })
        ));
        assert!(SpdMatrix::scalar(0.0).is_err());
        assert!(SpdMatrix::scalar(-1.0).is_err());
    }

    #[test]
    fn loewner_order_examples() {
        let a = SpdMatrix::scalar(0.04).unwrap();
        let b = SpdMatrix::scalar(0.09).unwrap();
        assert!(loewner_leq(&a, &b).unwrap());
        assert!(!loewner_leq(&b, &a).unwrap());
        assert!(loewner_leq(&a, &a).unwrap());
        // difference has eigenvalues 1 and -0.5
        let i2 = SpdMatrix::identity(2);
        let c = SpdMatrix::diag(&[2.0, 0.5]).unwrap();
        assert!(!loewner_leq(&i2, &c).unwrap());
        assert!(loewner_leq(&i2, &SpdMatrix::diag(&[2.0, 1.5]).unwrap()).unwrap());
        assert!(matches!(
            loewner_leq(&a, &i2),
            Err(SolverError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_spd_roundtrip() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let d = rng.gen_range(1..=3usize);
            // random SPD: G G^T + eps I
            let g: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut e = vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for k in 0..d {
                        s += g[i * d + k] * g[j * d + k];
                    }
                    e[i * d + j] = s + if i == j { 0.05 } else { 0.0 };
                }
            }
            let a = SpdMatrix::new(d, e).unwrap();
            let s = a.sqrt();
            let ss = s.mul_mat(&s);
            assert!(max_abs_diff(&ss, a.entries()) < 1e-10, "sqrt roundtrip d={d}");
            // inv_sqrt equals inverse of sqrt
            let is = a.inv_sqrt();
            let inv_of_sqrt = s.inverse();
            assert!(max_abs_diff(is.entries(), inv_of_sqrt.entries()) < 1e-10);
        }
    }

    #[test]
    fn loewner_is_partial_order_on_samples() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let sample: Vec<SpdMatrix> = (0..12)
            .map(|_| {
                let g: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let e = vec![
                    g[0] * g[0] + g[1] * g[1] + 0.1,
                    g[0] * g[2] + g[1] * g[3],
                    g[0] * g[2] + g[1] * g[3],
                    g[2] * g[2] + g[3] * g[3] + 0.1,
                ];
                SpdMatrix::new(2, e).unwrap()
            })
            .collect();
        for a in &sample {
            assert!(loewner_leq(a, a).unwrap(), "reflexive");
        }
        for a in &sample {
            for b in &sample {
                if loewner_leq(a, b).unwrap() && loewner_leq(b, a).unwrap() {
                    assert!(max_abs_diff(a.entries(), b.entries()) < 1e-10, "antisymmetric");
                }
                for c in &sample {
                    if loewner_leq(a, b).unwrap() && loewner_leq(b, c).unwrap() {
                        assert!(loewner_leq(a, c).unwrap(), "transitive");
                    }
                }
            }
        }
    }
}
