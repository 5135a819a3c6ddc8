//! Closed constraint sets with exact Euclidean distance and projection.
//!
//! A trading constraint is a nonempty closed subset of ℝ^d. Both market
//! generators need distances to the volatility-transformed set `a^{1/2}·C`,
//! and the optimal strategies are read off the projection onto it. Projection
//! onto non-convex shapes (finite sets, interval unions) is set-valued in
//! general; we deterministically return the lexicographically smallest
//! minimizer so that strategies are reproducible.

use crate::error::SolverError;
use crate::spd::SpdMatrix;
use crate::Result;

const PROJ_MAX_ITERS: usize = 10_000;

/// Closed subset of ℝ^d.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintSet {
    /// All of ℝ^d (unconstrained trading).
    WholeSpace { dim: usize },
    /// Axis-aligned box `[lo_i, hi_i]` per coordinate.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// `{ x : n·x ≤ offset }` with `n ≠ 0`.
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// Finite list of points.
    FinitePointSet { points: Vec<Vec<f64>> },
    /// Union of disjoint closed intervals, sorted; d = 1 only.
    IntervalUnion { intervals: Vec<(f64, f64)> },
}

impl ConstraintSet {
    /// Validate shape invariants (nonempty, closed by construction, ordered
    /// interval data).
    pub fn validate(&self) -> Result<()> {
        match self {
            ConstraintSet::WholeSpace { dim } => {
                if *dim == 0 {
                    return Err(SolverError::InvalidParameter("dim must be positive".into()));
                }
            }
            ConstraintSet::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(SolverError::InvalidParameter("box bounds length mismatch".into()));
                }
                if lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(SolverError::InvalidParameter("box requires lo <= hi".into()));
                }
            }
            ConstraintSet::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(SolverError::InvalidParameter("ball center empty".into()));
                }
                if *radius < 0.0 {
                    return Err(SolverError::InvalidParameter("ball radius negative".into()));
                }
            }
            ConstraintSet::Halfspace { normal, .. } => {
                if normal.iter().all(|x| *x == 0.0) {
                    return Err(SolverError::InvalidParameter("halfspace normal is zero".into()));
                }
            }
            ConstraintSet::FinitePointSet { points } => {
                if points.is_empty() {
                    return Err(SolverError::InvalidParameter("finite set empty".into()));
                }
                let d = points[0].len();
                if d == 0 || points.iter().any(|p| p.len() != d) {
                    return Err(SolverError::InvalidParameter("finite set point dims differ".into()));
                }
            }
            ConstraintSet::IntervalUnion { intervals } => {
                if intervals.is_empty() {
                    return Err(SolverError::InvalidParameter("interval union empty".into()));
                }
                for w in intervals.windows(2) {
                    if w[0].1 >= w[1].0 {
                        return Err(SolverError::InvalidParameter(
                            "intervals must be sorted and disjoint".into(),
                        ));
                    }
                }
                if intervals.iter().any(|(a, b)| a > b) {
                    return Err(SolverError::InvalidParameter("interval with lo > hi".into()));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ConstraintSet::WholeSpace { dim } => *dim,
            ConstraintSet::Box { lo, .. } => lo.len(),
            ConstraintSet::Ball { center, .. } => center.len(),
            ConstraintSet::Halfspace { normal, .. } => normal.len(),
            ConstraintSet::FinitePointSet { points } => points[0].len(),
            ConstraintSet::IntervalUnion { .. } => 1,
        }
    }

    /// Whether the set is convex (projection is then non-expansive).
    pub fn is_convex(&self) -> bool {
        matches!(
            self,
            ConstraintSet::WholeSpace { .. }
                | ConstraintSet::Box { .. }
                | ConstraintSet::Ball { .. }
                | ConstraintSet::Halfspace { .. }
        ) || matches!(self, ConstraintSet::IntervalUnion { intervals } if intervals.len() == 1)
            || matches!(self, ConstraintSet::FinitePointSet { points } if points.len() == 1)
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(SolverError::DimensionMismatch { expected: self.dim(), got: p.len() });
        }
        Ok(())
    }

}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Euclidean distance from `p` to the set; `0` iff `p` belongs to it.
pub fn dist(p: &[f64], s: &ConstraintSet) -> Result<f64> {
    Ok(norm(&sub(p, &project(p, s)?)))
}

/// Closest point of the set; ties broken lexicographically smallest.
pub fn project(p: &[f64], s: &ConstraintSet) -> Result<Vec<f64>> {
    s.check_dim(p)?;
    Ok(match s {
        ConstraintSet::WholeSpace { .. } => p.to_vec(),
        ConstraintSet::Box { lo, hi } => p
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(x, (l, h))| x.max(*l).min(*h))
            .collect(),
        ConstraintSet::Ball { center, radius } => {
            let d = sub(p, center);
            let n = norm(&d);
            if n <= *radius {
                p.to_vec()
            } else if n == 0.0 {
                // radius < 0 is rejected by validate; n == 0 with radius >= 0
                // means p = center which is inside
                p.to_vec()
            } else {
                center.iter().zip(&d).map(|(c, x)| c + x * radius / n).collect()
            }
        }
        ConstraintSet::Halfspace { normal, offset } => {
            let np: f64 = normal.iter().zip(p).map(|(n, x)| n * x).sum();
            if np <= *offset {
                p.to_vec()
            } else {
                let n2: f64 = normal.iter().map(|x| x * x).sum();
                let t = (np - offset) / n2;
                p.iter().zip(normal).map(|(x, n)| x - t * n).collect()
            }
        }
        ConstraintSet::FinitePointSet { points } => {
            let mut best: Option<(&Vec<f64>, f64)> = None;
            for q in points {
                let dq = norm(&sub(p, q));
                best = Some(match best {
                    None => (q, dq),
                    Some((bq, bd)) => {
                        if dq < bd - 1e-15 * (1.0 + bd) {
                            (q, dq)
                        } else if (dq - bd).abs() <= 1e-15 * (1.0 + bd) && lex_less(q, bq) {
                            (q, dq)
                        } else {
                            (bq, bd)
                        }
                    }
                });
            }
            best.expect("finite set validated nonempty").0.clone()
        }
        ConstraintSet::IntervalUnion { intervals } => {
            let x = p[0];
            let mut best_q = x.max(intervals[0].0).min(intervals[0].1);
            let mut best_d = (x - best_q).abs();
            for &(a, b) in &intervals[1..] {
                let q = x.max(a).min(b);
                let dq = (x - q).abs();
                if dq < best_d - 1e-15 * (1.0 + best_d)
                    || ((dq - best_d).abs() <= 1e-15 * (1.0 + best_d) && q < best_q)
                {
                    best_d = dq;
                    best_q = q;
                }
            }
            vec![best_q]
        }
    })
}

/// Distance from `p` to the transformed set `a_sqrt·C`.
///
/// Exact for d = 1 and for box/ball/halfspace under a diagonal transform; the
/// remaining convex cases use a projected-gradient search with a bounded
/// iteration budget. Finite point sets are always exact by enumeration.
pub fn dist_transformed(p: &[f64], s: &ConstraintSet, a_sqrt: &SpdMatrix) -> Result<f64> {
    let q = project_transformed(p, s, a_sqrt)?;
    Ok(norm(&sub(p, &q)))
}

/// The point of `a_sqrt·C` attaining [`dist_transformed`].
pub fn project_transformed(p: &[f64], s: &ConstraintSet, a_sqrt: &SpdMatrix) -> Result<Vec<f64>> {
    s.check_dim(p)?;
    if a_sqrt.dim() != s.dim() {
        return Err(SolverError::DimensionMismatch { expected: s.dim(), got: a_sqrt.dim() });
    }
    let d = s.dim();

    if d == 1 {
        return Ok(vec![project_scaled_1d(p[0], s, a_sqrt.get(0, 0))]);
    }

    // finite sets: enumerate transformed points exactly
    if let ConstraintSet::FinitePointSet { points } = s {
        let mapped: Vec<Vec<f64>> = points.iter().map(|c| a_sqrt.mul_vec(c)).collect();
        return project(p, &ConstraintSet::FinitePointSet { points: mapped });
    }

    let diagonal = {
        let mut diag = true;
        for i in 0..d {
            for j in 0..d {
                if i != j && a_sqrt.get(i, j).abs() > 1e-14 {
                    diag = false;
                }
            }
        }
        diag
    };

    match s {
        ConstraintSet::WholeSpace { .. } => Ok(p.to_vec()),
        ConstraintSet::Box { lo, hi } if diagonal => {
            // A·box is the box with scaled per-axis bounds
            let q: Vec<f64> = (0..d)
                .map(|i| {
                    let sii = a_sqrt.get(i, i);
                    p[i].max(lo[i] * sii).min(hi[i] * sii)
                })
                .collect();
            Ok(q)
        }
        ConstraintSet::Halfspace { normal, offset } if diagonal => {
            // {Ax : n·x <= o} = {y : (A^{-1}n)·y <= o}
            let m: Vec<f64> = (0..d).map(|i| normal[i] / a_sqrt.get(i, i)).collect();
            project(p, &ConstraintSet::Halfspace { normal: m, offset: *offset })
        }
        ConstraintSet::Ball { center, radius } if diagonal => {
            project_ellipsoid_diag(p, center, *radius, a_sqrt)
        }
        _ => projected_gradient(p, s, a_sqrt),
    }
}

/// Allocation-free d = 1 fast path: the closest point of `scale·C` to `p`
/// (`scale > 0`). Generator evaluations sit on this in their hot loop.
pub fn project_scaled_1d(p: f64, s: &ConstraintSet, scale: f64) -> f64 {
    debug_assert!(s.dim() == 1 && scale > 0.0);
    match s {
        ConstraintSet::WholeSpace { .. } => p,
        ConstraintSet::Box { lo, hi } => p.clamp(lo[0] * scale, hi[0] * scale),
        ConstraintSet::Ball { center, radius } => {
            let c = center[0] * scale;
            let r = radius * scale;
            (p - c).clamp(-r, r) + c
        }
        ConstraintSet::Halfspace { normal, offset } => {
            let bound = offset / normal[0] * scale;
            if normal[0] > 0.0 {
                p.min(bound)
            } else {
                p.max(bound)
            }
        }
        ConstraintSet::FinitePointSet { points } => {
            let mut best_q = points[0][0] * scale;
            let mut best_d = (p - best_q).abs();
            for q in &points[1..] {
                let qs = q[0] * scale;
                let dq = (p - qs).abs();
                if dq < best_d - 1e-15 * (1.0 + best_d)
                    || ((dq - best_d).abs() <= 1e-15 * (1.0 + best_d) && qs < best_q)
                {
                    best_d = dq;
                    best_q = qs;
                }
            }
            best_q
        }
        ConstraintSet::IntervalUnion { intervals } => {
            let mut best_q = p.clamp(intervals[0].0 * scale, intervals[0].1 * scale);
            let mut best_d = (p - best_q).abs();
            for &(a, b) in &intervals[1..] {
                let q = p.clamp(a * scale, b * scale);
                let dq = (p - q).abs();
                if dq < best_d - 1e-15 * (1.0 + best_d)
                    || ((dq - best_d).abs() <= 1e-15 * (1.0 + best_d) && q < best_q)
                {
                    best_d = dq;
                    best_q = q;
                }
            }
            best_q
        }
    }
}

/// Projection of `p` onto `{A(c + r u) : |u| <= 1}` for diagonal `A`, via the
/// secular equation in the Lagrange multiplier.
fn project_ellipsoid_diag(
    p: &[f64],
    center: &[f64],
    radius: f64,
    a_sqrt: &SpdMatrix,
) -> Result<Vec<f64>> {
    let d = p.len();
    let av: Vec<f64> = (0..d).map(|i| a_sqrt.get(i, i)).collect();
    let q: Vec<f64> = (0..d).map(|i| p[i] - av[i] * center[i]).collect();
    // inside test: u = A^{-1} q / r
    if radius > 0.0 {
        let u_norm = (0..d).map(|i| (q[i] / (av[i] * radius)).powi(2)).sum::<f64>().sqrt();
        if u_norm <= 1.0 {
            return Ok(p.to_vec());
        }
    } else {
        return Ok((0..d).map(|i| av[i] * center[i]).collect());
    }
    // minimize |q - r A u|^2 over |u| = 1: u_i = r a_i q_i / (r^2 a_i^2 + λ),
    // find λ >= λ_min with |u| = 1 by bisection.
    let g = |lam: f64| -> f64 {
        (0..d)
            .map(|i| {
                let num = radius * av[i] * q[i];
                (num / (radius * radius * av[i] * av[i] + lam)).powi(2)
            })
            .sum::<f64>()
            - 1.0
    };
    // λ = 0 gives u = A^{-1} q / r scaled; since p is outside, g(0) > 0.
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut iters = 0usize;
    while g(hi) > 0.0 {
        hi *= 2.0;
        iters += 1;
        if iters > 200 {
            return Err(SolverError::ProjectionNoConvergence { iterations: iters });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lam = 0.5 * (lo + hi);
    let u: Vec<f64> = (0..d)
        .map(|i| radius * av[i] * q[i] / (radius * radius * av[i] * av[i] + lam))
        .collect();
    Ok((0..d).map(|i| av[i] * (center[i] + radius * u[i])).collect())
}

/// Convex fallback: minimize `|p − A c|²/2` over `c ∈ C` by projected
/// gradient with step `1/λ_max(A²)`; returns `A c*`.
fn projected_gradient(p: &[f64], s: &ConstraintSet, a_sqrt: &SpdMatrix) -> Result<Vec<f64>> {
    let lmax = a_sqrt.max_eigenvalue();
    let step = 1.0 / (lmax * lmax);
    // start from the untransformed projection of A^{-1} p
    let inv = a_sqrt.inverse();
    let mut c = project(&inv.mul_vec(p), s)?;
    let scale = 1.0 + norm(p);
    for _ in 0..PROJ_MAX_ITERS {
        let ac = a_sqrt.mul_vec(&c);
        let resid = sub(&ac, p);
        let grad = a_sqrt.mul_vec(&resid);
        let trial: Vec<f64> = c.iter().zip(&grad).map(|(x, g)| x - step * g).collect();
        let next = project(&trial, s)?;
        let delta = norm(&sub(&next, &c));
        c = next;
        if delta <= 1e-13 * scale {
            return Ok(a_sqrt.mul_vec(&c));
        }
    }
    Err(SolverError::ProjectionNoConvergence { iterations: PROJ_MAX_ITERS })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box2(lo: f64, hi: f64) -> ConstraintSet {
        ConstraintSet::Box { lo: vec![lo, lo], hi: vec![hi, hi] }
    }

    #[test]
    fn dist_examples() {
        assert!((dist(&[1.5, 0.5], &box2(0.0, 1.0)).unwrap() - 0.5).abs() < 1e-12);
        let iu = ConstraintSet::IntervalUnion { intervals: vec![(0.0, 1.0)] };
        assert_eq!(dist(&[0.3], &iu).unwrap(), 0.0);
        let fs = ConstraintSet::FinitePointSet { points: vec![vec![-1.0], vec![2.0]] };
        assert!((dist(&[0.0], &fs).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn project_examples() {
        let q = project(&[1.5, 0.5], &box2(0.0, 1.0)).unwrap();
        assert_eq!(q, vec![1.0, 0.5]);
        // tie broken to the lexicographically smaller point
        let fs = ConstraintSet::FinitePointSet { points: vec![vec![1.0], vec![0.0]] };
        assert_eq!(project(&[0.5], &fs).unwrap(), vec![0.0]);
        // radial scaling onto the unit ball
        let ball = ConstraintSet::Ball { center: vec![0.0, 0.0], radius: 1.0 };
        let q = project(&[3.0, 4.0], &ball).unwrap();
        assert!((q[0] - 0.6).abs() < 1e-12 && (q[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn transformed_examples() {
        let s = ConstraintSet::Box { lo: vec![0.0], hi: vec![1.0] };
        let a2 = SpdMatrix::scalar(4.0).unwrap().sqrt(); // a^{1/2} = 2
        assert!((dist_transformed(&[3.0], &s, &a2).unwrap() - 1.0).abs() < 1e-12);
        assert!((project_transformed(&[3.0], &s, &a2).unwrap()[0] - 2.0).abs() < 1e-12);

        let singleton = ConstraintSet::FinitePointSet { points: vec![vec![0.0]] };
        let a03 = SpdMatrix::scalar(0.09).unwrap().sqrt();
        assert!((dist_transformed(&[0.6667], &singleton, &a03).unwrap() - 0.6667).abs() < 1e-12);

        let a3 = SpdMatrix::scalar(0.09).unwrap().sqrt();
        assert!((project_transformed(&[0.15], &s, &a3).unwrap()[0] - 0.15).abs() < 1e-12);
        assert_eq!(project_transformed(&[-1.0], &s, &a3).unwrap()[0], 0.0);
        // membership: p in a_sqrt * s has distance zero
        assert_eq!(dist_transformed(&[0.25], &s, &a3).unwrap(), 0.0);
    }

    #[test]
    fn identity_transform_matches_plain_dist() {
        let shapes: Vec<ConstraintSet> = vec![
            box2(-0.5, 2.0),
            ConstraintSet::Ball { center: vec![0.3, -0.2], radius: 0.7 },
            ConstraintSet::Halfspace { normal: vec![1.0, 1.0], offset: 0.5 },
            ConstraintSet::FinitePointSet { points: vec![vec![0.0, 0.0], vec![1.0, -1.0]] },
        ];
        let id = SpdMatrix::identity(2);
        for s in &shapes {
            for p in [[1.5, 0.5], [-2.0, 3.0], [0.1, 0.1]] {
                let d0 = dist(&p, s).unwrap();
                let dt = dist_transformed(&p, s, &id).unwrap();
                assert!((d0 - dt).abs() < 1e-10, "{s:?}");
            }
        }
    }

    #[test]
    fn diagonal_transform_of_ball_and_halfspace() {
        let a = SpdMatrix::diag(&[4.0, 0.25]).unwrap().sqrt(); // diag(2, 0.5)
        let ball = ConstraintSet::Ball { center: vec![0.0, 0.0], radius: 1.0 };
        // transformed set: ellipse semi-axes (2, 0.5); p on the long axis
        let q = project_transformed(&[3.0, 0.0], &ball, &a).unwrap();
        assert!((q[0] - 2.0).abs() < 1e-9 && q[1].abs() < 1e-9);
        // interior point unchanged
        let q = project_transformed(&[0.5, 0.1], &ball, &a).unwrap();
        assert_eq!(q, vec![0.5, 0.1]);

        let hs = ConstraintSet::Halfspace { normal: vec![1.0, 0.0], offset: 1.0 };
        // {Ax : x1 <= 1} = {y : y1 <= 2}
        let q = project_transformed(&[3.0, 5.0], &hs, &a).unwrap();
        assert!((q[0] - 2.0).abs() < 1e-12 && (q[1] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn general_transform_agrees_with_dense_search() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a = SpdMatrix::new(2, vec![0.5, 0.2, 0.2, 0.8]).unwrap().sqrt();
        let s = box2(-1.0, 1.0);
        for _ in 0..20 {
            let p = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let dt = dist_transformed(&p, &s, &a).unwrap();
            // dense grid over the box, mapped through a
            let mut best = f64::INFINITY;
            let n = 400;
            for i in 0..=n {
                for j in 0..=n {
                    let c = [-1.0 + 2.0 * i as f64 / n as f64, -1.0 + 2.0 * j as f64 / n as f64];
                    let ac = a.mul_vec(&c);
                    let dd = ((p[0] - ac[0]).powi(2) + (p[1] - ac[1]).powi(2)).sqrt();
                    best = best.min(dd);
                }
            }
            assert!((dt - best).abs() < 2e-2, "grid oracle {best} vs {dt}");
            assert!(dt <= best + 1e-9, "search must not overshoot the oracle");
        }
    }

    #[test]
    fn grid_oracle_1d_brute_force() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = rng.gen_range(-1.0..0.5);
            let b = a + rng.gen_range(0.1..1.0);
            let c = b + rng.gen_range(0.1..1.0);
            let d = c + rng.gen_range(0.1..1.0);
            let s = ConstraintSet::IntervalUnion { intervals: vec![(a, b), (c, d)] };
            let p = [rng.gen_range(-3.0..3.0)];
            let exact = dist(&p, &s).unwrap();
            let proj = project(&p, &s).unwrap()[0];
            // 1e5-point grid search oracle
            let mut best = f64::INFINITY;
            let mut best_q = f64::NAN;
            for k in 0..100_000 {
                let q = a + (d - a) * k as f64 / 99_999.0;
                let inside = (q >= a && q <= b) || (q >= c && q <= d);
                if inside {
                    let dd = (p[0] - q).abs();
                    if dd < best {
                        best = dd;
                        best_q = q;
                    }
                }
            }
            let res = (d - a) / 99_999.0;
            assert!((exact - best).abs() <= res, "dist vs grid oracle");
            assert!((proj - best_q).abs() <= res + 1e-9 || (p[0] - proj).abs() <= best + 1e-12);
        }
    }

    #[test]
    fn projection_properties_randomized() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let shapes: Vec<ConstraintSet> = vec![
            ConstraintSet::WholeSpace { dim: 2 },
            box2(-0.7, 0.4),
            ConstraintSet::Ball { center: vec![0.1, 0.2], radius: 0.8 },
            ConstraintSet::Halfspace { normal: vec![1.0, -2.0], offset: 0.3 },
            ConstraintSet::FinitePointSet {
                points: vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![-1.0, 0.5]],
            },
        ];
        for s in &shapes {
            s.validate().unwrap();
            for _ in 0..200 {
                let p = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let q = project(&p, s).unwrap();
                let dd = dist(&p, s).unwrap();
                let pq = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                assert!((pq - dd).abs() < 1e-10);
                // dist = 0 iff projection is the identity
                if dd < 1e-10 {
                    assert!(pq < 1e-10);
                }
                assert!(dist(&q, s).unwrap() < 1e-10, "projection lands in the set");
                if s.is_convex() {
                    let p2 = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                    let q2 = project(&p2, s).unwrap();
                    let dq = ((q[0] - q2[0]).powi(2) + (q[1] - q2[1]).powi(2)).sqrt();
                    let dp = ((p[0] - p2[0]).powi(2) + (p[1] - p2[1]).powi(2)).sqrt();
                    assert!(dq <= dp + 1e-10, "non-expansive on convex sets");
                }
            }
        }
    }

    #[test]
    fn validate_rejects_malformed_sets() {
        assert!(ConstraintSet::Box { lo: vec![1.0], hi: vec![0.0] }.validate().is_err());
        assert!(ConstraintSet::Ball { center: vec![0.0], radius: -1.0 }.validate().is_err());
        assert!(ConstraintSet::IntervalUnion { intervals: vec![(0.0, 1.0), (0.5, 2.0)] }
            .validate()
            .is_err());
        assert!(ConstraintSet::FinitePointSet { points: vec![] }.validate().is_err());
        assert!(matches!(
            dist(&[0.0], &ConstraintSet::WholeSpace { dim: 2 }),
            Err(SolverError::DimensionMismatch { .. })
        ));
    }
}
