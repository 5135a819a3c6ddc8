//! Quadratic generator library.
//!
//! A generator is the driver `F_t(y, z, a)` of a quadratic BSDE, evaluated
//! against a volatility scenario `a`. Every generator carries declared
//! certificates — quadratic growth `(ᾱ, β̄, γ)`, a Lipschitz-in-y constant
//! when one exists, and the local Lipschitz-in-z pair `(C, φ̄)` — which the
//! solver trusts for step-size control and the diagnostics use for bounds.
//! Certificates are data, not proofs: [`audit_certificates`] re-checks them by
//! randomized sampling so a wrong declaration is detectable.
//!
//! The module provides the two market generators (exponential and power
//! utility), Fenchel–Legendre conjugation of a Hamiltonian over a scenario
//! grid, the exponential-transform generator used by the alternative solve
//! path, and the Lipschitz truncation used by the monotone convergence tests.

use crate::constraints::{self, ConstraintSet};
use crate::error::SolverError;
use crate::spd::{Scenario, SpdMatrix, VolBounds};
use crate::Result;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

/// Quadratic growth certificate: `|F| ≤ ᾱ + β̄|y| + (γ/2)|a^{1/2}z|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCertificate {
    pub alpha_bar: f64,
    pub beta_bar: f64,
    pub gamma: f64,
}

/// Local Lipschitz-in-z certificate:
/// `|F(z) − F(z′)| ≤ c·(φ̄ + |a^{1/2}z| + |a^{1/2}z′|)·|a^{1/2}(z−z′)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzZCertificate {
    pub c: f64,
    pub phi_bar: f64,
}

type EvalFn = dyn Fn(f64, f64, &[f64], &Scenario) -> f64 + Send + Sync;

/// A quadratic driver with its certificates.
#[derive(Clone)]
pub struct QuadraticGenerator {
    dim: usize,
    eval: Arc<EvalFn>,
    growth: GrowthCertificate,
    lipschitz_y: Option<f64>,
    lipschitz_z: LipschitzZCertificate,
    label: String,
}

impl std::fmt::Debug for QuadraticGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadraticGenerator")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("growth", &self.growth)
            .field("lipschitz_y", &self.lipschitz_y)
            .field("lipschitz_z", &self.lipschitz_z)
            .finish()
    }
}

impl QuadraticGenerator {
    pub fn new(
        dim: usize,
        eval: Arc<EvalFn>,
        growth: GrowthCertificate,
        lipschitz_y: Option<f64>,
        lipschitz_z: LipschitzZCertificate,
        label: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(SolverError::InvalidParameter("generator dimension must be positive".into()));
        }
        if !(growth.gamma > 0.0) {
            return Err(SolverError::InvalidParameter("growth gamma must be positive".into()));
        }
        if growth.alpha_bar < 0.0 || growth.beta_bar < 0.0 {
            return Err(SolverError::InvalidParameter("growth certificate must be nonnegative".into()));
        }
        if let Some(mu) = lipschitz_y {
            if mu < 0.0 {
                return Err(SolverError::InvalidParameter("lipschitz_y must be nonnegative".into()));
            }
        }
        Ok(Self { dim, eval: eval.clone(), growth, lipschitz_y, lipschitz_z, label: label.into() })
    }

    /// The zero driver (heat-equation regime).
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            eval: Arc::new(|_, _, _, _| 0.0),
            growth: GrowthCertificate { alpha_bar: 0.0, beta_bar: 0.0, gamma: 1.0 },
            lipschitz_y: Some(0.0),
            lipschitz_z: LipschitzZCertificate { c: 0.0, phi_bar: 0.0 },
            label: "zero".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: f64, y: f64, z: &[f64], scenario: &Scenario) -> f64 {
        (self.eval)(t, y, z, scenario)
    }

    pub fn growth(&self) -> GrowthCertificate {
        self.growth
    }

    pub fn lipschitz_y(&self) -> Option<f64> {
        self.lipschitz_y
    }

    pub fn lipschitz_z(&self) -> LipschitzZCertificate {
        self.lipschitz_z
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// A-priori sup-norm bound `e^{β̄}(ᾱ + ‖ξ‖∞)` for solutions with terminal
    /// data bounded by `xi_bound`.
    pub fn apriori_bound(&self, xi_bound: f64) -> f64 {
        (self.growth.beta_bar).exp() * (self.growth.alpha_bar + xi_bound)
    }
}

/// Deterministic, bounded drift `b(t)` given by a piecewise-linear table.
#[derive(Debug, Clone, PartialEq)]
pub struct Drift {
    dim: usize,
    knots: Vec<(f64, Vec<f64>)>,
}

impl Drift {
    pub fn constant(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() || b.iter().any(|x| !x.is_finite()) {
            return Err(SolverError::InvalidParameter("drift vector must be finite and nonempty".into()));
        }
        let dim = b.len();
        Ok(Self { dim, knots: vec![(0.0, b)] })
    }

    pub fn table(knots: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(SolverError::InvalidParameter("drift table empty".into()));
        }
        let dim = knots[0].1.len();
        if dim == 0 {
            return Err(SolverError::InvalidParameter("drift dimension zero".into()));
        }
        for w in knots.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(SolverError::InvalidParameter("drift knots must be strictly increasing".into()));
            }
        }
        if knots.iter().any(|(t, b)| !t.is_finite() || b.len() != dim || b.iter().any(|x| !x.is_finite())) {
            return Err(SolverError::InvalidParameter("drift table malformed".into()));
        }
        Ok(Self { dim, knots })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Piecewise-linear evaluation, constant beyond the table range.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let k = &self.knots;
        if t <= k[0].0 || k.len() == 1 {
            out.copy_from_slice(&k[0].1);
            return;
        }
        if t >= k[k.len() - 1].0 {
            out.copy_from_slice(&k[k.len() - 1].1);
            return;
        }
        let mut i = 0;
        while k[i + 1].0 < t {
            i += 1;
        }
        let (t0, ref b0) = k[i];
        let (t1, ref b1) = k[i + 1];
        let w = (t - t0) / (t1 - t0);
        for j in 0..self.dim {
            out[j] = b0[j] + w * (b1[j] - b0[j]);
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    /// Uniform bound `M = sup_t |b(t)|`; attained at a knot since the norm of
    /// a linear interpolant is convex on each segment.
    pub fn bound(&self) -> f64 {
        self.knots
            .iter()
            .map(|(_, b)| b.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Utility flavour and its risk parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityKind {
    /// `U(x) = −exp(−c·x)`, `c > 0`.
    Exponential { risk_aversion: f64 },
    /// `U(x) = x^γ / γ`, `γ < 1`, `γ ≠ 0`.
    Power { exponent: f64 },
}

/// Market data for a robust utility problem.
#[derive(Debug, Clone)]
pub struct UtilityParams {
    pub kind: UtilityKind,
    pub drift: Drift,
    pub constraint: Arc<ConstraintSet>,
}

impl UtilityParams {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            UtilityKind::Exponential { risk_aversion } => {
                if !(risk_aversion > 0.0) {
                    return Err(SolverError::InvalidParameter(
                        "exponential utility requires risk aversion c > 0".into(),
                    ));
                }
            }
            UtilityKind::Power { exponent } => {
                if !(exponent < 1.0) || exponent == 0.0 {
                    return Err(SolverError::InvalidParameter(
                        "power utility requires exponent < 1 and != 0".into(),
                    ));
                }
            }
        }
        self.constraint.validate()?;
        if self.constraint.dim() != self.drift.dim() {
            return Err(SolverError::DimensionMismatch {
                expected: self.drift.dim(),
                got: self.constraint.dim(),
            });
        }
        if !self.drift.bound().is_finite() {
            return Err(SolverError::InvalidParameter("drift bound must be finite".into()));
        }
        Ok(())
    }
}

/// Constraint-geometry constants entering the market certificates:
/// `k_upper` bounds `inf{|r| : r ∈ a^{1/2}C}` and `k_lower²` bounds
/// `tr(a^{-1})·M²`, both uniformly over the scenario bounds.
fn constraint_constants(
    constraint: &ConstraintSet,
    drift_bound: f64,
    bounds: &VolBounds,
) -> Result<(f64, f64)> {
    let c0 = constraints::project(&vec![0.0; constraint.dim()], constraint)?;
    let c0_norm = c0.iter().map(|x| x * x).sum::<f64>().sqrt();
    let k_upper = bounds.hi.max_eigenvalue().sqrt() * c0_norm;
    let k_lower = (bounds.lo.inverse().trace() * drift_bound * drift_bound).sqrt();
    Ok((k_upper, k_lower))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(v: &[f64]) -> f64 {
    dot(v, v)
}

/// Squared distance of `target` to `a^{1/2}·C` under the given scenario.
fn dist_sq_transformed(target: &[f64], constraint: &ConstraintSet, sc: &Scenario) -> f64 {
    if constraint.dim() == 1 {
        let q = constraints::project_scaled_1d(target[0], constraint, sc.sqrt.get(0, 0));
        let d = target[0] - q;
        return d * d;
    }
    let q = constraints::project_transformed(target, constraint, &sc.sqrt)
        .expect("transformed projection failed for validated constraint set");
    target.iter().zip(&q).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The exponential-utility generator
/// `F(z, a) = (c/2)·dist²(a^{1/2}z + (1/c)a^{-1/2}b, a^{1/2}C) − z·b − |a^{-1/2}b|²/(2c)`,
/// with its certificate assembled from the constraint geometry over the
/// scenario bounds.
pub fn exp_generator(u: &UtilityParams, bounds: &VolBounds) -> Result<QuadraticGenerator> {
    u.validate()?;
    let c = match u.kind {
        UtilityKind::Exponential { risk_aversion } => risk_aversion,
        _ => return Err(SolverError::InvalidParameter("exp_generator requires exponential kind".into())),
    };
    let dim = u.drift.dim();
    if bounds.dim() != dim {
        return Err(SolverError::DimensionMismatch { expected: dim, got: bounds.dim() });
    }
    let m = u.drift.bound();
    let (k_upper, k_lower) = constraint_constants(&u.constraint, m, bounds)?;
    let growth = GrowthCertificate {
        alpha_bar: 2.0 * c * k_upper * k_upper + (5.0 + c) / (2.0 * c) * k_lower * k_lower,
        beta_bar: 0.0,
        gamma: 1.0 + 2.0 * c,
    };
    let lipschitz_z =
        LipschitzZCertificate { c: c / 2.0, phi_bar: 2.0 * k_upper + 4.0 / c * k_lower };
    let drift = u.drift.clone();
    let cset = u.constraint.clone();
    let eval: Arc<EvalFn> = Arc::new(move |t, _y, z, sc| {
        if dim == 1 {
            let b = {
                let mut bb = [0.0];
                drift.eval_into(t, &mut bb);
                bb[0]
            };
            let s = sc.sqrt.get(0, 0);
            let ib = b / s;
            let target = s * z[0] + ib / c;
            let q = constraints::project_scaled_1d(target, &cset, s);
            let d = target - q;
            return (c / 2.0) * d * d - z[0] * b - ib * ib / (2.0 * c);
        }
        let b = drift.eval(t);
        let w = sc.sqrt.mul_vec(z);
        let ib = sc.inv_sqrt.mul_vec(&b);
        let target: Vec<f64> = w.iter().zip(&ib).map(|(wi, bi)| wi + bi / c).collect();
        let d2 = dist_sq_transformed(&target, &cset, sc);
        (c / 2.0) * d2 - dot(z, &b) - norm2(&ib) / (2.0 * c)
    });
    QuadraticGenerator::new(dim, eval, growth, Some(0.0), lipschitz_z, "exponential-utility")
}

/// The power-utility generator
/// `F(z, a) = −γ(1−γ)/2·dist²((a^{1/2}z + a^{-1/2}b)/(1−γ), a^{1/2}C)
///  + γ|a^{1/2}z + a^{-1/2}b|²/(2(1−γ)) + |a^{1/2}z|²/2`.
pub fn power_generator(u: &UtilityParams, bounds: &VolBounds) -> Result<QuadraticGenerator> {
    u.validate()?;
    let gamma_u = match u.kind {
        UtilityKind::Power { exponent } => exponent,
        _ => return Err(SolverError::InvalidParameter("power_generator requires power kind".into())),
    };
    let dim = u.drift.dim();
    if bounds.dim() != dim {
        return Err(SolverError::DimensionMismatch { expected: dim, got: bounds.dim() });
    }
    let m = u.drift.bound();
    let (k_upper, k_lower) = constraint_constants(&u.constraint, m, bounds)?;
    let one_mg = 1.0 - gamma_u;
    let g_ratio = gamma_u.abs() / one_mg;
    let growth = GrowthCertificate {
        alpha_bar: 3.0 * g_ratio * k_lower * k_lower + gamma_u.abs() * one_mg * k_upper * k_upper,
        beta_bar: 0.0,
        gamma: 1.0 + 6.0 * g_ratio,
    };
    let cz = g_ratio + 0.5;
    let lipschitz_z = LipschitzZCertificate {
        c: cz,
        phi_bar: (2.0 * g_ratio * k_lower + gamma_u.abs() * k_upper) / cz,
    };
    let drift = u.drift.clone();
    let cset = u.constraint.clone();
    let eval: Arc<EvalFn> = Arc::new(move |t, _y, z, sc| {
        if dim == 1 {
            let b = {
                let mut bb = [0.0];
                drift.eval_into(t, &mut bb);
                bb[0]
            };
            let s = sc.sqrt.get(0, 0);
            let w = s * z[0];
            let u_val = w + b / s;
            let target = u_val / one_mg;
            let q = constraints::project_scaled_1d(target, &cset, s);
            let d = target - q;
            return -(gamma_u * one_mg / 2.0) * d * d
                + gamma_u * u_val * u_val / (2.0 * one_mg)
                + 0.5 * w * w;
        }
        let b = drift.eval(t);
        let w = sc.sqrt.mul_vec(z);
        let ib = sc.inv_sqrt.mul_vec(&b);
        let u_vec: Vec<f64> = w.iter().zip(&ib).map(|(wi, bi)| wi + bi).collect();
        let target: Vec<f64> = u_vec.iter().map(|v| v / one_mg).collect();
        let d2 = dist_sq_transformed(&target, &cset, sc);
        -(gamma_u * one_mg / 2.0) * d2 + gamma_u * norm2(&u_vec) / (2.0 * one_mg)
            + 0.5 * norm2(&w)
    });
    QuadraticGenerator::new(dim, eval, growth, Some(0.0), lipschitz_z, "power-utility")
}

/// Fenchel–Legendre conjugate over a finite grid:
/// `sup_{η ∈ D_H} { tr(a·η)/2 − H(η) }`, exhaustive maximization. Each grid
/// point is a row-major d×d matrix; the grid must contain the zero matrix.
pub fn fenchel_conjugate(
    h: impl Fn(&[f64]) -> f64,
    eta_grid: &[Vec<f64>],
    a: &SpdMatrix,
) -> Result<f64> {
    if eta_grid.is_empty() {
        return Err(SolverError::EmptyGrid("Fenchel conjugation grid".into()));
    }
    let d = a.dim();
    let has_zero = eta_grid.iter().any(|eta| eta.iter().all(|x| x.abs() <= 1e-12));
    if !has_zero {
        return Err(SolverError::InvalidParameter("conjugation grid must contain 0".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for eta in eta_grid {
        if eta.len() != d * d {
            return Err(SolverError::DimensionMismatch { expected: d * d, got: eta.len() });
        }
        let mut tr = 0.0;
        for i in 0..d {
            for j in 0..d {
                tr += a.get(i, j) * eta[j * d + i];
            }
        }
        best = best.max(0.5 * tr - h(eta));
    }
    Ok(best)
}

/// Smooth bump built from `e^{-1/x}` mollifiers: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let f = (-1.0 / x).exp();
    let g = (-1.0 / (1.0 - x)).exp();
    f / (f + g)
}

/// The exponential-transform generator
/// `Ĝ(t, Y, Z, a) = φ(Y)·[γY·F(t, ln(Y)/γ, Z/(γY), a) − |a^{1/2}Z|²/(2Y)]`,
/// where φ is a C^∞ cutoff equal to 1 on `[e^{-γM}, e^{γM}]` and 0 outside
/// `[e^{-γ(M+1)}, e^{γ(M+1)}]`. φ is evaluated first, so the bracket is never
/// touched where it could divide by a non-positive `Y`.
pub fn exp_transform_generator(
    f: &QuadraticGenerator,
    gamma: f64,
    m_bound: f64,
) -> Result<QuadraticGenerator> {
    if !(gamma > 0.0) {
        return Err(SolverError::InvalidParameter("transform gamma must be positive".into()));
    }
    if !(m_bound > 0.0 && m_bound.is_finite()) {
        return Err(SolverError::InvalidParameter("transform bound must be positive".into()));
    }
    let dim = f.dim();
    let lo1 = (-gamma * (m_bound + 1.0)).exp();
    let lo0 = (-gamma * m_bound).exp();
    let hi0 = (gamma * m_bound).exp();
    let hi1 = (gamma * (m_bound + 1.0)).exp();
    let inner = f.clone();
    let eval: Arc<EvalFn> = Arc::new(move |t, big_y, big_z, sc| {
        let phi = if big_y <= lo1 || big_y >= hi1 {
            0.0
        } else if big_y >= lo0 && big_y <= hi0 {
            1.0
        } else if big_y < lo0 {
            smoothstep((big_y - lo1) / (lo0 - lo1))
        } else {
            smoothstep((hi1 - big_y) / (hi1 - hi0))
        };
        if phi == 0.0 {
            return 0.0;
        }
        let y = big_y.ln() / gamma;
        let scale = 1.0 / (gamma * big_y);
        let quad = sc.a.quad_form(big_z);
        let fv = if dim == 1 {
            let zz = [big_z[0] * scale];
            inner.eval(t, y, &zz, sc)
        } else {
            let zz: Vec<f64> = big_z.iter().map(|v| v * scale).collect();
            inner.eval(t, y, &zz, sc)
        };
        phi * (gamma * big_y * fv - quad / (2.0 * big_y))
    });
    let gf = f.growth();
    let e_plateau = (gamma * (m_bound + 1.0)).exp();
    let growth = GrowthCertificate {
        alpha_bar: gamma * e_plateau * (gf.alpha_bar + gf.beta_bar * (m_bound + 1.0)),
        beta_bar: 0.0,
        gamma: e_plateau * (gf.gamma / gamma + 1.0),
    };
    let lz = f.lipschitz_z();
    let c_hat = lz.c * e_plateau / gamma + e_plateau / 2.0;
    let lipschitz_z = LipschitzZCertificate {
        c: c_hat,
        phi_bar: if c_hat > 0.0 { lz.c * lz.phi_bar / c_hat } else { 0.0 },
    };
    // no uniform Lipschitz-in-Y constant: the cutoff multiplies a bracket
    // whose magnitude grows quadratically in Z
    QuadraticGenerator::new(dim, eval, growth, None, lipschitz_z, format!("exp-transform({})", f.label()))
}

/// Finite search grid for the Lipschitz truncation (d = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationGrid {
    pub y_min: f64,
    pub y_max: f64,
    pub y_count: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub z_count: usize,
    /// Upper bound on `|a^{1/2}|` over the scenarios the truncated generator
    /// will see; enters the declared growth certificate only.
    pub a_sqrt_max: f64,
}

impl TruncationGrid {
    fn validate(&self) -> Result<()> {
        if self.y_count < 2 || self.z_count < 2 {
            return Err(SolverError::EmptyGrid("truncation grid needs at least 2x2 points".into()));
        }
        if !(self.y_min < self.y_max && self.z_min < self.z_max) {
            return Err(SolverError::InvalidParameter("truncation grid bounds out of order".into()));
        }
        if !(self.a_sqrt_max > 0.0) {
            return Err(SolverError::InvalidParameter("a_sqrt_max must be positive".into()));
        }
        Ok(())
    }
}

/// Lipschitz truncation of a bounded generator (d = 1):
/// `Ĝⁿ(t, Y, Z) = max over grid (p, q) of G(t, p, q) − n|p − Y| − n|a^{1/2}(q − Z)|`.
///
/// The supremum over all rationals is replaced by an exhaustive search over
/// the finite grid; if the maximizer ever sits on the grid boundary the
/// returned generator raises its boundary-attainment flag, signalling that
/// the truncation value may be spurious there.
pub struct TruncatedGenerator {
    pub generator: QuadraticGenerator,
    boundary_hit: Arc<AtomicBool>,
}

impl TruncatedGenerator {
    pub fn boundary_attained(&self) -> bool {
        self.boundary_hit.load(Ordering::Relaxed)
    }
}

pub fn lipschitz_truncation(
    g: &QuadraticGenerator,
    n: usize,
    grid: &TruncationGrid,
) -> Result<TruncatedGenerator> {
    if g.dim() != 1 {
        return Err(SolverError::InvalidParameter("lipschitz truncation is d = 1 only".into()));
    }
    if n == 0 {
        return Err(SolverError::InvalidParameter("truncation index n must be positive".into()));
    }
    grid.validate()?;
    let inner = g.clone();
    let tg = grid.clone();
    let nf = n as f64;
    let flag = Arc::new(AtomicBool::new(false));
    let flag_c = flag.clone();
    let eval: Arc<EvalFn> = Arc::new(move |t, big_y, big_z, sc| {
        let s = sc.sqrt.get(0, 0);
        let dy = (tg.y_max - tg.y_min) / (tg.y_count - 1) as f64;
        let dz = (tg.z_max - tg.z_min) / (tg.z_count - 1) as f64;
        let mut best = f64::NEG_INFINITY;
        let mut best_i = 0usize;
        let mut best_j = 0usize;
        for i in 0..tg.y_count {
            let p = tg.y_min + i as f64 * dy;
            let pen_y = nf * (p - big_y).abs();
            for j in 0..tg.z_count {
                let q = tg.z_min + j as f64 * dz;
                let v = inner.eval(t, p, &[q], sc) - pen_y - nf * (s * (q - big_z[0])).abs();
                if v > best {
                    best = v;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if best_i == 0 || best_i == tg.y_count - 1 || best_j == 0 || best_j == tg.z_count - 1 {
            flag_c.store(true, Ordering::Relaxed);
        }
        best
    });
    let gg = g.growth();
    let p_max = grid.y_min.abs().max(grid.y_max.abs());
    let q_max = grid.z_min.abs().max(grid.z_max.abs());
    let w_max = grid.a_sqrt_max * q_max;
    let growth = GrowthCertificate {
        alpha_bar: gg.alpha_bar
            + gg.beta_bar * p_max
            + gg.gamma / 2.0 * w_max * w_max
            + nf * (p_max + w_max)
            + nf * nf / 2.0,
        beta_bar: nf,
        gamma: 1.0,
    };
    let generator = QuadraticGenerator::new(
        1,
        eval,
        growth,
        Some(nf),
        LipschitzZCertificate { c: nf, phi_bar: 1.0 },
        format!("truncation(n={n}, {})", g.label()),
    )?;
    Ok(TruncatedGenerator { generator, boundary_hit: flag })
}

/// Outcome of a randomized certificate audit. Ratios at most `1 + 1e-9` pass.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub samples: usize,
    pub growth_max_ratio: f64,
    pub lipschitz_y_max_ratio: Option<f64>,
    pub lipschitz_z_max_ratio: f64,
    pub pass: bool,
}

const AUDIT_TOL: f64 = 1.0 + 1e-9;

/// Randomized audit of the declared certificates: draws `(t, y, y', z, z', a)`
/// with `a` on the segment between the bounds (endpoints included) and
/// reports the worst observed ratio of each inequality. Report-only.
pub fn audit_certificates(
    f: &QuadraticGenerator,
    bounds: &VolBounds,
    samples: usize,
    seed: u64,
) -> Result<AuditReport> {
    use crate::rng::{stream, StreamPurpose};
    use rand::Rng;

    if bounds.dim() != f.dim() {
        return Err(SolverError::DimensionMismatch { expected: f.dim(), got: bounds.dim() });
    }
    let d = f.dim();
    let growth = f.growth();
    let lz = f.lipschitz_z();
    let mut rng = stream(seed, StreamPurpose::CertificateAudit, 0, 0);
    let dd = d * d;
    let diff: Vec<f64> =
        (0..dd).map(|k| bounds.hi.entries()[k] - bounds.lo.entries()[k]).collect();

    let mut growth_max: f64 = 0.0;
    let mut lipy_max: Option<f64> = f.lipschitz_y().map(|_| 0.0);
    let mut lipz_max: f64 = 0.0;

    let ratio = |num: f64, den: f64| -> f64 {
        if num <= 1e-13 * (1.0 + den) {
            0.0
        } else if den <= 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    };

    for s in 0..samples {
        let t: f64 = rng.gen_range(0.0..=1.0);
        let y: f64 = rng.gen_range(-3.0..3.0);
        let y2: f64 = rng.gen_range(-3.0..3.0);
        let z: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let z2: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
        // endpoints first, then the Loewner segment between the bounds
        let lam: f64 = match s {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..=1.0),
        };
        let entries: Vec<f64> =
            (0..dd).map(|k| bounds.lo.entries()[k] + lam * diff[k]).collect();
        let a = SpdMatrix::new(d, entries)?;
        let sc = Scenario::new(a);

        let fv = f.eval(t, y, &z, &sc);
        let w = sc.a.half_norm(&z);
        let den_growth = growth.alpha_bar + growth.beta_bar * y.abs() + growth.gamma / 2.0 * w * w;
        growth_max = growth_max.max(ratio(fv.abs(), den_growth));

        if let (Some(mu), Some(acc)) = (f.lipschitz_y(), lipy_max.as_mut()) {
            let fv2 = f.eval(t, y2, &z, &sc);
            *acc = acc.max(ratio((fv - fv2).abs(), mu * (y - y2).abs()));
        }

        let fvz = f.eval(t, y, &z2, &sc);
        let w2 = sc.a.half_norm(&z2);
        let dw: Vec<f64> = z.iter().zip(&z2).map(|(a, b)| a - b).collect();
        let den_lipz = lz.c * (lz.phi_bar + w + w2) * sc.a.half_norm(&dw);
        lipz_max = lipz_max.max(ratio((fv - fvz).abs(), den_lipz));
    }

    let pass = growth_max <= AUDIT_TOL
        && lipz_max <= AUDIT_TOL
        && lipy_max.map(|r| r <= AUDIT_TOL).unwrap_or(true);
    Ok(AuditReport {
        samples,
        growth_max_ratio: growth_max,
        lipschitz_y_max_ratio: lipy_max,
        lipschitz_z_max_ratio: lipz_max,
        pass,
    })
}
