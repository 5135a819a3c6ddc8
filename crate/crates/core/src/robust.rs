//! The second-order layer: worst-case aggregation over volatility scenarios.
//!
//! The nondominated measure class is discretized as a finite family of
//! constant volatility scenarios between Loewner bounds. The robust value
//! surface follows the dynamic programming principle: at each backward step
//! and node, take the best one-step backward-Euler value over the scenario
//! family (per-step scenario choice strictly contains the constant-scenario
//! solves, whose full-horizon solutions are kept alongside for the
//! representation check). The non-decreasing processes `K` are recovered
//! pathwise from the surfaces per scenario, and their expected terminal
//! values feed the minimum-condition check.

use crate::bsde::{self, BsdeSolution, Increments, SolverOptions};
use crate::error::SolverError;
use crate::generators::QuadraticGenerator;
use crate::grid::{StateLattice, Surface, TerminalClaim, TimeGrid, VectorSurface};
use crate::par;
use crate::quad::GaussHermite;
use crate::rng::{stream, StreamPurpose};
use crate::spd::{loewner_leq, Scenario, SpdMatrix, VolBounds};
use crate::Result;
use rand::Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

/// Finite family of volatility scenarios between Loewner bounds; the bounds
/// themselves are always scenarios.
#[derive(Debug, Clone)]
pub struct ScenarioFamily {
    bounds: VolBounds,
    scenarios: Vec<Scenario>,
}

impl ScenarioFamily {
    /// Uniform grid of `m` scalar scenarios on `[a_lo, a_hi]` (d = 1). With
    /// `m = 1` the bounds must coincide.
    pub fn uniform_1d(a_lo: f64, a_hi: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(SolverError::InvalidParameter("scenario count must be positive".into()));
        }
        if a_lo > a_hi {
            return Err(SolverError::InvalidParameter("scenario bounds out of order".into()));
        }
        if m == 1 && a_lo != a_hi {
            return Err(SolverError::InvalidParameter(
                "singleton family requires coinciding bounds".into(),
            ));
        }
        let bounds = VolBounds::new(SpdMatrix::scalar(a_lo)?, SpdMatrix::scalar(a_hi)?)?;
        let scenarios = (0..m)
            .map(|i| {
                let a = if m == 1 {
                    a_lo
                } else {
                    a_lo + (a_hi - a_lo) * i as f64 / (m - 1) as f64
                };
                Ok(Scenario::new(SpdMatrix::scalar(a)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bounds, scenarios })
    }

    /// d = 2 family: a per-axis grid of diagonal matrices filtered to the
    /// Loewner order interval, the bounds themselves, and any user-supplied
    /// extremal matrices (validated against the bounds).
    pub fn diag_grid_2d(
        bounds: VolBounds,
        m_per_axis: usize,
        extremal: Vec<SpdMatrix>,
    ) -> Result<Self> {
        if bounds.dim() != 2 {
            return Err(SolverError::DimensionMismatch { expected: 2, got: bounds.dim() });
        }
        if m_per_axis < 2 {
            return Err(SolverError::InvalidParameter("need at least 2 grid points per axis".into()));
        }
        let mut mats: Vec<SpdMatrix> = vec![bounds.lo.clone(), bounds.hi.clone()];
        let lo_d = [bounds.lo.get(0, 0), bounds.lo.get(1, 1)];
        let hi_d = [bounds.hi.get(0, 0), bounds.hi.get(1, 1)];
        for i in 0..m_per_axis {
            for j in 0..m_per_axis {
                let u = lo_d[0] + (hi_d[0] - lo_d[0]) * i as f64 / (m_per_axis - 1) as f64;
                let v = lo_d[1] + (hi_d[1] - lo_d[1]) * j as f64 / (m_per_axis - 1) as f64;
                let cand = SpdMatrix::diag(&[u, v])?;
                if loewner_leq(&bounds.lo, &cand)? && loewner_leq(&cand, &bounds.hi)? {
                    mats.push(cand);
                }
            }
        }
        for e in extremal {
            if !(loewner_leq(&bounds.lo, &e)? && loewner_leq(&e, &bounds.hi)?) {
                return Err(SolverError::InvalidParameter(
                    "extremal scenario outside the volatility bounds".into(),
                ));
            }
            mats.push(e);
        }
        mats.dedup_by(|a, b| {
            a.entries().iter().zip(b.entries()).all(|(x, y)| (x - y).abs() < 1e-14)
        });
        let scenarios = mats.into_iter().map(Scenario::new).collect();
        Ok(Self { bounds, scenarios })
    }

    /// Explicit list; every scenario must sit between the bounds, which are
    /// prepended as scenarios.
    pub fn from_list(bounds: VolBounds, list: Vec<SpdMatrix>) -> Result<Self> {
        let mut mats = vec![bounds.lo.clone(), bounds.hi.clone()];
        for a in list {
            if !(loewner_leq(&bounds.lo, &a)? && loewner_leq(&a, &bounds.hi)?) {
                return Err(SolverError::InvalidParameter(
                    "scenario outside the volatility bounds".into(),
                ));
            }
            mats.push(a);
        }
        mats.dedup_by(|a, b| {
            a.entries().iter().zip(b.entries()).all(|(x, y)| (x - y).abs() < 1e-14)
        });
        Ok(Self { bounds, scenarios: mats.into_iter().map(Scenario::new).collect() })
    }

    pub fn bounds(&self) -> &VolBounds {
        &self.bounds
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }
}

/// Parameters of the pathwise K simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSimParams {
    pub n_paths: usize,
    pub seed: u64,
    /// The increment-monotonicity threshold is `tol_scale · sqrt(h)`.
    pub tol_scale: f64,
}

impl Default for KSimParams {
    fn default() -> Self {
        Self { n_paths: 4000, seed: 1, tol_scale: 0.1 }
    }
}

/// Per-scenario statistics of the discrete non-decreasing process `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct KStatistics {
    pub scenario_index: usize,
    pub n_paths: usize,
    /// Monte Carlo estimate of `E[K_1]`.
    pub mean_k1: f64,
    pub std_error: f64,
    pub max_k1: f64,
    /// Fraction of simulated increments below `−tol_scale·sqrt(h)`.
    pub neg_increment_fraction: f64,
    pub escaped_fraction: f64,
}

/// Aggregated robust solution: DP value surface, per-step argmax scenario,
/// the z surface read under the argmax scenario, per-scenario full-horizon
/// solutions and their K statistics.
#[derive(Debug, Clone)]
pub struct RobustSolution {
    pub family: ScenarioFamily,
    pub generator: QuadraticGenerator,
    pub grid: TimeGrid,
    pub lattice: Arc<StateLattice>,
    pub value: Surface,
    pub z: VectorSurface,
    /// Argmax scenario index per `(step, node)`, steps `0..N`.
    pub argmax: Vec<u16>,
    pub per_scenario: Vec<BsdeSolution>,
    pub k_stats: Vec<KStatistics>,
    /// `max_P y^P(0, x₀)` over the constant-scenario solves.
    pub y0_sup: f64,
    pub interp: crate::grid::InterpKind,
}

impl RobustSolution {
    /// Robust value at the lattice origin at time zero.
    pub fn v0(&self) -> f64 {
        self.value.at(0, self.lattice.center_index())
    }

    /// Argmax scenario index at the root node.
    pub fn root_argmax(&self) -> usize {
        self.argmax[self.lattice.center_index()] as usize
    }

    pub fn argmax_at(&self, step: usize, node: usize) -> usize {
        self.argmax[step * self.lattice.node_count() + node] as usize
    }

    /// Whether the per-node argmax scenario is constant across `(t, x)` over
    /// the lattice core (the boundary skirt is excluded: constant
    /// extrapolation flattens the continuation value there and flips the
    /// one-step maximizer regardless of the instance).
    pub fn constant_argmax(&self) -> bool {
        let nodes = self.lattice.node_count();
        let reference = self.argmax[self.lattice.center_index()];
        let n = self.grid.n_steps();
        for k in 0..n {
            for j in 0..nodes {
                if self.argmax[k * nodes + j] != reference && self.lattice.is_core_node(j) {
                    return false;
                }
            }
        }
        true
    }

    /// Sup norm over the robust surface and every per-scenario surface.
    pub fn sup_norm(&self) -> f64 {
        let own = self.value.sup_norm();
        self.per_scenario.iter().map(|s| s.y.sup_norm()).fold(own, f64::max)
    }
}

/// Solve the 2BSDE by per-step worst-case dynamic programming, keeping the
/// constant-scenario solves and their K statistics alongside.
pub fn solve_2bsde(
    f: &QuadraticGenerator,
    xi: &TerminalClaim,
    fam: &ScenarioFamily,
    grid: &TimeGrid,
    lattice: &Arc<StateLattice>,
    opts: &SolverOptions,
    ksim: &KSimParams,
) -> Result<RobustSolution> {
    if fam.is_empty() {
        return Err(SolverError::EmptyGrid("scenario family".into()));
    }
    if fam.len() > u16::MAX as usize {
        return Err(SolverError::InvalidParameter("scenario family too large".into()));
    }
    if fam.dim() != lattice.dim() {
        return Err(SolverError::DimensionMismatch { expected: lattice.dim(), got: fam.dim() });
    }
    for sc in fam.scenarios() {
        let mass = bsde::escape_mass(sc, lattice);
        if mass > 1e-6 {
            return Err(SolverError::LatticeEscape { mass });
        }
    }
    if opts.quad_order < 8 {
        return Err(SolverError::InvalidParameter("quadrature order must be at least 8".into()));
    }

    let n = grid.n_steps();
    let h = grid.dt();
    let nodes = lattice.node_count();
    let d = lattice.dim();
    let gh = GaussHermite::new(opts.quad_order)?;
    let incs: Vec<Increments> =
        fam.scenarios().iter().map(|sc| Increments::new(sc, h, &gh)).collect();

    let mut value = Surface::zeros(n + 1, nodes);
    let mut z = VectorSurface::zeros(n, nodes, d);
    let mut argmax = vec![0u16; n * nodes];
    value.slice_mut(n).copy_from_slice(&xi.sample(lattice)?);

    struct NodeOut {
        best: f64,
        best_z: [f64; 2],
        best_idx: u16,
    }

    for k in (0..n).rev() {
        let t = grid.t(k);
        let v_next = value.slice(k + 1).to_vec();
        let results = par::map_indexed(nodes, |j| -> std::result::Result<NodeOut, SolverError> {
            let x = lattice.coords(j);
            let mut best = f64::NEG_INFINITY;
            let mut best_z = [0.0f64; 2];
            let mut best_idx = 0u16;
            for (si, sc) in fam.scenarios().iter().enumerate() {
                let inc = &incs[si];
                let mut mean = 0.0;
                let mut zm = [0.0f64; 2];
                if d == 1 {
                    let x0 = x[0];
                    for i in 0..inc.offsets.len() {
                        let v =
                            lattice.interp_strided(&v_next, x0 + inc.offsets[i][0], opts.interp);
                        let wv = inc.weights[i] * v;
                        mean += wv;
                        zm[0] += wv * inc.zvecs[i][0];
                    }
                } else {
                    let mut pt = [0.0f64; 2];
                    for i in 0..inc.offsets.len() {
                        pt[0] = x[0] + inc.offsets[i][0];
                        pt[1] = x[1] + inc.offsets[i][1];
                        let v = lattice.interp(&v_next, &pt, opts.interp);
                        let wv = inc.weights[i] * v;
                        mean += wv;
                        zm[0] += wv * inc.zvecs[i][0];
                        zm[1] += wv * inc.zvecs[i][1];
                    }
                }
                let zs = &zm[..d];
                let mut yk = mean;
                let mut converged = false;
                let mut residual = f64::INFINITY;
                for it in 0..opts.fixed_point_max_iters {
                    let proposal = mean + h * f.eval(t, yk, zs, sc);
                    let next = if it >= 10 { 0.5 * yk + 0.5 * proposal } else { proposal };
                    residual = (next - yk).abs();
                    yk = next;
                    if residual <= opts.fixed_point_tol * (1.0 + yk.abs()) {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(SolverError::FixedPointDiverged { step: k, node: j, residual });
                }
                if yk > best {
                    best = yk;
                    best_z = zm;
                    best_idx = si as u16;
                }
            }
            Ok(NodeOut { best, best_z, best_idx })
        });
        for (j, r) in results.into_iter().enumerate() {
            let out = r?;
            value.slice_mut(k)[j] = out.best;
            z.set(k, j, &out.best_z[..d]);
            argmax[k * nodes + j] = out.best_idx;
        }
    }

    // constant-scenario full-horizon solves
    let solves = par::map_indexed(fam.len(), |si| {
        bsde::solve_bsde(f, xi, &fam.scenarios()[si], grid, lattice, opts)
    });
    let mut per_scenario = Vec::with_capacity(fam.len());
    for s in solves {
        per_scenario.push(s?);
    }
    let center = lattice.center_index();
    let y0_sup =
        per_scenario.iter().map(|s| s.y.at(0, center)).fold(f64::NEG_INFINITY, f64::max);

    let mut rs = RobustSolution {
        family: fam.clone(),
        generator: f.clone(),
        grid: *grid,
        lattice: lattice.clone(),
        value,
        z,
        argmax,
        per_scenario,
        k_stats: Vec::new(),
        y0_sup,
        interp: opts.interp,
    };
    let stats = par::map_indexed(fam.len(), |si| {
        extract_k(&rs, si, ksim.n_paths, ksim.seed, ksim.tol_scale)
    });
    let mut k_stats = Vec::with_capacity(fam.len());
    for s in stats {
        k_stats.push(s?);
    }
    rs.k_stats = k_stats;
    Ok(rs)
}

/// Simulate `n_paths` of the canonical process under one scenario and
/// accumulate the discrete K increments
/// `ΔK_k = V(t_k, X_k) − V(t_{k+1}, X_{k+1}) − h·F(t_k, V, Z, a) + Z·ΔB`
/// read from the robust surfaces.
pub fn extract_k(
    rs: &RobustSolution,
    scenario_index: usize,
    n_paths: usize,
    seed: u64,
    tol_scale: f64,
) -> Result<KStatistics> {
    if scenario_index >= rs.family.len() {
        return Err(SolverError::InvalidParameter("scenario index out of range".into()));
    }
    if n_paths == 0 {
        return Err(SolverError::InvalidParameter("need at least one path".into()));
    }
    let sc = &rs.family.scenarios()[scenario_index];
    let n = rs.grid.n_steps();
    let h = rs.grid.dt();
    let sqrt_h = h.sqrt();
    let d = rs.lattice.dim();
    let lattice = &rs.lattice;
    let interp = rs.interp;
    let tol_mono = tol_scale * sqrt_h;
    let root = &sc.sqrt;

    struct Chunk {
        sum: f64,
        sum_sq: f64,
        max: f64,
        neg_increments: usize,
        increments: usize,
        escaped: usize,
    }

    let chunks = par::map_chunks(n_paths, 256, |start, end| {
        let mut acc = Chunk {
            sum: 0.0,
            sum_sq: 0.0,
            max: f64::NEG_INFINITY,
            neg_increments: 0,
            increments: 0,
            escaped: 0,
        };
        let mut x = [0.0f64; 2];
        let mut xn = [0.0f64; 2];
        let mut zbuf = [0.0f64; 2];
        for p in start..end {
            let mut rng =
                stream(seed, StreamPurpose::KSimulation, scenario_index as u32, p as u32);
            x[..d].fill(0.0);
            let mut k1 = 0.0;
            let mut escaped = false;
            for k in 0..n {
                let t = k as f64 * h;
                let mut db = [0.0f64; 2];
                if d == 1 {
                    let g: f64 = rng.sample(StandardNormal);
                    db[0] = root.get(0, 0) * sqrt_h * g;
                } else {
                    let g0: f64 = rng.sample(StandardNormal);
                    let g1: f64 = rng.sample(StandardNormal);
                    db[0] = sqrt_h * (root.get(0, 0) * g0 + root.get(0, 1) * g1);
                    db[1] = sqrt_h * (root.get(1, 0) * g0 + root.get(1, 1) * g1);
                }
                xn[..d].copy_from_slice(&x[..d]);
                for c in 0..d {
                    xn[c] += db[c];
                }
                let v_here = lattice.interp(rs.value.slice(k), &x[..d], interp);
                let v_next = lattice.interp(rs.value.slice(k + 1), &xn[..d], interp);
                for c in 0..d {
                    zbuf[c] = rs.z.interp_component(lattice, k, c, &x[..d], interp);
                }
                let fv = rs.generator.eval(t, v_here, &zbuf[..d], sc);
                let zdb: f64 = (0..d).map(|c| zbuf[c] * db[c]).sum();
                let dk = v_here - v_next - h * fv + zdb;
                k1 += dk;
                acc.increments += 1;
                if dk < -tol_mono {
                    acc.neg_increments += 1;
                }
                x[..d].copy_from_slice(&xn[..d]);
                if !lattice.contains(&x[..d]) {
                    escaped = true;
                }
            }
            acc.sum += k1;
            acc.sum_sq += k1 * k1;
            acc.max = acc.max.max(k1);
            if escaped {
                acc.escaped += 1;
            }
        }
        acc
    });

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut maxv = f64::NEG_INFINITY;
    let mut neg = 0usize;
    let mut total_inc = 0usize;
    let mut escaped = 0usize;
    for c in &chunks {
        sum += c.sum;
        sum_sq += c.sum_sq;
        maxv = maxv.max(c.max);
        neg += c.neg_increments;
        total_inc += c.increments;
        escaped += c.escaped;
    }
    let mean = sum / n_paths as f64;
    let var = (sum_sq / n_paths as f64 - mean * mean).max(0.0);
    let std_error = (var / n_paths as f64).sqrt();
    let escaped_fraction = escaped as f64 / n_paths as f64;
    if escaped_fraction > 1e-3 {
        return Err(SolverError::PathEscape { fraction: escaped_fraction });
    }
    Ok(KStatistics {
        scenario_index,
        n_paths,
        mean_k1: mean,
        std_error,
        max_k1: maxv,
        neg_increment_fraction: neg as f64 / total_inc as f64,
        escaped_fraction,
    })
}

/// Representation-theorem residuals: the DP value can only dominate the best
/// constant-scenario solve; on instances whose argmax scenario is constant in
/// `(t, x)` the two coincide within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationReport {
    /// `V(0, x₀) − max_P y^P(0, x₀)`.
    pub gap: f64,
    pub lower_bound_ok: bool,
    pub constant_argmax: bool,
    /// Set only when the argmax is constant.
    pub equality_ok: Option<bool>,
    pub tolerance: f64,
}

pub fn representation_check(rs: &RobustSolution, tolerance: f64) -> RepresentationReport {
    let gap = rs.v0() - rs.y0_sup;
    let constant_argmax = rs.constant_argmax();
    RepresentationReport {
        gap,
        lower_bound_ok: gap >= -tolerance,
        constant_argmax,
        equality_ok: constant_argmax.then(|| gap.abs() <= tolerance),
        tolerance,
    }
}

/// Minimum-condition residual: `min over scenarios of E[K_1]`, passing when
/// it is below three standard errors plus a discretization allowance.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimumConditionReport {
    pub residual: f64,
    pub argmin_scenario: usize,
    pub threshold: f64,
    pub pass: bool,
}

pub fn minimum_condition_check(
    rs: &RobustSolution,
    disc_tolerance: f64,
) -> Result<MinimumConditionReport> {
    if rs.k_stats.is_empty() {
        return Err(SolverError::InvalidParameter("K statistics missing".into()));
    }
    let (argmin, best) = rs
        .k_stats
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.mean_k1.partial_cmp(&b.1.mean_k1).unwrap())
        .unwrap();
    let threshold = 3.0 * best.std_error + disc_tolerance;
    Ok(MinimumConditionReport {
        residual: best.mean_k1,
        argmin_scenario: argmin,
        threshold,
        pass: best.mean_k1 <= threshold,
    })
}
