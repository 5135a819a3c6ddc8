//! Error types shared by the solver modules.

use thiserror::Error;

/// Errors surfaced by the solver library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum SolverError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asym:e})")]
    NotSymmetric { max_asym: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty grid: {0}")]
    EmptyGrid(String),

    #[error("projection search did not converge within {iterations} iterations")]
    ProjectionNoConvergence { iterations: usize },

    #[error("fixed-point iteration diverged at step {step}, node {node} (residual {residual:e})")]
    FixedPointDiverged { step: usize, node: usize, residual: f64 },

    #[error("lattice escape mass {mass:e} exceeds 1e-6; widen the lattice")]
    LatticeEscape { mass: f64 },

    #[error("non-positive transformed value {value:e} at step {step}; lattice or tolerance failure")]
    NonPositiveTransform { step: usize, value: f64 },

    #[error("claim exceeds its declared sup-norm bound on the lattice ({observed:e} > {declared:e})")]
    ClaimBoundViolated { observed: f64, declared: f64 },

    #[error("{fraction:.2e} of simulated paths escaped the lattice (limit 1e-3)")]
    PathEscape { fraction: f64 },

    #[error("{fraction:.2e} of simulated wealth paths became non-positive (limit 1e-3)")]
    NonPositiveWealth { fraction: f64 },

    #[error("perturbation of the terminal claim is identically zero")]
    ZeroPerturbation,
}
