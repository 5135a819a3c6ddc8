//! Lattice solver for quadratic second-order BSDEs under volatility uncertainty.
//!
//! The library is organized around one pipeline:
//!
//! 1. [`spd`] — small dense SPD matrix algebra (square roots, Loewner order),
//!    the scenario space for the volatility uncertainty class.
//! 2. [`constraints`] — closed constraint sets with exact Euclidean distance
//!    and projection, including volatility-transformed sets.
//! 3. [`generators`] — quadratic drivers: the exponential/power market
//!    generators, Fenchel–Legendre conjugation, the exponential transform and
//!    its Lipschitz truncation, all carrying audited growth certificates.
//! 4. [`bsde`] — the single-scenario Markovian quadratic BSDE solver
//!    (backward induction with Gauss–Hermite conditional expectations).
//! 5. [`robust`] — the second-order layer: per-step worst-case dynamic
//!    programming over a finite family of volatility scenarios, per-scenario
//!    solves, extraction of the non-decreasing processes `K` and the minimum
//!    condition check.
//! 6. [`utility`] — robust exponential/power utility maximization: values,
//!    projection-based optimal strategies, optimality identities and
//!    Monte Carlo robustness simulation.
//! 7. [`diagnostics`] — sup-norm, BMO-type and stability health checks.
//!
//! Node loops, per-scenario solves and Monte Carlo batches are data-parallel
//! via rayon when the `parallel` feature (default) is enabled; disabling it
//! yields a dependency-free sequential build with identical numerics.

pub mod constraints;
pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod grid;
pub mod par;
pub mod quad;
pub mod rng;
pub mod robust;
pub mod spd;
pub mod utility;

pub mod bsde;

pub use error::SolverError;
pub use spd::SpdMatrix;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, SolverError>;
