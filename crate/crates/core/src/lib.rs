//! Estimation of the a priori probability that a bipartite quantum state is
//! separable.
//!
//! Two families of estimators are provided:
//!
//! * **Product-measure Monte Carlo** — eigenvalues drawn from a (symmetric or
//!   general) Dirichlet distribution, eigenvectors randomized by a Haar
//!   unitary, separability decided by the positive-partial-transpose test
//!   ([`measures`], [`states`]).
//! * **Exact lattice enumeration** — every density matrix whose diagonal lies
//!   on a regular simplex lattice and whose off-diagonals lie on a square grid
//!   inside the half-radius disc is enumerated with backtracking and
//!   principal-minor pruning; each state is weighted by the volume element of
//!   a monotone Riemannian metric ([`enumerate`], [`metrics`], [`estimate`]).
//!
//! All lattice acceptance decisions (positivity, determinant thresholds) are
//! made in exact rational arithmetic so that published state counts are
//! reproduced deterministically; floating point is used only for spectra,
//! weights and observables.

pub mod cli;
pub mod enumerate;
pub mod estimate;
pub mod linalg;
pub mod measures;
pub mod metrics;
pub mod states;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("trace is {trace} but must equal 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not strictly positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("dimension mismatch: matrix is {matrix}x{matrix} but bipartite split gives {expected}")]
    DimensionMismatch { matrix: usize, expected: usize },
    #[error("eigensolver failed to converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("argument must be strictly positive, got {value}")]
    NonPositive { value: f64 },
    #[error("weight is singular on a degenerate spectrum")]
    SingularWeight,
    #[error("tally is empty; nothing to report")]
    EmptyTally,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("resource budget exceeded after {completed} of {total} simplex partitions")]
    BudgetExceeded { completed: usize, total: usize },
    #[error("checkpoint does not match the requested run (expected hash {expected}, found {found})")]
    CheckpointMismatch { expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("serialization failed: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
