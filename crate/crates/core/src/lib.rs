//! Disturbance-based measure of macroscopic quantum coherence.
//!
//! A quantum state is macroscopically coherent when it superposes components
//! that a *coarse* measurement — one with classically achievable precision —
//! can still tell apart. This crate quantifies that property as the
//! disturbance `M_sigma(rho) = D(rho, Phi_sigma(rho))` a Gaussian
//! coarse-grained measurement of precision `sigma` inflicts on the state,
//! where `D` is either the Bures distance or the quantum relative entropy.
//!
//! The crate provides:
//!
//! - [`numerics`]: dense Hermitian linear algebra (eigendecomposition, PSD
//!   square root, fidelity, relative entropy) and special functions.
//! - [`coherence`]: the measurement observable, mode decomposition, the
//!   coarse-grained channel `Phi_sigma`, free operations, and the measure
//!   `M_sigma` itself.
//! - [`info`]: Wigner-Yanase-Dyson skew information, quantum Fisher
//!   information, and the fidelity lower bounds built from them.
//! - [`spin`]: collective-spin model states (product, GHZ, rotated Dicke,
//!   decohered GHZ) in the symmetric subspace.
//! - [`boson`]: truncated Fock-space states and the quadrature measurement
//!   realized on a position grid.
//! - [`decoherence`]: the environment-coupling channel equivalent to
//!   `Phi_sigma` and the thermal-bath parameter mapping.
//! - [`random`]: seeded samplers for mixed/pure states used by audits.

pub mod boson;
pub mod coherence;
pub mod decoherence;
pub mod info;
pub mod numerics;
pub mod random;
pub mod spin;

use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("state vector has squared norm {0}, expected 1")]
    NotNormalized(f64),

    #[error("measurement precision sigma must be positive and finite (got {0})")]
    NonPositiveSigma(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("relative entropy diverged (support violation) where a finite value is required")]
    SupportViolation,

    #[error("malformed free operation: {0}")]
    InvalidFreeOperation(String),

    #[error("Fock cutoff {given} too small, need at least {required}")]
    InsufficientCutoff { given: usize, required: usize },

    #[error("quadrature grid extent {given:.6} too small, need at least {required:.6}")]
    InadequateGrid { given: f64, required: f64 },

    #[error("quadrature grid captures {captured:.12} of unit mass, need at least {required:.12}; extend the grid to at least {suggested_extent:.6}")]
    GridMassDeficit {
        captured: f64,
        required: f64,
        suggested_extent: f64,
    },

    #[error("failed to converge: {0}")]
    ConvergenceFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
