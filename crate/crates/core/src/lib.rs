//! Numerical toolkit for phase-comparator quantum phase estimation, history-state
//! energy bookkeeping, and binary-search phase-diagram solvers for one- and
//! two-parameter critical-point promise problems on translationally invariant
//! spin chains.
//!
//! The crate is organized along the pipeline that turns a ground-energy
//! comparison into a phase-diagram decision:
//!
//! * [`encoding`] — base-4 self-certifying encoding of instance indices.
//! * [`qpe`] — closed-form QPE readout amplitudes, mass sums and tail bounds.
//! * [`circuit`] — dense state-vector simulator with the phase-comparator
//!   circuit and seeded gate-noise injection.
//! * [`hamsim`] — Trotterized time evolution of nearest-neighbour chains and
//!   effective-Hamiltonian distance measurement.
//! * [`spectral`] — exact diagonalization, Lanczos extremal eigenvalues, the
//!   critical XY chain in closed form, and gap classification.
//! * [`eta`] — the acceptance functional in one- and two-parameter form.
//! * [`assembly`] — interval arithmetic fusing history-state penalties with
//!   marker bonuses into signed square and lattice energies.
//! * [`phasediag`] — the decision layer: bisection solvers against pluggable
//!   ground-energy oracles, and the end-to-end toy oracle.
//! * [`verify`] — the reproducible invariant suite behind `critline verify`.

pub mod assembly;
pub mod circuit;
pub mod encoding;
pub mod eta;
pub mod grid;
pub mod hamsim;
pub mod linalg;
pub mod phasediag;
pub mod qpe;
pub mod spectral;
pub mod verify;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension cap exceeded: requested {requested}, cap {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error("promise violation: {0}")]
    PromiseViolation(String),
    #[error("calibration violated: {0}")]
    CalibrationViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
