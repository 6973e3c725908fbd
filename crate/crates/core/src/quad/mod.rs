//! Linear algebra of quadrature operators.
//!
//! Conventions used throughout the crate: `[x, y] = i/2`, so the vacuum has
//! variance 1/4 in every quadrature; quadratures are ordered
//! `(X1, Y1, ..., Xn, Yn)`; a phase rotation by φ multiplies `x + iy` by
//! `e^{iφ}`.

mod expr;
mod state;
mod symplectic;

use thiserror::Error;

pub use expr::{apply_matrix2, ClassicalSymbol, Detector, LinearExpr, QuadKind, Quadrature};
pub use state::{
    apply_symplectic, check_uncertainty, expr_covariance, expr_variance, CovarianceMatrix, GaussianState,
    UncertaintyReport,
};
pub(crate) use state::mode_indices;
pub use symplectic::{symplectic_defect, symplectic_form, SymplecticMap};

/// Vacuum variance of any quadrature for `[x, y] = i/2`.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Tolerance on `|S Ω Sᵀ − Ω|` for accepting a symplectic map.
pub const SYMPLECTIC_TOL: f64 = 1e-12;

/// Tolerance on the smallest eigenvalue of `Σ + (i/4)Ω`.
pub const UNCERTAINTY_TOL: f64 = 1e-10;

pub(crate) const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0}")]
    Shape(String),
    #[error("matrix is not symplectic (|SΩSᵀ − Ω| = {defect:.3e})")]
    NotSymplectic { defect: f64 },
    #[error("covariance is not symmetric (asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("covariance violates the uncertainty relation (min eigenvalue {min_eigenvalue:.3e})")]
    Unphysical { min_eigenvalue: f64 },
    #[error("quadrature {quadrature} is outside the {n_modes}-mode basis")]
    UnknownQuadrature { quadrature: Quadrature, n_modes: usize },
    #[error("mode {mode} is invalid for a {n_modes}-mode state")]
    InvalidMode { mode: usize, n_modes: usize },
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("classical symbol {0} has no value")]
    UnboundSymbol(ClassicalSymbol),
}

/// Squeezing in dB relative to vacuum: `−10 log10(v / 0.25)`.
pub fn variance_to_db(variance: f64) -> f64 {
    -10.0 * (variance / VACUUM_VARIANCE).log10()
}

/// Inverse of [`variance_to_db`]; 8.3 dB gives `0.25 · 10^(−0.83)`.
pub fn db_to_variance(db: f64) -> f64 {
    VACUUM_VARIANCE * 10f64.powf(-db / 10.0)
}
