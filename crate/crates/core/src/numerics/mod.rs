//! Dense complex linear algebra kernels and special functions.

mod cmatrix;
mod eig;
mod gamma;
mod quad;

pub use cmatrix::*;
pub use eig::*;
pub use gamma::*;
pub use quad::*;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is not hermitian: symmetry defect {defect:.3e} exceeds {tol:.3e}")]
    NonHermitianInput { defect: f64, tol: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
