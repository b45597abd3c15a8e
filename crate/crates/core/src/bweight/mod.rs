//! Boundary weights over L²(0,∞) built from exponential-monomial atoms
//! `x ↦ coef · x^α e^{-a x}`.
//!
//! All Gram integrals close over the upper incomplete gamma function;
//! divergence at the origin is a first-class value, not an error, and the
//! strict-infiniteness and full-corner divergence conditions reduce to
//! finite rank checks on divergent-exponent coefficients.

mod atom;
mod checks;
mod family;
mod gram;

pub use atom::*;
pub use checks::*;
pub use family::*;
pub use gram::*;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BweightError {
    #[error("inadmissible atom pair: combined gamma exponent {0} is ≤ -1")]
    InadmissiblePair(f64),
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("invalid weight family: {0}")]
    InvalidFamily(String),
    #[error("invalid observable: {0}")]
    InvalidObservable(String),
    #[error("cutoff must be positive, got {0}")]
    NonPositiveCutoff(f64),
    #[error("value is divergent where a finite value is required: {0}")]
    DivergentValue(String),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
}
