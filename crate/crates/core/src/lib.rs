//! Numerical toolkit for completely positive maps on matrix algebras,
//! boundary weights over L²(0,∞) and the certification of q-weight maps.
//!
//! The crate is organized in layers:
//!
//! * [`numerics`] — dense complex linear algebra kernels (hermitian
//!   eigendecomposition, PSD tests, incomplete gamma, adaptive quadrature)
//!   under a single [`TolerancePolicy`].
//! * [`superop`] — superoperators on matrix algebras: Choi matrices,
//!   complete positivity, Kraus forms and the Hilbert–Schmidt calculus.
//! * [`condform`] — the canonical form `L(A) = sA + YA + AY* + Σ λᵢXᵢAXᵢ*`
//!   of a hermitian map, conditional positivity, completion and inversion.
//! * [`bweight`] — boundary weights built from exponential-monomial atoms:
//!   cutoff Gram integrals, the g/h decomposition, divergence rank checks.
//! * [`choieffros`] — structure of completely positive contractive
//!   idempotents: support projections, star product, matrix units, maximal
//!   support projection.
//! * [`qweight`] — assembly of q-weight maps from a coefficient map and a
//!   limiting weight, skeleton diagnostics, purity certificates and the
//!   range-rank-one reduction.
//! * [`schema`] — JSON wire formats shared with the command line tool.

pub mod bweight;
pub mod choieffros;
pub mod condform;
pub mod numerics;
pub mod qweight;
pub mod schema;
pub mod superop;
pub mod tol;

pub use tol::TolerancePolicy;
