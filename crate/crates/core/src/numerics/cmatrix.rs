//! Value-semantic dense complex matrices and small helpers.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>` throughout; the row-major
//! entry order is fixed once here and reused by every serialization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::NumericsError;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Complex number from a real part.
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Complex number from real and imaginary parts.
pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Identity matrix.
pub fn identity_c(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Matrix unit e_{ij} of size `rows × cols` (entry (i,j) equal to one).
pub fn elementary(rows: usize, cols: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    m[(i, j)] = cr(1.0);
    m
}

/// Largest absolute entry.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest absolute entry of the difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on mismatched shapes");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Hermitian symmetry defect `max |A - A*|`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

/// Frobenius norm.
pub fn frobenius(a: &CMatrix) -> f64 {
    a.norm()
}

/// Normalized trace `tr(A) = Tr(A)/d` with `tr(I) = 1`, as used everywhere
/// in the conditional-positivity calculus.
pub fn ntrace(a: &CMatrix) -> Complex64 {
    debug_assert_eq!(a.nrows(), a.ncols());
    a.trace() / cr(a.nrows() as f64)
}

/// Normalized Hilbert–Schmidt inner product `tr(A* B)`.
pub fn ntrace_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    ntrace(&(a.adjoint() * b))
}

/// Unnormalized Hilbert–Schmidt inner product `Tr(A* B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Row-major vectorization: `vec(A)[(n * cols + m)] = A[(n, m)]`.
pub fn vec_rm(a: &CMatrix) -> CVector {
    let (r, c) = a.shape();
    CVector::from_fn(r * c, |k, _| a[(k / c, k % c)])
}

/// Inverse of [`vec_rm`].
pub fn unvec_rm(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    assert_eq!(v.len(), rows * cols, "unvec_rm length mismatch");
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Random matrix with standard complex Gaussian entries.
pub fn random_cmatrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        // Box-Muller pairs keep the distribution rotation invariant.
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = (-2.0 * u1.ln()).sqrt();
        cplx(r * u2.cos(), r * u2.sin())
    })
}

/// Random hermitian matrix.
pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let a = random_cmatrix(rng, d, d);
    (&a + a.adjoint()) * cr(0.5)
}

/// Haar-ish random unitary from the QR decomposition of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let a = random_cmatrix(rng, d, d);
    let qr = a.qr();
    qr.q()
}

/// Solve `A x = b` by LU, failing on (numerically) singular `A`.
pub fn solve_lu(a: &CMatrix, b: &CVector) -> Result<CVector, NumericsError> {
    let lu = a.clone().lu();
    lu.solve(b)
        .ok_or_else(|| NumericsError::DimensionMismatch("singular linear system".into()))
}

/// Matrix inverse by LU.
pub fn invert(a: &CMatrix) -> Option<CMatrix> {
    a.clone().lu().try_inverse()
}
