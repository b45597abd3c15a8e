//! Hermitian eigendecomposition and the PSD test every positivity decision
//! routes through.
//!
//! The solver is a cyclic complex Jacobi iteration.  Every matrix in this
//! crate is small (dimension ≤ ~40), where Jacobi is both fast and
//! uniformly accurate — in particular it has no trouble with degenerate
//! or nearly degenerate clusters, which the canonical-form machinery
//! produces routinely.

use num_complex::Complex64;

use super::{cr, max_abs, CMatrix, CVector, NumericsError};
use crate::tol::TolerancePolicy;

/// Result of a hermitian eigendecomposition, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix with eigenvectors as columns, ordered like `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    /// Reassemble `V diag(λ) V*`.
    pub fn reassemble(&self) -> CMatrix {
        let d = self.eigenvalues.len();
        let lam = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                cr(self.eigenvalues[i])
            } else {
                cr(0.0)
            }
        });
        &self.eigenvectors * lam * self.eigenvectors.adjoint()
    }

    /// Spectral projection onto the eigenvalues selected by `keep`.
    pub fn spectral_projection(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let d = self.eigenvalues.len();
        let mut p = CMatrix::zeros(d, d);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            if keep(lam) {
                let v = self.eigenvectors.column(k);
                p += &v * v.adjoint();
            }
        }
        p
    }
}

/// Eigendecomposition of a hermitian matrix.
///
/// The input must be hermitian within `eps_eq` (relative to its largest
/// entry); it is symmetrized before decomposition.  Postcondition:
/// `A = V diag(λ) V*` to machine precision, eigenvalues real and sorted in
/// descending order.
pub fn hermitian_eig(a: &CMatrix, tol: &TolerancePolicy) -> Result<HermitianEig, NumericsError> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(NumericsError::DimensionMismatch(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = max_abs(a).max(1.0);
    let defect = super::hermitian_defect(a);
    let allowed = tol.eps_eq * scale;
    if defect > allowed {
        return Err(NumericsError::NonHermitianInput {
            defect,
            tol: allowed,
        });
    }
    if d == 0 {
        return Ok(HermitianEig {
            eigenvalues: vec![],
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }
    let h = (a + a.adjoint()) * cr(0.5);
    let (mut values, vectors) = jacobi_hermitian(&h);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    let eigenvectors = CMatrix::from_fn(d, d, |i, j| vectors[(i, order[j])]);
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(HermitianEig {
        eigenvalues: values,
        eigenvectors,
    })
}

/// Cyclic complex Jacobi iteration; returns unsorted eigenvalues and the
/// accumulated unitary (columns are eigenvectors).
fn jacobi_hermitian(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let d = h.nrows();
    let mut a = h.clone();
    let mut v = CMatrix::identity(d, d);
    let scale = max_abs(h).max(1e-300);
    for _sweep in 0..60 {
        let off: f64 = (0..d)
            .flat_map(|p| (p + 1..d).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale * d as f64 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / cr(mag);
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = phase * cr(t * c);
                // A ← R† A R with R = [[c, σ], [-σ̄, c]] on rows/cols (p,q)
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cr(c) - akq * sigma.conj();
                    a[(k, q)] = akp * sigma + akq * cr(c);
                }
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cr(c) - aqk * sigma;
                    a[(q, k)] = apk * sigma.conj() + aqk * cr(c);
                }
                // keep the diagonal exactly real and the target entry zero
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                a[(p, q)] = cr(0.0);
                a[(q, p)] = cr(0.0);
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cr(c) - vkq * sigma.conj();
                    v[(k, q)] = vkp * sigma + vkq * cr(c);
                }
            }
        }
    }
    ((0..d).map(|i| a[(i, i)].re).collect(), v)
}

/// Operator norm of a hermitian matrix (largest |eigenvalue|).
pub fn op_norm_hermitian(a: &CMatrix, tol: &TolerancePolicy) -> Result<f64, NumericsError> {
    let eig = hermitian_eig(a, tol)?;
    Ok(eig
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max))
}

/// Outcome of the shared PSD test.
#[derive(Debug, Clone)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Eigenvector for the most negative eigenvalue when the test fails.
    pub witness: Option<CVector>,
}

/// The one positivity decision of the toolkit.
///
/// `A ⪰ 0` is accepted iff `λ_min(A) ≥ -eps_psd · max(1, ‖A‖)`; on failure
/// the eigenvector of the most negative eigenvalue is returned.
pub fn min_eig_psd_test(a: &CMatrix, tol: &TolerancePolicy) -> Result<PsdReport, NumericsError> {
    let eig = hermitian_eig(a, tol)?;
    if eig.eigenvalues.is_empty() {
        return Ok(PsdReport {
            is_psd: true,
            min_eigenvalue: 0.0,
            witness: None,
        });
    }
    let min = *eig.eigenvalues.last().unwrap();
    let norm = eig.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let floor = -tol.eps_psd * norm.max(1.0);
    if min >= floor {
        Ok(PsdReport {
            is_psd: true,
            min_eigenvalue: min,
            witness: None,
        })
    } else {
        let k = eig.eigenvalues.len() - 1;
        Ok(PsdReport {
            is_psd: false,
            min_eigenvalue: min,
            witness: Some(eig.eigenvectors.column(k).into_owned()),
        })
    }
}

/// Hermitian square root restricted to the support (pseudo-square-root).
pub fn psd_sqrt(a: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix, NumericsError> {
    let eig = hermitian_eig(a, tol)?;
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cut = tol.eps_rank * top.max(1.0);
    let d = a.nrows();
    let mut s = CMatrix::zeros(d, d);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > cut {
            let v = eig.eigenvectors.column(k);
            s += &v * v.adjoint() * cr(lam.sqrt());
        }
    }
    Ok(s)
}

/// Moore–Penrose style inverse square root on the support of `a`.
pub fn psd_inv_sqrt(a: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix, NumericsError> {
    let eig = hermitian_eig(a, tol)?;
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cut = tol.eps_rank * top.max(1.0);
    let d = a.nrows();
    let mut s = CMatrix::zeros(d, d);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > cut {
            let v = eig.eigenvectors.column(k);
            s += &v * v.adjoint() * cr(1.0 / lam.sqrt());
        }
    }
    Ok(s)
}

/// Orthonormal basis for the column space of `a`, with singular values.
///
/// Computed from the hermitian eigendecomposition of `A A*`; rank cut at
/// `eps_rank` relative to the top singular value.
pub fn column_space(a: &CMatrix, tol: &TolerancePolicy) -> (Vec<CVector>, Vec<f64>) {
    let g = a * a.adjoint();
    let eig = hermitian_eig(&g, tol).expect("gram matrix is hermitian by construction");
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cut = (tol.eps_rank * top.sqrt().max(1.0)).powi(2);
    let mut basis = Vec::new();
    let mut sigmas = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > cut {
            basis.push(eig.eigenvectors.column(k).into_owned());
            sigmas.push(lam.max(0.0).sqrt());
        }
    }
    (basis, sigmas)
}

/// Orthonormal basis for the null space of `a` (right kernel).
pub fn null_space(a: &CMatrix, tol: &TolerancePolicy) -> Vec<CVector> {
    let g = a.adjoint() * a;
    let eig = hermitian_eig(&g, tol).expect("gram matrix is hermitian by construction");
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cut = (tol.eps_rank * top.sqrt().max(1.0)).powi(2);
    let mut basis = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= cut {
            basis.push(eig.eigenvectors.column(k).into_owned());
        }
    }
    basis
}

/// Numerical rank of `a` at the shared `eps_rank` threshold.
pub fn rank(a: &CMatrix, tol: &TolerancePolicy) -> usize {
    column_space(a, tol).0.len()
}

/// Orthogonal projection onto the span of the ranges of the given matrices.
pub fn projection_onto_ranges(mats: &[CMatrix], tol: &TolerancePolicy) -> CMatrix {
    assert!(!mats.is_empty());
    let rows = mats[0].nrows();
    let cols: usize = mats.iter().map(|m| m.ncols()).sum();
    let mut stacked = CMatrix::zeros(rows, cols);
    let mut off = 0;
    for m in mats {
        stacked.view_mut((0, off), (rows, m.ncols())).copy_from(m);
        off += m.ncols();
    }
    let (basis, _) = column_space(&stacked, tol);
    let mut p = CMatrix::zeros(rows, rows);
    for v in basis {
        p += &v * v.adjoint();
    }
    p
}
