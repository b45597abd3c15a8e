//! Superoperators on matrix algebras: super/Choi matrices, complete
//! positivity, Kraus forms and the Hilbert–Schmidt norm calculus.
//!
//! The basis convention is fixed once: the action matrix of a map
//! `φ : B(ℂ^d) → B(ℂ^d')` is the `d'² × d²` matrix with column index
//! enumerating the matrix units `e_{nm}` (row-major, `n·d + m`) and row
//! index enumerating output entries `(i,j)` (row-major, `i·d' + j`).
//! Traces are normalized, `tr(I) = 1`; the unnormalized trace appears
//! only inside numerics.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{
    cr, elementary, hermitian_eig, identity_c, max_abs, max_abs_diff, min_eig_psd_test,
    op_norm_hermitian, unvec_rm, vec_rm, CMatrix, CVector, NumericsError,
};
use crate::tol::TolerancePolicy;

#[derive(Debug, Error)]
pub enum SuperopError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map is not hermitian: defect {0:.3e}")]
    NonHermitianMap(f64),
    #[error("map is not completely positive (min Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),
    #[error("image of basis element {index} escapes the span (residual {residual:.3e})")]
    RangeEscapesSpan { index: usize, residual: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A linear map of `d × d` matrices into `d' × d'` matrices, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim_in: usize,
    dim_out: usize,
    action: CMatrix,
}

impl SuperOperator {
    pub fn new(action: CMatrix, dim_in: usize, dim_out: usize) -> Result<Self, SuperopError> {
        if action.nrows() != dim_out * dim_out || action.ncols() != dim_in * dim_in {
            return Err(SuperopError::DimensionMismatch(format!(
                "action must be {}x{}, got {}x{}",
                dim_out * dim_out,
                dim_in * dim_in,
                action.nrows(),
                action.ncols()
            )));
        }
        Ok(SuperOperator {
            dim_in,
            dim_out,
            action,
        })
    }

    /// Build from the action on matrix units.
    pub fn from_apply<F: FnMut(&CMatrix) -> CMatrix>(
        dim_in: usize,
        dim_out: usize,
        mut f: F,
    ) -> Self {
        let mut action = CMatrix::zeros(dim_out * dim_out, dim_in * dim_in);
        for n in 0..dim_in {
            for m in 0..dim_in {
                let img = f(&elementary(dim_in, dim_in, n, m));
                assert_eq!(img.nrows(), dim_out);
                assert_eq!(img.ncols(), dim_out);
                let col = n * dim_in + m;
                for i in 0..dim_out {
                    for j in 0..dim_out {
                        action[(i * dim_out + j, col)] = img[(i, j)];
                    }
                }
            }
        }
        SuperOperator {
            dim_in,
            dim_out,
            action,
        }
    }

    /// The identity map ι on `B(ℂ^d)`.
    pub fn identity(d: usize) -> Self {
        SuperOperator {
            dim_in: d,
            dim_out: d,
            action: identity_c(d * d),
        }
    }

    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        SuperOperator {
            dim_in,
            dim_out,
            action: CMatrix::zeros(dim_out * dim_out, dim_in * dim_in),
        }
    }

    /// `A ↦ X A Y`.
    pub fn sandwich(x: &CMatrix, y: &CMatrix) -> Self {
        let dim_in = x.ncols();
        let dim_out = x.nrows();
        assert_eq!(y.nrows(), dim_in);
        assert_eq!(y.ncols(), dim_out);
        SuperOperator::from_apply(dim_in, dim_out, |a| x * a * y)
    }

    /// `A ↦ X A X*` (single Kraus term).
    pub fn conjugation(x: &CMatrix) -> Self {
        SuperOperator::sandwich(x, &x.adjoint())
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn action(&self) -> &CMatrix {
        &self.action
    }

    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        assert_eq!(a.nrows(), self.dim_in, "apply: input dimension mismatch");
        assert_eq!(a.ncols(), self.dim_in);
        unvec_rm(&(&self.action * vec_rm(a)), self.dim_out, self.dim_out)
    }

    /// `ψ ∘ φ`, i.e. `(self ∘ other)(A) = self(other(A))`.
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator, SuperopError> {
        if self.dim_in != other.dim_out {
            return Err(SuperopError::DimensionMismatch(format!(
                "compose: {} vs {}",
                self.dim_in, other.dim_out
            )));
        }
        Ok(SuperOperator {
            dim_in: other.dim_in,
            dim_out: self.dim_out,
            action: &self.action * &other.action,
        })
    }

    /// Hilbert–Schmidt adjoint: `tr(A* ψ(B)) = tr(ψ̃(A)* B)`.
    ///
    /// On Kraus operators this conjugates, `Sᵢ ↦ Sᵢ*`; on the action
    /// matrix it is the conjugate transpose.
    pub fn tilde_adjoint(&self) -> SuperOperator {
        SuperOperator {
            dim_in: self.dim_out,
            dim_out: self.dim_in,
            action: self.action.adjoint(),
        }
    }

    pub fn scale(&self, s: f64) -> SuperOperator {
        SuperOperator {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            action: &self.action * cr(s),
        }
    }

    pub fn add(&self, other: &SuperOperator) -> SuperOperator {
        assert_eq!(self.dim_in, other.dim_in);
        assert_eq!(self.dim_out, other.dim_out);
        SuperOperator {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            action: &self.action + &other.action,
        }
    }

    pub fn sub(&self, other: &SuperOperator) -> SuperOperator {
        self.add(&other.scale(-1.0))
    }

    /// Choi (super) matrix: entry `((i,n),(j,m)) = φ(e_{nm})_{ij}`,
    /// a `d·d'` square matrix, hermitian iff the map is hermitian.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim_in;
        let dp = self.dim_out;
        CMatrix::from_fn(d * dp, d * dp, |r, c| {
            let (i, n) = (r / d, r % d);
            let (j, m) = (c / d, c % d);
            self.action[(i * dp + j, n * d + m)]
        })
    }

    /// Inverse of [`SuperOperator::choi`].
    pub fn from_choi(choi: &CMatrix, dim_in: usize, dim_out: usize) -> Self {
        assert_eq!(choi.nrows(), dim_in * dim_out);
        assert_eq!(choi.ncols(), dim_in * dim_out);
        let mut action = CMatrix::zeros(dim_out * dim_out, dim_in * dim_in);
        for i in 0..dim_out {
            for n in 0..dim_in {
                for j in 0..dim_out {
                    for m in 0..dim_in {
                        action[(i * dim_out + j, n * dim_in + m)] =
                            choi[(i * dim_in + n, j * dim_in + m)];
                    }
                }
            }
        }
        SuperOperator {
            dim_in,
            dim_out,
            action,
        }
    }

    /// Hermitianity `φ(A*) = φ(A)*`, tested as hermitianity of the Choi
    /// matrix; returns the defect.
    pub fn hermitian_defect(&self) -> f64 {
        crate::numerics::hermitian_defect(&self.choi())
    }

    pub fn is_hermitian_map(&self, tol: &TolerancePolicy) -> bool {
        self.hermitian_defect() <= tol.eps_eq * max_abs(&self.choi()).max(1.0)
    }

    /// Complete positivity via positivity of the Choi matrix.
    pub fn is_completely_positive(&self, tol: &TolerancePolicy) -> Result<CpReport, SuperopError> {
        let choi = self.choi();
        let defect = crate::numerics::hermitian_defect(&choi);
        if defect > tol.eps_eq * max_abs(&choi).max(1.0) {
            return Err(SuperopError::NonHermitianMap(defect));
        }
        let psd = min_eig_psd_test(&choi, tol)?;
        let witness_family = psd.witness.as_ref().map(|w| self.reshape_witness(w));
        Ok(CpReport {
            is_cp: psd.is_psd,
            min_choi_eigenvalue: psd.min_eigenvalue,
            witness: psd.witness,
            witness_family,
        })
    }

    /// Reshape a Choi witness vector into a violating `(Aᵢ, fᵢ)` family:
    /// with `fᵢ` the standard basis of ℂ^{d'} and `Aᵢ = Σ_n v_{(i,n)} e_{1n}`,
    /// the sum `Σ (fᵢ, φ(Aᵢ*Aⱼ) fⱼ)` equals `(v, Choi v) < 0`.
    fn reshape_witness(&self, v: &CVector) -> (Vec<CMatrix>, Vec<CVector>) {
        let d = self.dim_in;
        let dp = self.dim_out;
        let mut mats = Vec::with_capacity(dp);
        let mut vecs = Vec::with_capacity(dp);
        for i in 0..dp {
            let mut a = CMatrix::zeros(d, d);
            for n in 0..d {
                a[(0, n)] = v[i * d + n];
            }
            mats.push(a);
            let mut f = CVector::zeros(dp);
            f[i] = cr(1.0);
            vecs.push(f);
        }
        (mats, vecs)
    }

    /// Kraus form of a completely positive map, from the scaled Choi
    /// eigenvectors.  The number of terms is the rank of the Choi matrix
    /// (the index of the map).
    pub fn kraus(&self, tol: &TolerancePolicy) -> Result<KrausForm, SuperopError> {
        let report = self.is_completely_positive(tol)?;
        if !report.is_cp {
            return Err(SuperopError::NotCompletelyPositive(
                report.min_choi_eigenvalue,
            ));
        }
        self.kraus_unchecked(tol)
    }

    /// Kraus/eigen decomposition without the CP gate: weights may carry
    /// both signs for a merely hermitian map.
    pub fn kraus_unchecked(&self, tol: &TolerancePolicy) -> Result<KrausForm, SuperopError> {
        let d = self.dim_in;
        let dp = self.dim_out;
        let choi = self.choi();
        let eig = hermitian_eig(&choi, tol)?;
        let top = eig.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
        let cut = tol.eps_rank * top.max(1.0);
        let mut operators = Vec::new();
        let mut weights = Vec::new();
        for (k, &mu) in eig.eigenvalues.iter().enumerate() {
            if mu.abs() > cut {
                // eigenvector reshaped to d'×d, scaled to normalized-trace
                // orthonormality tr(Sᵢ*Sⱼ) = δᵢⱼ
                let col = eig.eigenvectors.column(k);
                let s = CMatrix::from_fn(dp, d, |i, n| col[i * d + n]) * cr((dp as f64).sqrt());
                operators.push(s);
                weights.push(mu / dp as f64);
            }
        }
        Ok(KrausForm { operators, weights })
    }

    /// Exact norm `‖φ(I)‖` for a completely positive map.
    pub fn cp_norm(&self, tol: &TolerancePolicy) -> Result<f64, SuperopError> {
        Ok(op_norm_hermitian(
            &self.apply(&identity_c(self.dim_in)),
            tol,
        )?)
    }

    /// Operator norm `sup ‖φ(A)‖ / ‖A‖`.
    ///
    /// Exact (`‖φ(I)‖`) when the map is completely positive; otherwise an
    /// alternating-maximization estimate, reported as such.
    pub fn op_norm(&self, tol: &TolerancePolicy) -> Result<OpNorm, SuperopError> {
        if let Ok(rep) = self.is_completely_positive(tol) {
            if rep.is_cp {
                return Ok(OpNorm {
                    value: self.cp_norm(tol)?,
                    exact: true,
                });
            }
        }
        Ok(OpNorm {
            value: self.op_norm_estimate(tol),
            exact: false,
        })
    }

    /// Lower-bound estimate of the induced norm by alternating
    /// maximization over `‖A‖ ≤ 1` (polar steps) from several starts.
    pub fn op_norm_estimate(&self, tol: &TolerancePolicy) -> f64 {
        let d = self.dim_in;
        let mut best: f64 = 0.0;
        let mut starts: Vec<CMatrix> = vec![identity_c(d)];
        // reshaped top singular vectors of the action matrix seed good directions
        let gram = self.action.adjoint() * &self.action;
        if let Ok(eig) = hermitian_eig(&gram, tol) {
            for k in 0..eig.eigenvalues.len().min(3) {
                let v = eig.eigenvectors.column(k).into_owned();
                starts.push(unvec_rm(&v, d, d));
            }
        }
        for m in 0..d {
            starts.push(elementary(d, d, 0, m));
        }
        for start in starts {
            if max_abs(&start) == 0.0 {
                continue;
            }
            let mut a = start.clone();
            for _ in 0..30 {
                let sv = singular_norm(&a, tol);
                if sv <= 1e-300 {
                    break;
                }
                a /= cr(sv);
                let b = self.apply(&a);
                let (u, s, v) = top_singular_triplet(&b, tol);
                best = best.max(s);
                // next trial maximizes Re (u, φ(A) v) over ‖A‖ ≤ 1: the
                // functional is Tr(Ω* A), maximized by the polar unitary of Ω.
                let mut omega = CMatrix::zeros(d, d);
                for n2 in 0..d {
                    for m2 in 0..d {
                        let img = self.apply(&elementary(d, d, n2, m2));
                        omega[(n2, m2)] = (u.adjoint() * &img * &v)[(0, 0)].conj();
                    }
                }
                let next = polar_unitary(&omega, tol);
                let stalled = max_abs_diff(&next, &a) < 1e-12;
                a = next;
                if stalled {
                    break;
                }
            }
            let sv = singular_norm(&a, tol);
            if sv > 1e-300 {
                best = best.max(singular_norm(&self.apply(&(a / cr(sv))), tol));
            }
        }
        best
    }

    /// Hilbert–Schmidt norm of the super matrix over `p` (square maps),
    /// i.e. `‖φ‖²_{H.S.} = p^{-2} Σ |φ_{jkrs}|²`.
    pub fn hs_norm(&self) -> f64 {
        assert_eq!(
            self.dim_in, self.dim_out,
            "hs_norm uses the square-map normalization"
        );
        self.action.norm() / self.dim_in as f64
    }

    /// Restriction of the map to the span of `basis`; the result is the
    /// `k × k` action matrix in the coordinates of the given elements.
    pub fn restrict(
        &self,
        basis: &[CMatrix],
        tol: &TolerancePolicy,
    ) -> Result<RestrictedMap, SuperopError> {
        assert!(!basis.is_empty());
        let k = basis.len();
        // Gram matrix of the basis for least-squares coordinates.
        let mut gram = CMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                gram[(i, j)] = crate::numerics::hs_inner(&basis[i], &basis[j]);
            }
        }
        let lu = gram.clone().lu();
        let mut action = CMatrix::zeros(k, k);
        for (j, b) in basis.iter().enumerate() {
            let img = self.apply(b);
            let rhs = CVector::from_fn(k, |i, _| crate::numerics::hs_inner(&basis[i], &img));
            let coords = lu.solve(&rhs).ok_or_else(|| {
                SuperopError::DimensionMismatch("restrict: degenerate basis".into())
            })?;
            // the image must stay in the span
            let mut recon = CMatrix::zeros(img.nrows(), img.ncols());
            for i in 0..k {
                recon += &basis[i] * coords[i];
            }
            let residual = max_abs_diff(&recon, &img);
            if residual > 10.0 * tol.eps_rank.max(tol.eps_eq) * max_abs(&img).max(1.0) {
                return Err(SuperopError::RangeEscapesSpan { index: j, residual });
            }
            for i in 0..k {
                action[(i, j)] = coords[i];
            }
        }
        Ok(RestrictedMap { action })
    }
}

/// Action matrix of a map expressed in an arbitrary matrix basis.
#[derive(Debug, Clone)]
pub struct RestrictedMap {
    pub action: CMatrix,
}

/// Outcome of a complete-positivity test.
#[derive(Debug, Clone)]
pub struct CpReport {
    pub is_cp: bool,
    pub min_choi_eigenvalue: f64,
    pub witness: Option<CVector>,
    /// The witness reshaped to a violating `(Aᵢ, fᵢ)` family.
    pub witness_family: Option<(Vec<CMatrix>, Vec<CVector>)>,
}

/// Operator norm together with the exact/estimate flag.
#[derive(Debug, Clone, Copy)]
pub struct OpNorm {
    pub value: f64,
    pub exact: bool,
}

/// Kraus decomposition `φ(A) = Σ λᵢ SᵢASᵢ*` with `tr(Sᵢ*Sⱼ) = δᵢⱼ` in the
/// normalized trace; all weights positive for a completely positive map.
#[derive(Debug, Clone)]
pub struct KrausForm {
    pub operators: Vec<CMatrix>,
    pub weights: Vec<f64>,
}

impl KrausForm {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn reassemble(&self, dim_in: usize, dim_out: usize) -> SuperOperator {
        let mut s = SuperOperator::zero(dim_in, dim_out);
        for (op, &w) in self.operators.iter().zip(self.weights.iter()) {
            s = s.add(&SuperOperator::conjugation(op).scale(w));
        }
        s
    }
}

/// Largest singular value via the hermitian gram.
fn singular_norm(a: &CMatrix, tol: &TolerancePolicy) -> f64 {
    let g = a.adjoint() * a;
    match hermitian_eig(&g, tol) {
        Ok(e) => e.eigenvalues.first().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => 0.0,
    }
}

/// Top singular triplet (u, σ, v) of a matrix.
fn top_singular_triplet(a: &CMatrix, tol: &TolerancePolicy) -> (CVector, f64, CVector) {
    let g = a.adjoint() * a;
    let eig = hermitian_eig(&g, tol).expect("gram is hermitian");
    let sigma2 = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let v = eig.eigenvectors.column(0).into_owned();
    let sigma = sigma2.sqrt();
    let u = if sigma > 1e-300 {
        (a * &v) / cr(sigma)
    } else {
        CVector::from_fn(a.nrows(), |i, _| if i == 0 { cr(1.0) } else { cr(0.0) })
    };
    (u, sigma, v)
}

/// Polar unitary factor of Ω (pseudo-inverse square root on the support).
fn polar_unitary(omega: &CMatrix, tol: &TolerancePolicy) -> CMatrix {
    let d = omega.nrows();
    let p = crate::numerics::psd_inv_sqrt(&(omega.adjoint() * omega), tol)
        .unwrap_or_else(|_| identity_c(d));
    omega * p
}
