//! The conditional-positivity calculus: canonical form
//! `L(A) = sA + YA + AY* + Σ λᵢ XᵢAXᵢ*`, classification, the coefficient
//! criterion for complete positivity, completion to a conditionally zero
//! map, and inversion of conditionally negative maps.
//!
//! The unique `(s, Y)` are read off the identity `Θ_L(I) = sI + Y`;
//! `Θ_L` is never sampled over the unitary group — it equals `1/p` times
//! the Choi matrix acting on the Hilbert–Schmidt space, which is exact.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{
    cr, hermitian_eig, identity_c, max_abs, min_eig_psd_test, ntrace, op_norm_hermitian,
    unvec_rm, vec_rm, CMatrix, NumericsError,
};
use crate::superop::{SuperOperator, SuperopError};
use crate::tol::TolerancePolicy;

#[derive(Debug, Error)]
pub enum CondformError {
    #[error("map is not hermitian: defect {0:.3e}")]
    NonHermitianMap(f64),
    #[error("internal part is degenerate: eigenvalue {0:.3e} below the positivity floor")]
    DegenerateInternal(f64),
    #[error("map is not conditionally negative (class {0:?})")]
    NotConditionallyNegative(ConditionalClass),
    #[error("unit lower bound violated: min eigenvalue of φ(I) is {0:.3e}")]
    UnitLowerBoundViolated(f64),
    #[error(transparent)]
    Superop(#[from] SuperopError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// The decomposition `(s, Y, {(λᵢ, Xᵢ)})` of a hermitian map.
///
/// Invariants: `tr(Y) = 0`, `tr(Xᵢ) = 0`, `tr(Xᵢ*Xⱼ) = δᵢⱼ` in the
/// normalized trace, and the reassembled map reproduces the source.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub dim: usize,
    /// Coefficient of the identical part.
    pub s: f64,
    /// Traceless first-order coefficient.
    pub y: CMatrix,
    /// Internal part `(λᵢ, Xᵢ)`, eigenvalues sorted descending.
    pub internal: Vec<(f64, CMatrix)>,
}

impl CanonicalForm {
    /// `L(A) = sA + YA + AY* + Σ λᵢ XᵢAXᵢ*`.
    pub fn reassemble(&self) -> SuperOperator {
        let d = self.dim;
        let mut l = SuperOperator::identity(d).scale(self.s);
        l = l.add(&SuperOperator::sandwich(&self.y, &identity_c(d)));
        l = l.add(&SuperOperator::sandwich(&identity_c(d), &self.y.adjoint()));
        l.add(&self.internal_superop())
    }

    /// The internal part `K_L(A) = Σ λᵢ XᵢAXᵢ*` alone.
    pub fn internal_superop(&self) -> SuperOperator {
        let d = self.dim;
        let mut k = SuperOperator::zero(d, d);
        for (lam, x) in &self.internal {
            k = k.add(&SuperOperator::conjugation(x).scale(*lam));
        }
        k
    }

    /// `ρ(I) = Σ λᵢ XᵢXᵢ*`.
    pub fn internal_unit(&self) -> CMatrix {
        let d = self.dim;
        let mut m = CMatrix::zeros(d, d);
        for (lam, x) in &self.internal {
            m += x * x.adjoint() * cr(*lam);
        }
        m
    }
}

/// Canonical form of a hermitian map.
///
/// `s` and `Y` come from `Θ_L(I) = sI + Y`; the internal part is the Choi
/// eigendecomposition of `L - sι - (Y·+·Y*)`, whose nonzero eigenvectors
/// are automatically traceless.
pub fn canonical_form(
    l: &SuperOperator,
    tol: &TolerancePolicy,
) -> Result<CanonicalForm, CondformError> {
    let d = l.dim_in();
    assert_eq!(d, l.dim_out(), "canonical form needs a square map");
    let choi = l.choi();
    let defect = crate::numerics::hermitian_defect(&choi);
    if defect > tol.eps_eq * max_abs(&choi).max(1.0) {
        return Err(CondformError::NonHermitianMap(defect));
    }

    // Θ_L(I) = (1/p) · (Choi acting on vec(I))
    let theta_i = unvec_rm(&(&choi * vec_rm(&identity_c(d))), d, d) / cr(d as f64);
    let s = ntrace(&theta_i).re;
    let y = &theta_i - identity_c(d) * cr(s);

    // internal part by Choi eigendecomposition
    let mut k = l.sub(&SuperOperator::identity(d).scale(s));
    k = k.sub(&SuperOperator::sandwich(&y, &identity_c(d)));
    k = k.sub(&SuperOperator::sandwich(&identity_c(d), &y.adjoint()));
    let kraus = k.kraus_unchecked(tol)?;
    let mut internal: Vec<(f64, CMatrix)> = kraus
        .weights
        .iter()
        .zip(kraus.operators.iter())
        .map(|(&w, op)| (w, op.clone()))
        .collect();
    internal.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(CanonicalForm {
        dim: d,
        s,
        y,
        internal,
    })
}

/// Sign class of the internal spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ConditionalClass {
    ConditionallyPositive,
    ConditionallyNegative,
    ConditionallyZero,
    Indefinite,
}

/// Classification certificate: the class together with the internal
/// eigenvalue list it was read from.
#[derive(Debug, Clone)]
pub struct Classification {
    pub class: ConditionalClass,
    pub internal_eigenvalues: Vec<f64>,
}

impl Classification {
    /// Conditionally positive in the inclusive sense (zero counts).
    pub fn is_conditionally_positive(&self) -> bool {
        matches!(
            self.class,
            ConditionalClass::ConditionallyPositive | ConditionalClass::ConditionallyZero
        )
    }

    pub fn is_conditionally_negative(&self) -> bool {
        matches!(
            self.class,
            ConditionalClass::ConditionallyNegative | ConditionalClass::ConditionallyZero
        )
    }
}

/// A map is conditionally positive iff every internal eigenvalue is ≥ 0.
pub fn classify(l: &SuperOperator, tol: &TolerancePolicy) -> Result<Classification, CondformError> {
    let cf = canonical_form(l, tol)?;
    Ok(classify_form(&cf, tol))
}

pub fn classify_form(cf: &CanonicalForm, tol: &TolerancePolicy) -> Classification {
    let eigs: Vec<f64> = cf.internal.iter().map(|(l, _)| *l).collect();
    let scale = eigs.iter().map(|l| l.abs()).fold(1.0, f64::max);
    let floor = tol.eps_psd * scale;
    let any_pos = eigs.iter().any(|&l| l > floor);
    let any_neg = eigs.iter().any(|&l| l < -floor);
    let class = match (any_pos, any_neg) {
        (false, false) => ConditionalClass::ConditionallyZero,
        (true, false) => ConditionalClass::ConditionallyPositive,
        (false, true) => ConditionalClass::ConditionallyNegative,
        (true, true) => ConditionalClass::Indefinite,
    };
    Classification {
        class,
        internal_eigenvalues: eigs,
    }
}

/// Certificate of the coefficient criterion: `Y = Σ cᵢXᵢ` and
/// `Σ |cᵢ|²/λᵢ ≤ s`.
#[derive(Debug, Clone)]
pub struct CpCriterion {
    pub holds: bool,
    pub coefficients: Vec<Complex64>,
    /// Residual of `Y` outside the span of the `Xᵢ`.
    pub residual: f64,
    /// `Σ |cᵢ|²/λᵢ`.
    pub budget: f64,
    pub s: f64,
}

/// Coefficient criterion for complete positivity of a canonical form with
/// strictly positive internal part.
///
/// Fails with `DegenerateInternal` when some `λᵢ ≤ eps_psd`; callers then
/// fall back to the Choi test (see [`cp_check`]).
pub fn cp_criterion(
    cf: &CanonicalForm,
    tol: &TolerancePolicy,
) -> Result<CpCriterion, CondformError> {
    let scale = cf
        .internal
        .iter()
        .map(|(l, _)| l.abs())
        .fold(1.0, f64::max);
    for (lam, _) in &cf.internal {
        if *lam <= tol.eps_psd * scale {
            return Err(CondformError::DegenerateInternal(*lam));
        }
    }
    // c_i = tr(Xᵢ* Y) by orthonormality of the Xᵢ
    let coefficients: Vec<Complex64> = cf
        .internal
        .iter()
        .map(|(_, x)| crate::numerics::ntrace_inner(x, &cf.y))
        .collect();
    let mut w = cf.y.clone();
    for ((_, x), c) in cf.internal.iter().zip(coefficients.iter()) {
        w -= x * *c;
    }
    let residual = crate::numerics::frobenius(&w) / (crate::numerics::frobenius(&cf.y)).max(1.0);
    let budget: f64 = cf
        .internal
        .iter()
        .zip(coefficients.iter())
        .map(|((lam, _), c)| c.norm_sqr() / lam)
        .sum();
    let in_span = residual <= tol.eps_rank.max(tol.eps_eq);
    let holds = in_span && budget <= cf.s + tol.eps_eq * cf.s.abs().max(1.0);
    Ok(CpCriterion {
        holds,
        coefficients,
        residual,
        budget,
        s: cf.s,
    })
}

/// How a complete-positivity verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpRoute {
    Criterion,
    ChoiFallback,
}

/// Coefficient criterion with automatic Choi fallback on degenerate
/// internal parts.
pub fn cp_check(
    l: &SuperOperator,
    tol: &TolerancePolicy,
) -> Result<(bool, CpRoute), CondformError> {
    let cf = canonical_form(l, tol)?;
    match cp_criterion(&cf, tol) {
        Ok(c) => Ok((c.holds, CpRoute::Criterion)),
        Err(CondformError::DegenerateInternal(_)) => {
            let rep = l.is_completely_positive(tol)?;
            Ok((rep.is_cp, CpRoute::ChoiFallback))
        }
        Err(e) => Err(e),
    }
}

/// Positivity of the block matrix `[[sI, Y*], [Y, ρ(I)]]`, which holds for
/// every completely positive map in canonical form.
pub fn block_inequality_check(
    cf: &CanonicalForm,
    tol: &TolerancePolicy,
) -> Result<bool, CondformError> {
    let d = cf.dim;
    let rho_i = cf.internal_unit();
    let mut block = CMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        block[(i, i)] = cr(cf.s);
        for j in 0..d {
            block[(i, j + d)] = cf.y[(j, i)].conj();
            block[(i + d, j)] = cf.y[(i, j)];
            block[(i + d, j + d)] = rho_i[(i, j)];
        }
    }
    Ok(min_eig_psd_test(&block, tol)?.is_psd)
}

/// Completion lemma: given a completely positive `φ` and hermitian `T`,
/// the map `ψ(A) = YA + AY* - φ(A)` with `Y = ½(T + φ(I)) + iC` satisfies
/// `ψ(I) = T` and `ψ + φ` conditionally zero.  `C = C*` is a free gauge,
/// defaulting to zero.
pub fn complete_to_cond_zero(
    phi: &SuperOperator,
    t_mat: &CMatrix,
    c: Option<&CMatrix>,
    tol: &TolerancePolicy,
) -> Result<SuperOperator, CondformError> {
    let d = phi.dim_in();
    assert_eq!(d, phi.dim_out());
    assert_eq!(t_mat.nrows(), d);
    let defect = crate::numerics::hermitian_defect(t_mat);
    if defect > tol.eps_eq * max_abs(t_mat).max(1.0) {
        return Err(CondformError::NonHermitianMap(defect));
    }
    let mut y = (t_mat + phi.apply(&identity_c(d))) * cr(0.5);
    if let Some(cm) = c {
        let cdef = crate::numerics::hermitian_defect(cm);
        if cdef > tol.eps_eq * max_abs(cm).max(1.0) {
            return Err(CondformError::NonHermitianMap(cdef));
        }
        y += cm * Complex64::new(0.0, 1.0);
    }
    let mut psi = SuperOperator::sandwich(&y, &identity_c(d));
    psi = psi.add(&SuperOperator::sandwich(&identity_c(d), &y.adjoint()));
    Ok(psi.sub(phi))
}

/// Inverse of a conditionally negative map with `φ(I) ≥ sI`, `s > 0`;
/// the inverse is completely positive.
pub fn invert_cond_negative(
    phi: &SuperOperator,
    tol: &TolerancePolicy,
) -> Result<SuperOperator, CondformError> {
    let cls = classify(phi, tol)?;
    if !cls.is_conditionally_negative() {
        return Err(CondformError::NotConditionallyNegative(cls.class));
    }
    let d = phi.dim_in();
    let unit = phi.apply(&identity_c(d));
    let eig = hermitian_eig(&unit, tol)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min <= tol.eps_psd {
        return Err(CondformError::UnitLowerBoundViolated(min));
    }
    let inv = crate::numerics::invert(phi.action()).ok_or_else(|| {
        CondformError::Superop(SuperopError::DimensionMismatch(
            "conditionally negative map is numerically singular".into(),
        ))
    })?;
    let result = SuperOperator::new(inv, d, d)?;
    // postcondition from the semigroup argument: the inverse is CP
    let rep = result.is_completely_positive(tol)?;
    debug_assert!(
        rep.is_cp,
        "inverse of a conditionally negative map must be CP (min eig {})",
        rep.min_choi_eigenvalue
    );
    Ok(result)
}

/// Matrix exponential of the action matrix (scaling and squaring).
pub fn expm(l: &SuperOperator, t: f64) -> SuperOperator {
    let a = l.action() * cr(t);
    let n = a.nrows();
    let norm = a.norm();
    let k = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = &a / cr(2f64.powi(k as i32));
    let mut term = identity_c(n);
    let mut sum = identity_c(n);
    for j in 1..=24 {
        term = &term * &scaled / cr(j as f64);
        sum += &term;
    }
    for _ in 0..k {
        sum = &sum * &sum;
    }
    SuperOperator::new(sum, l.dim_in(), l.dim_out()).expect("exponential keeps shape")
}

/// Evans–Lewis cross-check: `e^{tL}` is completely positive for every
/// `t ≥ 0` iff `L` is conditionally positive.  Returns the CP flag per `t`.
pub fn exp_semigroup_cp_check(
    l: &SuperOperator,
    ts: &[f64],
    tol: &TolerancePolicy,
) -> Result<Vec<bool>, CondformError> {
    let choi = l.choi();
    let defect = crate::numerics::hermitian_defect(&choi);
    if defect > tol.eps_eq * max_abs(&choi).max(1.0) {
        return Err(CondformError::NonHermitianMap(defect));
    }
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let e = expm(l, t);
        out.push(e.is_completely_positive(tol)?.is_cp);
    }
    Ok(out)
}

/// The decomposition `ι - ξ₂ = κ(ι + η)` used to compare skeleton
/// resolvents: `b = ‖ι - ξ₂‖_{H.S.}`, `s` the identical coefficient of
/// `b⁻¹(ι - ξ₂)`, `κ = b·s`.
pub fn lemma31_decompose(
    xi2: &SuperOperator,
    tol: &TolerancePolicy,
) -> Result<(f64, SuperOperator), CondformError> {
    let d = xi2.dim_in();
    let iota = SuperOperator::identity(d);
    let diff = iota.sub(xi2);
    let b = diff.hs_norm();
    if b <= 0.0 {
        return Err(CondformError::Superop(SuperopError::DimensionMismatch(
            "ι - ξ₂ vanishes".into(),
        )));
    }
    let normalized = diff.scale(1.0 / b);
    let cf = canonical_form(&normalized, tol)?;
    let s = cf.s;
    let kappa = b * s;
    let eta = diff.scale(1.0 / kappa).sub(&iota);
    Ok((kappa, eta))
}

/// `λ_min(φ(I))`, shared by several hypothesis checks.
pub fn unit_floor(phi: &SuperOperator, tol: &TolerancePolicy) -> Result<f64, CondformError> {
    let unit = phi.apply(&identity_c(phi.dim_in()));
    let eig = hermitian_eig(&unit, tol)?;
    Ok(eig.eigenvalues.last().copied().unwrap_or(0.0))
}

/// Operator norm of `φ(I)` (exact for CP maps).
pub fn unit_norm(phi: &SuperOperator, tol: &TolerancePolicy) -> Result<f64, CondformError> {
    Ok(op_norm_hermitian(
        &phi.apply(&identity_c(phi.dim_in())),
        tol,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{elementary, max_abs_diff, random_cmatrix, random_hermitian};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn trace_map(d: usize) -> SuperOperator {
        // A ↦ tr(A)·I in the normalized trace
        SuperOperator::from_apply(d, d, |a| identity_c(d) * (a.trace() / cr(d as f64)))
    }

    fn random_hermitian_map<R: Rng>(rng: &mut R, d: usize) -> SuperOperator {
        SuperOperator::from_choi(&random_hermitian(rng, d * d), d, d)
    }

    #[test]
    fn canonical_form_of_identity() {
        let t = tol();
        let cf = canonical_form(&SuperOperator::identity(2), &t).unwrap();
        assert!((cf.s - 1.0).abs() < 1e-12);
        assert!(max_abs(&cf.y) < 1e-12);
        assert!(cf.internal.is_empty());
    }

    #[test]
    fn canonical_form_of_y_sandwich() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut y = random_cmatrix(&mut rng, 3, 3);
        // make it traceless
        let tr = y.trace() / cr(3.0);
        for i in 0..3 {
            y[(i, i)] -= tr;
        }
        let id = identity_c(3);
        let l = SuperOperator::sandwich(&y, &id).add(&SuperOperator::sandwich(&id, &y.adjoint()));
        let cf = canonical_form(&l, &t).unwrap();
        assert!(cf.s.abs() < 1e-10);
        assert!(max_abs_diff(&cf.y, &y) < 1e-10, "Y is unique");
        assert!(cf.internal.is_empty());
    }

    #[test]
    fn canonical_form_of_trace_map() {
        // tr(A)I on p=2: s = 1/4, Y = 0, three internal terms λ = 1/4 with
        // Pauli-like X (checked through the reassembly identity
        // tr(A)I = (A + Σ σAσ)/4).
        let t = tol();
        let cf = canonical_form(&trace_map(2), &t).unwrap();
        assert!((cf.s - 0.25).abs() < 1e-12);
        assert!(max_abs(&cf.y) < 1e-12);
        assert_eq!(cf.internal.len(), 3);
        for (lam, x) in &cf.internal {
            assert!((lam - 0.25).abs() < 1e-12);
            assert!(ntrace(x).norm() < 1e-12, "X traceless");
            assert!((crate::numerics::ntrace_inner(x, x) - cr(1.0)).norm() < 1e-12);
        }
        let diff = max_abs_diff(cf.reassemble().action(), trace_map(2).action());
        assert!(diff < 1e-12);
    }

    #[test]
    fn canonical_roundtrip_and_uniqueness() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let d = 2 + rng.gen_range(0..3) as usize;
            let l = random_hermitian_map(&mut rng, d);
            let cf = canonical_form(&l, &t).unwrap();
            let diff = cf.reassemble().sub(&l).hs_norm();
            assert!(diff <= 1e-10 * l.hs_norm().max(1.0), "roundtrip {diff}");
            assert!(ntrace(&cf.y).norm() < 1e-9);
        }
    }

    #[test]
    fn classification_examples() {
        let t = tol();
        assert_eq!(
            classify(&SuperOperator::identity(3), &t).unwrap().class,
            ConditionalClass::ConditionallyZero
        );
        assert_eq!(
            classify(&trace_map(2), &t).unwrap().class,
            ConditionalClass::ConditionallyPositive
        );
        assert_eq!(
            classify(&trace_map(2).scale(-1.0), &t).unwrap().class,
            ConditionalClass::ConditionallyNegative
        );
    }

    #[test]
    fn cp_criterion_cases() {
        let t = tol();
        let d = 2;
        // X traceless, normalized in the normalized trace
        let x = elementary(d, d, 0, 1) * cr((d as f64).sqrt());
        let term = vec![(1.0, x.clone())];

        let cf = CanonicalForm {
            dim: d,
            s: 1.0,
            y: CMatrix::zeros(d, d),
            internal: term.clone(),
        };
        let c = cp_criterion(&cf, &t).unwrap();
        assert!(c.holds && c.budget.abs() < 1e-12);

        let cf = CanonicalForm {
            dim: d,
            s: 0.0,
            y: x.clone(),
            internal: term.clone(),
        };
        let c = cp_criterion(&cf, &t).unwrap();
        assert!(!c.holds, "Σ|c|²/λ = 1 > 0");
        // cross-check with the Choi spectrum of the reassembled map
        assert!(!cf.reassemble().is_completely_positive(&t).unwrap().is_cp);

        let cf = CanonicalForm {
            dim: d,
            s: 1.0,
            y: x.clone(),
            internal: term,
        };
        let c = cp_criterion(&cf, &t).unwrap();
        assert!(c.holds, "boundary case Σ|c|²/λ = s accepted");
        assert!(cf.reassemble().is_completely_positive(&t).unwrap().is_cp);
    }

    #[test]
    fn block_inequality_cases() {
        let t = tol();
        let cf = canonical_form(&SuperOperator::identity(2), &t).unwrap();
        assert!(block_inequality_check(&cf, &t).unwrap());

        // random CP maps satisfy the block inequality
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let mut phi = SuperOperator::zero(2, 2);
            for _ in 0..2 {
                let x = random_cmatrix(&mut rng, 2, 2);
                phi = phi.add(&SuperOperator::conjugation(&x));
            }
            let cf = canonical_form(&phi, &t).unwrap();
            assert!(block_inequality_check(&cf, &t).unwrap());
        }

        // s = 0 with Y ≠ 0 fails
        let x = elementary(2, 2, 0, 1) * cr(2f64.sqrt());
        let cf = CanonicalForm {
            dim: 2,
            s: 0.0,
            y: x.clone(),
            internal: vec![(1.0, x)],
        };
        assert!(!block_inequality_check(&cf, &t).unwrap());
    }

    #[test]
    fn completion_examples() {
        let t = tol();
        let d = 2;
        // φ = 0, T = I → ψ = ι
        let psi =
            complete_to_cond_zero(&SuperOperator::zero(d, d), &identity_c(d), None, &t).unwrap();
        assert!(max_abs_diff(psi.action(), SuperOperator::identity(d).action()) < 1e-12);

        // φ = 0, T = 0, C arbitrary → ψ(A) = i(CA - AC), ψ(I) = 0
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let c = random_hermitian(&mut rng, d);
        let psi =
            complete_to_cond_zero(&SuperOperator::zero(d, d), &CMatrix::zeros(d, d), Some(&c), &t)
                .unwrap();
        assert!(max_abs(&psi.apply(&identity_c(d))) < 1e-12);
        let a = random_cmatrix(&mut rng, d, d);
        let want = (&c * &a - &a * &c) * Complex64::new(0.0, 1.0);
        assert!(max_abs_diff(&psi.apply(&a), &want) < 1e-12);

        // φ = tr(·)I, T = I: ψ(I) = I and ψ + φ conditionally zero
        let phi = trace_map(d);
        let psi = complete_to_cond_zero(&phi, &identity_c(d), None, &t).unwrap();
        assert!(max_abs_diff(&psi.apply(&identity_c(d)), &identity_c(d)) < 1e-12);
        assert_eq!(
            classify(&psi.add(&phi), &t).unwrap().class,
            ConditionalClass::ConditionallyZero
        );
    }

    #[test]
    fn inversion_examples() {
        let t = tol();
        // φ(A) = 2A → φ⁻¹(A) = A/2
        let phi = SuperOperator::identity(2).scale(2.0);
        let inv = invert_cond_negative(&phi, &t).unwrap();
        assert!(max_abs_diff(inv.action(), SuperOperator::identity(2).scale(0.5).action()) < 1e-12);

        // φ(A) = 2A - tr(A)I on p=2 → φ⁻¹(A) = A/2 + tr(A)I/2
        let phi = SuperOperator::identity(2).scale(2.0).sub(&trace_map(2));
        let inv = invert_cond_negative(&phi, &t).unwrap();
        let want = SuperOperator::identity(2).scale(0.5).add(&trace_map(2).scale(0.5));
        assert!(max_abs_diff(inv.action(), want.action()) < 1e-12);
        assert!(inv.is_completely_positive(&t).unwrap().is_cp);

        // monotonicity: φ ≤ φ' conditionally negative ⇒ φ⁻¹ ≥ φ'⁻¹
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let d = 2;
            let x = random_cmatrix(&mut rng, d, d);
            let internal = SuperOperator::conjugation(&x);
            let s = 1.2 * unit_norm(&internal, &t).unwrap() + 0.2;
            let phi = SuperOperator::identity(d).scale(s).sub(&internal);
            let ds: f64 = rng.gen_range(0.05..1.0);
            let phi2 = phi.add(&SuperOperator::identity(d).scale(ds));
            let i1 = invert_cond_negative(&phi, &t).unwrap();
            let i2 = invert_cond_negative(&phi2, &t).unwrap();
            assert!(i1.sub(&i2).is_completely_positive(&t).unwrap().is_cp);
        }
    }

    #[test]
    fn rejects_non_negative_input() {
        let t = tol();
        assert!(matches!(
            invert_cond_negative(&trace_map(2), &t),
            Err(CondformError::NotConditionallyNegative(_))
        ));
        // conditionally negative but φ(I) not bounded below
        let x = elementary(2, 2, 0, 1) * cr(2f64.sqrt());
        let phi = SuperOperator::conjugation(&x).scale(-1.0);
        assert!(matches!(
            invert_cond_negative(&phi, &t),
            Err(CondformError::UnitLowerBoundViolated(_))
        ));
    }

    #[test]
    fn exponential_checks() {
        let t = tol();
        let d = 2;
        let ts = [0.01, 0.1, 1.0];
        assert!(exp_semigroup_cp_check(&SuperOperator::zero(d, d), &ts, &t)
            .unwrap()
            .iter()
            .all(|&b| b));
        assert!(
            exp_semigroup_cp_check(&SuperOperator::identity(d).scale(-1.0), &ts, &t)
                .unwrap()
                .iter()
                .all(|&b| b)
        );
        // Lindblad-type generator tr(·)I - ι
        let l = trace_map(d).sub(&SuperOperator::identity(d));
        assert!(exp_semigroup_cp_check(&l, &ts, &t)
            .unwrap()
            .iter()
            .all(|&b| b));
    }

    #[test]
    fn classify_cross_oracle_with_exponential() {
        // conditionally positive ⟺ e^{tL} CP for all small t, on decisive
        // random maps
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let ts = [1e-3, 1e-2, 1e-1];
        for k in 0..30 {
            let d = 2 + (k % 2) as usize;
            let l = if k % 2 == 0 {
                // conditionally positive: sι + Y·+·Y* + CP internal
                let mut gen = SuperOperator::identity(d).scale(rng.gen_range(-1.0..1.0));
                let y = random_cmatrix(&mut rng, d, d);
                gen = gen.add(&SuperOperator::sandwich(&y, &identity_c(d)));
                gen = gen.add(&SuperOperator::sandwich(&identity_c(d), &y.adjoint()));
                let x = random_cmatrix(&mut rng, d, d);
                gen.add(&SuperOperator::conjugation(&x))
            } else {
                random_hermitian_map(&mut rng, d)
            };
            let cls = classify(&l, &t).unwrap();
            let all_cp = exp_semigroup_cp_check(&l, &ts, &t)
                .unwrap()
                .iter()
                .all(|&b| b);
            assert_eq!(
                cls.is_conditionally_positive(),
                all_cp,
                "disagreement at case {k}: {:?}",
                cls
            );
        }
    }

    #[test]
    fn cp_and_cond_negative_is_scalar() {
        // CP ∧ conditionally negative ⇒ L = s·ι with s ≥ 0
        let t = tol();
        for s in [0.0, 0.7, 2.0] {
            let l = SuperOperator::identity(3).scale(s);
            let cf = canonical_form(&l, &t).unwrap();
            let cls = classify_form(&cf, &t);
            assert!(cls.is_conditionally_negative());
            assert!(l.is_completely_positive(&t).unwrap().is_cp);
            assert!(cf.internal.is_empty() && max_abs(&cf.y) < 1e-12 && cf.s >= 0.0);
        }
    }

    #[test]
    fn lemma31_norm_control() {
        // ι - ξ₂ = κ(ι + η) with κ > 0 and ‖η‖ < ε for
        // δ(ε) = min(ε/(4p²), 0.1/√p).
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for p in [2usize, 3] {
            let pf = p as f64;
            for _ in 0..10 {
                let eps: f64 = rng.gen_range(0.05..0.9);
                let delta = (eps / (4.0 * pf * pf)).min(0.1 / pf.sqrt());
                let a = delta / 3.0;
                // ξ₂: random CP scaled to ‖ξ₂(I)‖ = a/2, ξ₁ = (1-a)ι
                let x = random_cmatrix(&mut rng, p, p);
                let raw = SuperOperator::conjugation(&x);
                let xi2 = raw.scale(0.5 * a / unit_norm(&raw, &t).unwrap());
                let xi1 = SuperOperator::identity(p).scale(1.0 - a);

                // hypothesis norms: ‖ξ₁(I)+ξ₂(I)‖ < 1 exactly, and
                // ‖ζ‖ ≤ a + (1-a)·‖ξ₂‖/(1-‖ξ₂‖) < δ by the geometric series
                let sum_unit = xi1.apply(&identity_c(p)) + xi2.apply(&identity_c(p));
                assert!(op_norm_hermitian(&sum_unit, &t).unwrap() < 1.0);
                let zeta_bound = a + (1.0 - a) * (0.5 * a) / (1.0 - 0.5 * a);
                assert!(zeta_bound < delta, "instance satisfies ‖ζ‖ < δ");

                let (kappa, eta) = lemma31_decompose(&xi2, &t).unwrap();
                assert!(kappa > 0.0);
                // rigorous norm bound ‖η‖ ≤ p^{3/2}‖η‖_HS
                assert!(
                    pf.powf(1.5) * eta.hs_norm() < eps,
                    "‖η‖ bound {} vs ε {}",
                    pf.powf(1.5) * eta.hs_norm(),
                    eps
                );
                // decomposition identity
                let recon = SuperOperator::identity(p)
                    .add(&eta)
                    .scale(kappa);
                let target = SuperOperator::identity(p).sub(&xi2);
                assert!(max_abs_diff(recon.action(), target.action()) < 1e-10);
            }
        }
    }
}
