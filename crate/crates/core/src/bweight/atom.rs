//! Exponential-monomial atoms and windowed observables.

use num_complex::Complex64;

use crate::numerics::{identity_c, CMatrix, CVector};
use crate::tol::TolerancePolicy;

use super::BweightError;

/// A vector-valued function `x ↦ coef · x^alpha · e^{-decay·x}`.
///
/// `alpha > -1` keeps `∫₀ (1-e^{-x}) x^{2α}` finite near the origin
/// (membership in L²₊); `decay > 0` gives integrability at infinity.
/// The atom is square-integrable on (0,∞) iff `alpha > -1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub alpha: f64,
    pub decay: f64,
    pub coef: CVector,
}

impl Atom {
    pub fn new(alpha: f64, decay: f64, coef: CVector) -> Result<Self, BweightError> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(BweightError::InvalidAtom(format!(
                "alpha must exceed -1, got {alpha}"
            )));
        }
        if !(decay > 0.0) || !decay.is_finite() {
            return Err(BweightError::InvalidAtom(format!(
                "decay must be positive, got {decay}"
            )));
        }
        Ok(Atom { alpha, decay, coef })
    }

    pub fn scalar(alpha: f64, decay: f64, c: Complex64) -> Result<Self, BweightError> {
        Atom::new(alpha, decay, CVector::from_element(1, c))
    }

    pub fn dim(&self) -> usize {
        self.coef.len()
    }

    /// Square integrable on (0,∞) iff the exponent exceeds -1/2.
    pub fn is_square_integrable(&self) -> bool {
        self.alpha > -0.5
    }

    /// The divergent flag of the strict-infiniteness calculus.
    pub fn is_divergent(&self) -> bool {
        self.alpha <= -0.5
    }

    /// Pointwise evaluation (test oracles only).
    pub fn eval(&self, x: f64) -> CVector {
        let s = x.powf(self.alpha) * (-self.decay * x).exp();
        &self.coef * Complex64::new(s, 0.0)
    }

    pub fn scaled(&self, c: Complex64) -> Atom {
        Atom {
            alpha: self.alpha,
            decay: self.decay,
            coef: &self.coef * c,
        }
    }

    /// Apply a matrix to the coefficient vector.
    pub fn mapped(&self, m: &CMatrix) -> Atom {
        Atom {
            alpha: self.alpha,
            decay: self.decay,
            coef: m * &self.coef,
        }
    }
}

/// Evaluate a sum of atoms at a point (test oracles only).
pub fn eval_atoms(atoms: &[Atom], dim: usize, x: f64) -> CVector {
    let mut v = CVector::zeros(dim);
    for a in atoms {
        v += a.eval(x);
    }
    v
}

/// Cluster atoms by their `(alpha, decay)` signature, summing coefficient
/// vectors; signatures closer than `sig_tol` are identified.
pub fn cluster_atoms(atoms: &[Atom], dim: usize, sig_tol: f64) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for a in atoms {
        if let Some(hit) = out
            .iter_mut()
            .find(|b| (b.alpha - a.alpha).abs() <= sig_tol && (b.decay - a.decay).abs() <= sig_tol)
        {
            hit.coef += &a.coef;
        } else {
            let mut coef = CVector::zeros(dim);
            coef += &a.coef;
            out.push(Atom {
                alpha: a.alpha,
                decay: a.decay,
                coef,
            });
        }
    }
    out
}

/// One term of a scalar profile, `x ↦ coef · x^beta e^{-b·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarAtom {
    pub beta: f64,
    pub b: f64,
    pub coef: f64,
}

impl ScalarAtom {
    pub fn new(beta: f64, b: f64, coef: f64) -> Result<Self, BweightError> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(BweightError::InvalidObservable(format!(
                "profile exponent must be ≥ 0, got {beta}"
            )));
        }
        if !(b >= 0.0) || !b.is_finite() {
            return Err(BweightError::InvalidObservable(format!(
                "profile decay must be ≥ 0, got {b}"
            )));
        }
        Ok(ScalarAtom { beta, b, coef })
    }
}

/// A bounded observable `B ⊗ m(x)·1_{[u,v]}(x)` with a finite-atom profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub matrix: CMatrix,
    /// Window `[u, v]`; `v = f64::INFINITY` is allowed.
    pub window: (f64, f64),
    pub profile: Vec<ScalarAtom>,
}

impl Observable {
    pub fn new(
        matrix: CMatrix,
        window: (f64, f64),
        profile: Vec<ScalarAtom>,
    ) -> Result<Self, BweightError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(BweightError::InvalidObservable(
                "observable matrix must be square".into(),
            ));
        }
        let (u, v) = window;
        if !(u >= 0.0) || !(v > u) {
            return Err(BweightError::InvalidObservable(format!(
                "window must satisfy 0 ≤ u < v, got [{u}, {v}]"
            )));
        }
        // boundedness on an unbounded window needs decay against x^beta
        if v.is_infinite() {
            for p in &profile {
                if p.beta > 0.0 && p.b == 0.0 {
                    return Err(BweightError::InvalidObservable(
                        "unbounded profile term x^beta with b = 0 on an infinite window".into(),
                    ));
                }
            }
        }
        Ok(Observable {
            matrix,
            window,
            profile,
        })
    }

    /// `Λ(B)`: profile `e^{-x}` on the full half line.
    pub fn lambda(matrix: CMatrix) -> Self {
        Observable {
            matrix,
            window: (0.0, f64::INFINITY),
            profile: vec![ScalarAtom {
                beta: 0.0,
                b: 1.0,
                coef: 1.0,
            }],
        }
    }

    /// `Λ(I)` on ℂ^dim.
    pub fn lambda_unit(dim: usize) -> Self {
        Observable::lambda(identity_c(dim))
    }

    /// `(I - Λ)(B)`: profile `1 - e^{-x}`.
    pub fn one_minus_lambda(matrix: CMatrix) -> Self {
        Observable {
            matrix,
            window: (0.0, f64::INFINITY),
            profile: vec![
                ScalarAtom {
                    beta: 0.0,
                    b: 0.0,
                    coef: 1.0,
                },
                ScalarAtom {
                    beta: 0.0,
                    b: 1.0,
                    coef: -1.0,
                },
            ],
        }
    }

    pub fn one_minus_lambda_unit(dim: usize) -> Self {
        Observable::one_minus_lambda(identity_c(dim))
    }

    /// Flat window `B ⊗ 1_{[u,v]}` (the projection `E(u,v)` compressed).
    pub fn window_of(matrix: CMatrix, u: f64, v: f64) -> Result<Self, BweightError> {
        Observable::new(
            matrix,
            (u, v),
            vec![ScalarAtom {
                beta: 0.0,
                b: 0.0,
                coef: 1.0,
            }],
        )
    }

    /// Identity observable `B ⊗ 1` on the full half line.
    pub fn unit(dim: usize) -> Self {
        Observable {
            matrix: identity_c(dim),
            window: (0.0, f64::INFINITY),
            profile: vec![ScalarAtom {
                beta: 0.0,
                b: 0.0,
                coef: 1.0,
            }],
        }
    }

    /// Pointwise profile value (test oracles only).
    pub fn profile_at(&self, x: f64) -> f64 {
        if x < self.window.0 || x > self.window.1 {
            return 0.0;
        }
        self.profile
            .iter()
            .map(|p| p.coef * x.powf(p.beta) * (-p.b * x).exp())
            .sum()
    }
}

/// Clustering width for atom signatures, tied to the equality tolerance.
pub fn signature_tol(tol: &TolerancePolicy) -> f64 {
    (tol.eps_eq * 1e3).min(1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cr;

    #[test]
    fn atom_domain_checks() {
        assert!(Atom::scalar(-1.0, 1.0, cr(1.0)).is_err());
        assert!(Atom::scalar(0.0, 0.0, cr(1.0)).is_err());
        let a = Atom::scalar(-0.5, 0.5, cr(1.0)).unwrap();
        assert!(a.is_divergent() && !a.is_square_integrable());
        let b = Atom::scalar(-0.4999, 0.5, cr(1.0)).unwrap();
        assert!(b.is_square_integrable());
    }

    #[test]
    fn observable_validation() {
        let i2 = identity_c(2);
        assert!(Observable::new(i2.clone(), (1.0, 0.5), vec![]).is_err());
        // unbounded polynomial profile on infinite window rejected
        let bad = ScalarAtom::new(1.0, 0.0, 1.0).unwrap();
        assert!(Observable::new(i2.clone(), (0.0, f64::INFINITY), vec![bad]).is_err());
        // but fine on a finite window
        assert!(Observable::new(i2, (0.0, 2.0), vec![bad]).is_ok());
    }

    #[test]
    fn clustering_merges_equal_signatures() {
        let a1 = Atom::scalar(-0.5, 0.5, cr(1.0)).unwrap();
        let a2 = Atom::scalar(-0.5, 0.5, cr(-1.0)).unwrap();
        let a3 = Atom::scalar(-0.5, 1.0, cr(1.0)).unwrap();
        let merged = cluster_atoms(&[a1, a2, a3], 1, 1e-9);
        assert_eq!(merged.len(), 2);
        assert!(merged[0].coef[0].norm() < 1e-15);
    }
}
