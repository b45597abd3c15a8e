//! Closed-form cutoff Gram integrals.
//!
//! Every pairing reduces to sums of `∫_L^U x^{s-1} e^{-cx} dx` with
//! `s = α_f + α_g + β + 1` and `c = a_f + a_g + b > 0`, i.e. to
//! differences of upper incomplete gamma values `c^{-s}·Γ(s, c·)`.
//!
//! Divergence at the origin is decided per exponent cluster: for
//! `s ≤ 0` and lower limit 0 the entries of a cluster diverge like a
//! common `L^s/|s|` (or `-ln L` at `s = 0`) with coefficient `Σ coef`, so
//! the cluster is finite iff its coefficients cancel, in which case its
//! value is the analytic continuation `Γ(s)·Σ coef·c^{-s}` (resp.
//! `-Σ coef·ln c`).  Two atoms with the same divergent exponent are thus
//! identified modulo L², which is what turns the divergence conditions
//! into rank checks.

use num_complex::Complex64;

use crate::numerics::{cplx, cr, gamma_fn, upper_incomplete_gamma, CMatrix};
use crate::tol::TolerancePolicy;

use super::{Atom, BweightError, Observable, ScalarAtom};

/// A finite-or-divergent scalar value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GramValue {
    Finite(Complex64),
    Divergent,
}

impl GramValue {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            GramValue::Finite(v) => Some(*v),
            GramValue::Divergent => None,
        }
    }

    pub fn expect_finite(&self, what: &str) -> Result<Complex64, BweightError> {
        self.finite()
            .ok_or_else(|| BweightError::DivergentValue(what.to_string()))
    }
}

/// One collected integral entry: `coef · ∫_L^U x^{s-1} e^{-c x} dx`.
#[derive(Debug, Clone, Copy)]
struct Entry {
    coef: Complex64,
    s: f64,
    c: f64,
}

/// `∫_L^U x^{s-1} e^{-cx} dx = c^{-s} (Γ(s, cL) - Γ(s, cU))` for `L > 0`
/// (or `s > 0` at `L = 0`).
fn finite_piece(s: f64, c: f64, lo: f64, hi: f64) -> Result<f64, BweightError> {
    debug_assert!(c > 0.0);
    let upper_term = if hi.is_finite() {
        upper_incomplete_gamma(s, c * hi)?
    } else {
        0.0
    };
    let lower_term = if lo > 0.0 {
        upper_incomplete_gamma(s, c * lo)?
    } else {
        // Γ(s, 0) = Γ(s), only reachable for s > 0
        gamma_fn(s)?
    };
    Ok(c.powf(-s) * (lower_term - upper_term))
}

/// Sum a batch of entries over `[lo, hi]`, deciding divergence per
/// exponent cluster when `lo = 0`.
fn sum_entries(
    entries: &[Entry],
    lo: f64,
    hi: f64,
    tol: &TolerancePolicy,
) -> Result<GramValue, BweightError> {
    let mut total = Complex64::new(0.0, 0.0);
    if lo > 0.0 {
        for e in entries {
            if e.coef.norm() == 0.0 {
                continue;
            }
            total += e.coef * cr(finite_piece(e.s, e.c, lo, hi)?);
        }
        return Ok(GramValue::Finite(total));
    }

    // lo == 0: group the s ≤ 0 entries into clusters of equal exponent
    let mut clusters: Vec<(f64, Vec<Entry>)> = Vec::new();
    for e in entries {
        if e.coef.norm() == 0.0 {
            continue;
        }
        if e.s > 1e-9 {
            total += e.coef * cr(finite_piece(e.s, e.c, 0.0, hi)?);
        } else {
            match clusters.iter_mut().find(|(s, _)| (*s - e.s).abs() <= 1e-9) {
                Some((_, v)) => v.push(*e),
                None => clusters.push((e.s, vec![*e])),
            }
        }
    }
    for (s, bucket) in clusters {
        let coef_sum: Complex64 = bucket.iter().map(|e| e.coef).sum();
        let coef_scale: f64 = bucket.iter().map(|e| e.coef.norm()).sum();
        if coef_sum.norm() > tol.eps_eq * coef_scale.max(1e-300) {
            return Ok(GramValue::Divergent);
        }
        // the L^s (resp. ln L) singularities cancel; finite part from the
        // analytic continuation of Γ(s, ·) at the origin
        let at_zero = s.abs() <= 1e-9;
        for e in &bucket {
            let head = if at_zero {
                // Γ(0, cL) = -γ - ln c - ln L + O(L); the -γ - ln L parts
                // cancel in the sum
                -cr(e.c.ln())
            } else {
                // c^{-s} Γ(s, cL) = c^{-s} Γ(s) - L^s/s + O(L^{s+1})
                cr(e.c.powf(-s) * gamma_fn(s)?)
            };
            let tail = if hi.is_finite() {
                cr(e.c.powf(-s) * upper_incomplete_gamma(s, e.c * hi)?)
            } else {
                Complex64::new(0.0, 0.0)
            };
            total += e.coef * (head - tail);
        }
    }
    Ok(GramValue::Finite(total))
}

/// Cutoff Gram pairing
/// `⟨f, (B ⊗ m·1_{[u,v]}) g⟩` restricted to `[max(u,t), v]`:
/// `Σ ⟨coef_f, B coef_g⟩ · prof.coef · ∫ x^{α_f+α_g+β} e^{-(a_f+a_g+b)x}`.
///
/// `weight = None` means `B = I`.  Returns [`GramValue::Divergent`] when a
/// cluster with combined gamma exponent `s ≤ 0` survives at lower limit
/// zero; errors with `InadmissiblePair` for `s ≤ -1` (impossible for
/// validated atoms, kept as a guard).
pub fn gram(
    f: &[Atom],
    g: &[Atom],
    profile: &[ScalarAtom],
    window: (f64, f64),
    t: f64,
    weight: Option<&CMatrix>,
    tol: &TolerancePolicy,
) -> Result<GramValue, BweightError> {
    let (u, v) = window;
    let lo = u.max(t).max(0.0);
    if lo >= v {
        return Ok(GramValue::Finite(Complex64::new(0.0, 0.0)));
    }
    let mut entries = Vec::with_capacity(f.len() * g.len() * profile.len());
    for af in f {
        for ag in g {
            let pair = match weight {
                Some(b) => (af.coef.adjoint() * b * &ag.coef)[(0, 0)],
                None => af.coef.dotc(&ag.coef),
            };
            if pair.norm() == 0.0 {
                continue;
            }
            for p in profile {
                let s = af.alpha + ag.alpha + p.beta + 1.0;
                if s <= -1.0 + 1e-12 {
                    return Err(BweightError::InadmissiblePair(s - 1.0));
                }
                let c = af.decay + ag.decay + p.b;
                debug_assert!(c > 0.0, "atom decays keep c positive");
                entries.push(Entry {
                    coef: pair * cr(p.coef),
                    s,
                    c,
                });
            }
        }
    }
    sum_entries(&entries, lo, v, tol)
}

/// Quadrature oracle for the same pairing (tests only): integrates
/// `Re/Im ⟨f(x), B g(x)⟩ m(x)` over the window numerically.
pub fn gram_quadrature(
    f: &[Atom],
    g: &[Atom],
    obs: &Observable,
    t: f64,
    dim: usize,
    tol: &TolerancePolicy,
) -> Result<Complex64, BweightError> {
    use crate::numerics::{adaptive_quadrature, adaptive_quadrature_to_inf};
    let lo = obs.window.0.max(t);
    let hi = obs.window.1;
    let val = |x: f64| -> Complex64 {
        let fx = super::eval_atoms(f, dim, x);
        let gx = super::eval_atoms(g, dim, x);
        let pair = (fx.adjoint() * &obs.matrix * gx)[(0, 0)];
        pair * cr(obs.profile_at(x.clamp(obs.window.0, obs.window.1)))
    };
    let re = |x: f64| val(x).re;
    let im = |x: f64| val(x).im;
    let (vr, vi) = if hi.is_finite() {
        (
            adaptive_quadrature(&re, lo, hi, tol.quad_rel_err)?,
            adaptive_quadrature(&im, lo, hi, tol.quad_rel_err)?,
        )
    } else {
        (
            adaptive_quadrature_to_inf(&re, lo, tol.quad_rel_err)?,
            adaptive_quadrature_to_inf(&im, lo, tol.quad_rel_err)?,
        )
    };
    Ok(cplx(vr, vi))
}
