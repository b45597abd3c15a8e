//! Adaptive Gauss–Kronrod quadrature.
//!
//! This is the independent oracle for every closed-form Gram integral in
//! the weight modules; it never runs on a hot path.  G7/K15 nodes are all
//! interior, so integrable power singularities at the lower endpoint are
//! handled by plain adaptive bisection.

use super::NumericsError;

/// K15 nodes on [0,1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut res_k = 0.0;
    let mut res_g = 0.0;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        if x == 0.0 {
            let fc = f(c);
            res_k += wk * fc;
            res_g += WG[3] * fc;
        } else {
            let f1 = f(c - h * x);
            let f2 = f(c + h * x);
            res_k += wk * (f1 + f2);
            if j % 2 == 1 {
                res_g += WG[j / 2] * (f1 + f2);
            }
        }
    }
    (res_k * h, (res_k - res_g).abs() * h)
}

/// Integrate `f` over the finite interval `[a, b]` to relative error
/// `rel_err`, by adaptive bisection of the worst segment.
pub fn adaptive_quadrature(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_err: f64,
) -> Result<f64, NumericsError> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(NumericsError::DomainError(
            "adaptive_quadrature needs finite limits".into(),
        ));
    }
    if a >= b {
        return Ok(0.0);
    }
    let mut segs: Vec<(f64, f64, f64, f64)> = Vec::new(); // (a, b, value, err)
    let (v, e) = gk15(f, a, b);
    segs.push((a, b, v, e));
    for _ in 0..200_000 {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        let target = rel_err * total.abs().max(1e-300);
        if err <= target || err <= 1e-305 {
            return Ok(total);
        }
        // split the segment with the largest error estimate
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (sa, sb, _, se) = segs.swap_remove(idx);
        let mid = 0.5 * (sa + sb);
        if mid <= sa || mid >= sb {
            // interval exhausted at machine precision; accept what we have
            segs.push((sa, sb, gk15(f, sa, sb).0, 0.0));
            continue;
        }
        let (v1, e1) = gk15(f, sa, mid);
        let (v2, e2) = gk15(f, mid, sb);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(NumericsError::NonConvergence(format!(
                "non-finite integrand near [{sa}, {sb}] (err {se:.2e})"
            )));
        }
        segs.push((sa, mid, v1, e1));
        segs.push((mid, sb, v2, e2));
    }
    Err(NumericsError::NonConvergence(
        "adaptive_quadrature exceeded the subdivision budget".into(),
    ))
}

/// Integrate `f` over `[a, ∞)` by doubling the cutoff until two
/// consecutive increments fall below the tolerance.  The integrand must
/// decay exponentially, as every atom pair in this crate does.
pub fn adaptive_quadrature_to_inf(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    rel_err: f64,
) -> Result<f64, NumericsError> {
    let mut hi = (a.abs() + 8.0).max(16.0);
    let mut total = adaptive_quadrature(f, a, hi, rel_err)?;
    let mut quiet = 0;
    for _ in 0..60 {
        let next = hi * 2.0;
        let inc = adaptive_quadrature(f, hi, next, rel_err)?;
        total += inc;
        hi = next;
        if inc.abs() <= 0.5 * rel_err * total.abs().max(1e-300) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
    }
    Err(NumericsError::NonConvergence(
        "tail of the improper integral did not settle".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_over_unit_interval() {
        let v = adaptive_quadrature(&|_| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_tail() {
        let v = adaptive_quadrature_to_inf(&|x| (-2.0 * x).exp(), 0.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-11);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        let v = adaptive_quadrature(&|x| x.powf(-0.5), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn gamma_against_quadrature_grid() {
        // 5x5 (s, x) grid, relative agreement 1e-9.
        let ss = [-0.5, 0.0, 0.5, 1.5, 3.0];
        let xs = [0.1, 0.5, 1.0, 2.5, 7.0];
        for &s in &ss {
            for &x in &xs {
                let g = crate::numerics::upper_incomplete_gamma(s, x).unwrap();
                let q =
                    adaptive_quadrature_to_inf(&|u| u.powf(s - 1.0) * (-u).exp(), x, 1e-12)
                        .unwrap();
                assert!(
                    (g - q).abs() <= 1e-9 * g.abs().max(1e-300),
                    "s={s} x={x}: {g} vs {q}"
                );
            }
        }
    }
}
