//! Equilibria of the traveling-wave system and fold-Hopf classification.
//!
//! A fold-Hopf equilibrium of the 3D system has eigenvalues {0, ±i μ₀},
//! equivalently (at a zero of the field): zero trace, zero determinant of the
//! reaction Jacobian, and positive sum f_u + g_w. For the builtin model the
//! equilibrium count and the fold-Hopf locus are available in closed form,
//! with exact rational handling of the structure-changing γ thresholds.

use crate::linalg::{char_poly3, cubic_roots_real, det3, M3};
use crate::model::{
    canonical_rescale, fhn_equilibrium_cubic, fhn_h, tw_jacobian, Model, State3,
    WaveParameters,
};
use crate::rat::{Exactness, Rat};
use crate::{averaging, Error, Result};
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Default residual tolerance for Newton-refined equilibria.
pub const EQUILIBRIUM_TOL: f64 = 1e-12;
/// Classification tolerance on the fold-Hopf condition residuals.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// A refined zero of (f, g) with v = 0, its residual and the eigenvalues of
/// the traveling-wave Jacobian there.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub point: State3,
    /// ∞-norm of (f, g) at the point.
    pub residual: f64,
    pub eigenvalues: [C64; 3],
}

/// A classified fold-Hopf point.
///
/// `c0` and `mu0` are the canonical (unit-diffusion) wave speed and frequency
/// that every downstream module consumes; `c0_original` and `mu0_original`
/// are the same quantities in the model's own frame (they differ by the
/// factor √d). `partials` holds (f_u, f_w, g_u, g_w) at the point, which are
/// frame-invariant.
#[derive(Debug, Clone)]
pub struct FoldHopfPoint {
    pub eq: Equilibrium,
    pub alpha0: Vec<f64>,
    /// Canonical wave speed c₀/√d.
    pub c0: f64,
    /// Canonical frequency; mu0² = f_u + g_w.
    pub mu0: f64,
    /// √d, the spatial rescale factor to the canonical frame.
    pub scale: f64,
    /// Wave speed in the model's own frame.
    pub c0_original: f64,
    /// Frequency of the model-frame traveling-wave Jacobian (mu0/√d).
    pub mu0_original: f64,
    /// Eigenvector transform to rotation ⊕ 0 coordinates (canonical frame).
    pub q: M3,
    /// (|c₀ + g_w/c₀|, |f_u g_w − f_w g_u|) in the canonical frame.
    pub cond_residuals: (f64, f64),
    /// (f_u, f_w, g_u, g_w) at the point.
    pub partials: [f64; 4],
}

impl FoldHopfPoint {
    /// Zero-amplitude period 2π/μ₀ in the canonical frame.
    pub fn reference_period(&self) -> f64 {
        2.0 * core::f64::consts::PI / self.mu0
    }
}

/// Outcome of [`classify_fold_hopf`].
#[derive(Debug, Clone)]
pub enum Classification {
    FoldHopf(FoldHopfPoint),
    /// Residuals within 10x of the tolerance: refine parameters and retry.
    NearDegenerate { residuals: (f64, f64) },
    NotFoldHopf,
}

/// Eigenvalues of a real 3x3 matrix via its characteristic cubic, with a
/// Newton polish, sorted by real part then imaginary part.
pub fn eigenvalues_3x3(j: &M3) -> [C64; 3] {
    let (c2, c1, c0) = char_poly3(j);
    cubic_roots_real(c2, c1, c0)
}

/// All distinct Newton-converged zeros of (f, g) = 0 seeded from a uniform
/// grid over `search_box = ((u_lo, u_hi), (w_lo, w_hi))`; duplicates within
/// 1e-8 are merged and results are sorted by u. Non-convergent seeds are
/// dropped silently; an empty list is a valid result.
pub fn find_equilibria(
    model: &dyn Model,
    params: &WaveParameters,
    search_box: ((f64, f64), (f64, f64)),
    grid_density: usize,
) -> Result<Vec<Equilibrium>> {
    if params.c == 0.0 {
        return Err(Error::ZeroWaveSpeed);
    }
    let ((ulo, uhi), (wlo, whi)) = search_box;
    if !(uhi > ulo && whi > wlo) {
        return Err(Error::Precondition("search box must be nondegenerate"));
    }
    let n = grid_density.max(2);
    let a = &params.alpha;
    let mut found: Vec<(f64, f64, f64)> = Vec::new();
    for iu in 0..n {
        for iw in 0..n {
            let mut u = ulo + (uhi - ulo) * (iu as f64 + 0.5) / n as f64;
            let mut w = wlo + (whi - wlo) * (iw as f64 + 0.5) / n as f64;
            let mut ok = false;
            let mut res = f64::INFINITY;
            for _ in 0..80 {
                let fv = model.f(u, w, a);
                let gv = model.g(u, w, a);
                res = fv.abs().max(gv.abs());
                if res <= EQUILIBRIUM_TOL {
                    ok = true;
                    break;
                }
                let fu = model.f_u(u, w, a);
                let fw = model.f_w(u, w, a);
                let gu = model.g_u(u, w, a);
                let gw = model.g_w(u, w, a);
                let det = fu * gw - fw * gu;
                let (du, dw) = if det.abs() > 1e-14 {
                    ((fv * gw - fw * gv) / det, (fu * gv - fv * gu) / det)
                } else {
                    // singular reaction Jacobian (fold): damped gradient step
                    let gn = (fu * fu + gu * gu + fw * fw + gw * gw).sqrt().max(1e-8);
                    ((fu * fv + gu * gv) / (gn * gn), (fw * fv + gw * gv) / (gn * gn))
                };
                u -= du;
                w -= dw;
                if !u.is_finite() || !w.is_finite() {
                    break;
                }
            }
            let margin = 0.1 * ((uhi - ulo).max(whi - wlo));
            if ok && u >= ulo - margin && u <= uhi + margin && w >= wlo - margin && w <= whi + margin {
                if !found.iter().any(|&(fu0, fw0, _)| (fu0 - u).abs() < 1e-8 && (fw0 - w).abs() < 1e-8) {
                    found.push((u, w, res));
                }
            }
        }
    }
    found.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut out = Vec::with_capacity(found.len());
    for (u, w, res) in found {
        let point = State3::new(u, 0.0, w);
        let j = tw_jacobian(model, params, point)?;
        out.push(Equilibrium { point, residual: res, eigenvalues: eigenvalues_3x3(&j) });
    }
    Ok(out)
}

/// Classify an equilibrium as fold-Hopf in the canonical frame.
///
/// Residuals are |c₀ + g_w/c₀| and |f_u g_w − f_w g_u| with c₀ the canonical
/// wave speed; both must be below [`CLASSIFY_TOL`] and f_u + g_w must be
/// positive. The transform Q is built per [`averaging::build_transform_q`]
/// and aborts if numerically singular.
pub fn classify_fold_hopf(
    model: &dyn Model,
    eq: &Equilibrium,
    params: &WaveParameters,
) -> Result<Classification> {
    if eq.residual > EQUILIBRIUM_TOL * 10.0 {
        return Err(Error::Precondition("equilibrium residual above tolerance"));
    }
    let (_, cparams, scale) = canonical_rescale(model, params)?;
    let chat = cparams.c;
    let a = &params.alpha;
    let (u, w) = (eq.point.u, eq.point.w);
    let fu = model.f_u(u, w, a);
    let fw = model.f_w(u, w, a);
    let gu = model.g_u(u, w, a);
    let gw = model.g_w(u, w, a);
    let r1 = (chat + gw / chat).abs();
    let r2 = (fu * gw - fw * gu).abs();
    let mu2 = fu + gw;
    if r1 <= CLASSIFY_TOL && r2 <= CLASSIFY_TOL && mu2 > CLASSIFY_TOL {
        let mu0 = mu2.sqrt();
        let q = averaging::build_transform_q_from(fu, fw, gu, gw, chat, mu0)?;
        let d = det3(&q);
        if d.abs() <= 1e-12 {
            return Err(Error::SingularTransform { det: d });
        }
        Ok(Classification::FoldHopf(FoldHopfPoint {
            eq: eq.clone(),
            alpha0: a.clone(),
            c0: chat,
            mu0,
            scale,
            c0_original: params.c,
            mu0_original: mu0 / scale,
            q,
            cond_residuals: (r1, r2),
            partials: [fu, fw, gu, gw],
        }))
    } else if r1 <= 10.0 * CLASSIFY_TOL && r2 <= 10.0 * CLASSIFY_TOL && mu2 > 0.0 {
        Ok(Classification::NearDegenerate { residuals: (r1, r2) })
    } else {
        Ok(Classification::NotFoldHopf)
    }
}

/// Number of solutions of the builtin model's equilibrium equation
/// `g(u, γ) = p` for γ, p > 0, including the boundary cases N = 2.
/// Boundary comparisons use a 1e-12 interval.
pub fn fhn_equilibrium_count(gamma: f64, p: f64) -> Result<u8> {
    if gamma <= 0.0 || p <= 0.0 {
        return Err(Error::Precondition("gamma and p must be positive"));
    }
    let disc = 3.64 - 12.0 / gamma;
    if disc <= 1e-12 {
        // g is monotone increasing on u >= 0
        return Ok(1);
    }
    let s = disc.sqrt();
    let u1 = (2.2 - s) / 6.0;
    let u2 = (2.2 + s) / 6.0;
    let p1 = fhn_equilibrium_cubic(u1, gamma); // local max value
    let p2 = fhn_equilibrium_cubic(u2, gamma); // local min value
    let tol = 1e-12;
    if (p - p1).abs() <= tol || (p - p2).abs() <= tol {
        return Ok(2);
    }
    if p < p1 && p > p2 {
        return Ok(3);
    }
    Ok(1)
}

/// One fold-Hopf point of the builtin model, reported in the model's own
/// frame: c₀ = √(0.05γ), μ₀² = (100 − γ²)/(500γ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FhnLocusPoint {
    pub u0: f64,
    pub w0: f64,
    pub c0: f64,
    pub p0: f64,
    pub mu0: f64,
}

fn threshold_lo() -> Rat {
    Rat::new(300, 91).unwrap()
}

fn threshold_hi() -> Rat {
    Rat::new(400, 81).unwrap()
}

/// Fold-Hopf locus of the builtin model at the given γ.
///
/// Empty for γ < 300/91 or γ ≥ 10; one point (the double root u₀ = 11/30) at
/// γ = 300/91; two points (u₁ < u₂, the roots of g_u = 0) for
/// 300/91 < γ < 400/81; one point (u₁ only, since the u₂ level p would not be
/// positive) for 400/81 ≤ γ < 10. Threshold comparisons and, where possible,
/// the point coordinates are exact for rational γ.
pub fn fhn_fold_hopf_locus(gamma: Exactness) -> Result<Vec<FhnLocusPoint>> {
    use core::cmp::Ordering;
    let g = gamma.to_f64();
    if g <= 0.0 {
        return Err(Error::Precondition("gamma must be positive"));
    }
    let mut out = Vec::new();
    if gamma.cmp_threshold(&threshold_lo()) == Ordering::Less
        || gamma.cmp_threshold(&Rat::int(10)) != Ordering::Less
    {
        return Ok(out);
    }
    let c0 = (0.05 * g).sqrt();
    let mu0 = ((100.0 - g * g) / (500.0 * g)).sqrt();
    // exact discriminant path for rational gamma
    if let Exactness::Rational(gr) = gamma {
        let disc = Rat::new(91, 25)?.sub(&Rat::int(12).div(&gr)?)?;
        match disc.signum() {
            0 => {
                let u0 = Rat::new(11, 30)?;
                out.push(locus_point_exact(u0, gr, c0, mu0)?);
                return Ok(out);
            }
            s if s > 0 => {
                if let Some(sq) = disc.sqrt_exact() {
                    // both roots exactly rational
                    let u1 = Rat::new(11, 5)?.sub(&sq)?.div(&Rat::int(6))?;
                    out.push(locus_point_exact(u1, gr, c0, mu0)?);
                    if gamma.cmp_threshold(&threshold_hi()) == Ordering::Less {
                        let u2 = Rat::new(11, 5)?.add(&sq)?.div(&Rat::int(6))?;
                        out.push(locus_point_exact(u2, gr, c0, mu0)?);
                    }
                    return Ok(out);
                }
            }
            _ => return Ok(out),
        }
    }
    // float path
    let disc = 3.64 - 12.0 / g;
    if gamma.cmp_threshold(&threshold_lo()) == Ordering::Equal || disc.abs() <= 1e-12 {
        let u0 = 11.0 / 30.0;
        out.push(locus_point_float(u0, g, c0, mu0));
        return Ok(out);
    }
    let s = disc.sqrt();
    let u1 = (2.2 - s) / 6.0;
    out.push(locus_point_float(u1, g, c0, mu0));
    if gamma.cmp_threshold(&threshold_hi()) == Ordering::Less {
        let u2 = (2.2 + s) / 6.0;
        out.push(locus_point_float(u2, g, c0, mu0));
    }
    Ok(out)
}

fn locus_point_exact(u0: Rat, gamma: Rat, c0: f64, mu0: f64) -> Result<FhnLocusPoint> {
    let w0 = u0.div(&gamma)?;
    // p = u/γ − h(u), h(u) = u(u−1)(1/10 − u)
    let one = Rat::int(1);
    let tenth = Rat::new(1, 10)?;
    let h = u0.mul(&u0.sub(&one)?)?.mul(&tenth.sub(&u0)?)?;
    let p0 = w0.sub(&h)?;
    Ok(FhnLocusPoint { u0: u0.to_f64(), w0: w0.to_f64(), c0, p0: p0.to_f64(), mu0 })
}

fn locus_point_float(u0: f64, gamma: f64, c0: f64, mu0: f64) -> FhnLocusPoint {
    FhnLocusPoint { u0, w0: u0 / gamma, c0, p0: u0 / gamma - fhn_h(u0), mu0 }
}

/// Convenience: classify each locus point of the builtin model at γ,
/// returning the full fold-Hopf data in both frames.
pub fn fhn_classified_points(gamma: Exactness) -> Result<Vec<FoldHopfPoint>> {
    let model = crate::model::builtin_fhn();
    let mut out = Vec::new();
    for lp in fhn_fold_hopf_locus(gamma)? {
        let params = WaveParameters::new(alloc::vec![gamma.to_f64(), lp.p0], lp.c0)?;
        let point = State3::new(lp.u0, 0.0, lp.w0);
        let j = tw_jacobian(&model, &params, point)?;
        let res = model
            .f(lp.u0, lp.w0, &params.alpha)
            .abs()
            .max(model.g(lp.u0, lp.w0, &params.alpha).abs());
        let eq = Equilibrium { point, residual: res, eigenvalues: eigenvalues_3x3(&j) };
        match classify_fold_hopf(&model, &eq, &params)? {
            Classification::FoldHopf(fh) => out.push(fh),
            other => {
                let _ = other;
                return Err(Error::Precondition("locus point failed classification"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_fhn, fhn_h_prime};
    use crate::rng::CounterRng;
    #[allow(unused_imports)]
    use alloc::vec;

    fn fhn_locus_rat(num: i64, den: i64) -> Vec<FhnLocusPoint> {
        fhn_fold_hopf_locus(Exactness::Rational(Rat::new(num, den).unwrap())).unwrap()
    }

    #[test]
    fn locus_boundary_exact() {
        let pts = fhn_locus_rat(300, 91);
        assert_eq!(pts.len(), 1);
        let p = pts[0];
        assert!((p.u0 - 11.0 / 30.0).abs() < 1e-15);
        assert!((p.w0 - 1001.0 / 9000.0).abs() < 1e-15);
        assert!((p.p0 - 1331.0 / 27000.0).abs() < 1e-15);
        assert!((p.c0 - (0.05 * 300.0 / 91.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn locus_empty_cases() {
        assert!(fhn_locus_rat(2, 1).is_empty());
        assert!(fhn_locus_rat(12, 1).is_empty());
        assert!(fhn_locus_rat(10, 1).is_empty());
        assert!(fhn_fold_hopf_locus(Exactness::Float(3.0)).unwrap().is_empty());
    }

    #[test]
    fn locus_two_points_at_gamma_4() {
        let pts = fhn_locus_rat(4, 1);
        assert_eq!(pts.len(), 2);
        assert!((pts[0].u0 - 7.0 / 30.0).abs() < 1e-15);
        assert!((pts[1].u0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn locus_upper_threshold_drops_u2() {
        // disc is the exact square (11/10)^2 here, u1 = 11/60 exactly
        let pts = fhn_locus_rat(400, 81);
        assert_eq!(pts.len(), 1);
        assert!((pts[0].u0 - 11.0 / 60.0).abs() < 1e-15);
        let below = fhn_locus_rat(399, 81);
        assert_eq!(below.len(), 2);
    }

    #[test]
    fn locus_satisfies_defining_relations() {
        for g in [3.4, 3.9, 4.7, 6.0, 9.5] {
            for p in fhn_fold_hopf_locus(Exactness::Float(g)).unwrap() {
                assert!((1.0 / g - fhn_h_prime(p.u0)).abs() < 1e-12);
                assert!((fhn_equilibrium_cubic(p.u0, g) - p.p0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn count_cases() {
        assert_eq!(fhn_equilibrium_count(3.0, 0.05).unwrap(), 1);
        assert_eq!(fhn_equilibrium_count(2.0, 0.7).unwrap(), 1);
        // boundary: p equals the local max level
        let g = 4.0;
        let s = (3.64f64 - 3.0).sqrt();
        let u1 = (2.2 - s) / 6.0;
        assert_eq!(fhn_equilibrium_count(g, fhn_equilibrium_cubic(u1, g)).unwrap(), 2);
        assert_eq!(fhn_equilibrium_count(6.0, 0.001).unwrap(), 3);
        assert_eq!(fhn_equilibrium_count(4.0, 0.03).unwrap(), 3);
    }

    fn brute_force_count(gamma: f64, p: f64) -> u8 {
        // isolate real roots of g(u,gamma) - p on a fine grid + bisection
        let lo = -2.0;
        let hi = 3.0;
        let n = 30000;
        let f = |u: f64| fhn_equilibrium_cubic(u, gamma) - p;
        let mut count = 0u8;
        let mut prev = f(lo);
        for i in 1..=n {
            let u = lo + (hi - lo) * i as f64 / n as f64;
            let cur = f(u);
            if prev == 0.0 {
                count += 1;
            } else if prev * cur < 0.0 {
                count += 1;
            }
            prev = cur;
        }
        count
    }

    #[test]
    fn count_matches_brute_force_on_grid() {
        // 40x40 sample of the (γ, p) rectangle, off the measure-zero boundaries
        for ig in 0..40 {
            let gamma = 2.5 + 4.0 * (ig as f64 + 0.5) / 40.0;
            for ip in 0..40 {
                let p = 0.001 + 0.08 * (ip as f64 + 0.5) / 40.0;
                let ours = fhn_equilibrium_count(gamma, p).unwrap();
                let brute = brute_force_count(gamma, p);
                assert_eq!(ours, brute, "gamma={gamma} p={p}");
            }
        }
    }

    #[test]
    fn eigen_identity_and_random_matrices() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for e in eigenvalues_3x3(&id) {
            assert!((e - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        // residual of the characteristic polynomial at each computed root
        let mut r = CounterRng::new(42, 5);
        for _ in 0..200 {
            let mut m = [[0.0; 3]; 3];
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v = r.uniform(-2.0, 2.0);
                }
            }
            let (c2, c1, c0) = char_poly3(&m);
            for z in eigenvalues_3x3(&m) {
                let p = ((z + c2) * z + c1) * z + c0;
                assert!(p.norm() < 1e-9, "residual {}", p.norm());
            }
        }
    }

    #[test]
    fn eigenvalues_match_durand_kerner_oracle() {
        let mut r = CounterRng::new(9, 9);
        for _ in 0..100 {
            let mut m = [[0.0; 3]; 3];
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v = r.uniform(-3.0, 3.0);
                }
            }
            let (c2, c1, c0) = char_poly3(&m);
            // Durand-Kerner simultaneous iteration, independent of Cardano
            let mut zs = [C64::new(0.4, 0.9), C64::new(-0.6, 0.3), C64::new(0.1, -0.8)];
            for _ in 0..200 {
                let prev = zs;
                for i in 0..3 {
                    let z = prev[i];
                    let fz = ((z + c2) * z + c1) * z + c0;
                    let mut den = C64::new(1.0, 0.0);
                    for (j, &zj) in prev.iter().enumerate() {
                        if j != i {
                            den *= z - zj;
                        }
                    }
                    zs[i] = z - fz / den;
                }
            }
            let mut ours: Vec<C64> = eigenvalues_3x3(&m).to_vec();
            for z in zs {
                let k = ours
                    .iter()
                    .enumerate()
                    .min_by(|a, b| (a.1 - z).norm().partial_cmp(&(b.1 - z).norm()).unwrap())
                    .map(|(i, _)| i)
                    .unwrap();
                assert!((ours.remove(k) - z).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn find_equilibria_counts() {
        let m = builtin_fhn();
        // γ = 2, any p > 0: exactly one equilibrium
        let params = WaveParameters::new(vec![2.0, 0.04], 0.3).unwrap();
        let eqs = find_equilibria(&m, &params, ((-1.0, 2.0), (-1.0, 1.0)), 24).unwrap();
        assert_eq!(eqs.len(), 1);
        assert!(eqs[0].residual <= EQUILIBRIUM_TOL);
        assert_eq!(eqs[0].point.v, 0.0);

        // γ = 4, p = 0.03 lies strictly between the fold levels: three equilibria
        let params = WaveParameters::new(vec![4.0, 0.03], 0.3).unwrap();
        let eqs = find_equilibria(&m, &params, ((-1.0, 2.0), (-1.0, 1.0)), 24).unwrap();
        assert_eq!(eqs.len(), 3);

        // box containing no zero
        let eqs = find_equilibria(&m, &params, ((5.0, 6.0), (5.0, 6.0)), 8).unwrap();
        assert!(eqs.is_empty());
    }

    #[test]
    fn classify_fold_hopf_points() {
        // γ = 300/91: the exact point classifies
        let pts = fhn_classified_points(Exactness::Rational(Rat::new(300, 91).unwrap())).unwrap();
        assert_eq!(pts.len(), 1);
        let fh = &pts[0];
        assert!(fh.cond_residuals.0 <= CLASSIFY_TOL && fh.cond_residuals.1 <= CLASSIFY_TOL);
        // mu0^2 (model frame) = (100 - γ²)/(500 γ)
        let g = 300.0 / 91.0;
        let want = ((100.0 - g * g) / (500.0 * g)).sqrt();
        assert!((fh.mu0_original - want).abs() < 1e-12);
        // canonical mu0^2 = f_u + g_w
        let [fu, _, _, gw] = fh.partials;
        assert!((fh.mu0 * fh.mu0 - (fu + gw)).abs() < 1e-12);

        // γ = 4: mu0²(model frame) = 0.042
        let pts = fhn_classified_points(Exactness::Rational(Rat::new(4, 1).unwrap())).unwrap();
        assert_eq!(pts.len(), 2);
        for fh in &pts {
            assert!((fh.mu0_original * fh.mu0_original - 0.042).abs() < 1e-12);
        }
    }

    #[test]
    fn non_fold_hopf_does_not_classify() {
        let m = builtin_fhn();
        // γ = 2 equilibrium with generic c is not fold-Hopf
        let params = WaveParameters::new(vec![2.0, 0.04], 0.3).unwrap();
        let eqs = find_equilibria(&m, &params, ((-1.0, 2.0), (-1.0, 1.0)), 16).unwrap();
        match classify_fold_hopf(&m, &eqs[0], &params).unwrap() {
            Classification::NotFoldHopf => {}
            other => panic!("unexpected classification {other:?}"),
        }
    }

    #[test]
    fn fold_hopf_eigenvalue_structure() {
        // at every classified point the Jacobian eigenvalues are {0, ±i mu0}
        for g in [Rat::new(300, 91).unwrap(), Rat::new(7, 2).unwrap(), Rat::new(4, 1).unwrap()] {
            for fh in fhn_classified_points(Exactness::Rational(g)).unwrap() {
                let evs = fh.eq.eigenvalues;
                let mut best_zero = f64::INFINITY;
                let mut best_pair = f64::INFINITY;
                for e in evs {
                    best_zero = best_zero.min(e.norm());
                    best_pair = best_pair.min((e - C64::new(0.0, fh.mu0_original)).norm());
                }
                assert!(best_zero < 1e-8, "zero eigenvalue missing: {evs:?}");
                assert!(best_pair < 1e-8, "imaginary pair missing: {evs:?}");
            }
        }
    }

    #[test]
    fn transform_conjugates_to_block_form() {
        use crate::linalg::{inv3, matmul3};
        for fh in fhn_classified_points(Exactness::Rational(Rat::new(4, 1).unwrap())).unwrap() {
            let m = builtin_fhn();
            let params = WaveParameters::new(fh.alpha0.clone(), fh.c0_original).unwrap();
            let (cm, cp, _) = canonical_rescale(&m, &params).unwrap();
            let j = tw_jacobian(&cm, &cp, fh.eq.point).unwrap();
            let qi = inv3(&fh.q, 1e-12).unwrap();
            let b = matmul3(&qi, &matmul3(&j, &fh.q));
            let want = [
                [0.0, fh.mu0, 0.0],
                [-fh.mu0, 0.0, 0.0],
                [0.0, 0.0, 0.0],
            ];
            for i in 0..3 {
                for k in 0..3 {
                    assert!((b[i][k] - want[i][k]).abs() < 1e-8, "B[{i}][{k}] = {}", b[i][k]);
                }
            }
        }
    }
}
