//! First-order averaging of the blown-up traveling-wave field.
//!
//! Near a fold-Hopf point the state is written as P₀ + εQy with Q the
//! eigenvector transform, giving `dy/dξ = By + X₀ + ε X₁(y) + O(ε²)` with B
//! the rotation ⊕ 0 block. In cylindrical coordinates (r, θ, w) the
//! first-order averaged functions are
//!
//! ```text
//! R₁(r, w) = ∫₀^{2π} (cos θ · X₁₁ + sin θ · X₂₁) dθ
//! R₂(r, w) = ∫₀^{2π} X₃₁ dθ
//! ```
//!
//! and a nondegenerate zero (r*, w*) with r* > 0 continues to an isolated
//! periodic orbit. Averaging applies only when the constant term X₀
//! vanishes; X₀ is extracted and reported as the solvability residual. For
//! the builtin model a parameter drift linear in ε moves the equilibrium
//! through a fold and leaves a nonzero X₀, so the shipped unfolding enters at
//! order ε² (γ(ε) = γ₀ + γ₁ε²), for which X₀ ≡ 0 and the closed forms below
//! hold.
//!
//! Convention: everything here uses the R-definition above. An equivalent
//! convention divides by −μ₀ (G_j = −R_j/μ₀); zero sets agree and Jacobian
//! determinants scale by μ₀².

use crate::equilibria::FoldHopfPoint;
use crate::linalg::{inv3, matvec3, M3, V3};
use crate::model::{tw_vector_field, Model, State3, WaveParameters};
use crate::{Error, Result};
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Parameter path α(ε) = α₀ + α̃₁ε + α̃₂ε², c(ε) = c₀ + c̃₁ε + c̃₂ε²,
/// truncated at order 2. Evaluation at ε = 0 returns (α₀, c₀) exactly.
#[derive(Debug, Clone, Default)]
pub struct UnfoldingPath {
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
}

impl UnfoldingPath {
    /// Drift entering only at second order; first-order drifts generically
    /// violate the solvability condition when the equilibrium folds.
    pub fn quadratic(alpha2: Vec<f64>) -> Self {
        UnfoldingPath { alpha1: Vec::new(), alpha2, c1: 0.0, c2: 0.0 }
    }

    pub fn eval(&self, alpha0: &[f64], c0: f64, eps: f64) -> (Vec<f64>, f64) {
        let mut alpha = alpha0.to_vec();
        for (i, a) in alpha.iter_mut().enumerate() {
            if let Some(v) = self.alpha1.get(i) {
                *a += v * eps;
            }
            if let Some(v) = self.alpha2.get(i) {
                *a += v * eps * eps;
            }
        }
        (alpha, c0 + self.c1 * eps + self.c2 * eps * eps)
    }
}

/// Eigenvector transform to rotation ⊕ 0 coordinates, built from the point
/// data: columns are the real and (negated) imaginary parts of the complex
/// eigenvector for +iμ₀ normalized to unit u-component, and the kernel vector
/// normalized to unit w-component. Requires g_u ≠ 0.
pub fn build_transform_q_from(fu: f64, fw: f64, gu: f64, gw: f64, c0: f64, mu0: f64) -> Result<M3> {
    let _ = (fu, fw);
    if gu.abs() < 1e-14 {
        return Err(Error::Precondition("transform requires g_u != 0 at the point"));
    }
    // third component of the +i mu0 eigenvector with unit first component
    let z3 = C64::new(gu, 0.0) / C64::new(-gw, c0 * mu0);
    Ok([
        [1.0, 0.0, -gw / gu],
        [0.0, mu0, 0.0],
        [z3.re, z3.im, 1.0],
    ])
}

/// The transform stored in a classified point, rebuilt from its data.
pub fn build_transform_q(fh: &FoldHopfPoint) -> Result<M3> {
    let [fu, fw, gu, gw] = fh.partials;
    build_transform_q_from(fu, fw, gu, gw, fh.c0, fh.mu0)
}

/// Evaluators for the constant term X₀ and first-order term X₁ of the
/// blown-up field, extracted by Richardson-extrapolated central differences
/// in ε at ε = 0 (two step sizes, order-4).
pub struct VectorFieldExpansion<'a> {
    model: &'a dyn Model,
    fh: &'a FoldHopfPoint,
    path: &'a UnfoldingPath,
    q: M3,
    qi: M3,
    base: V3,
    mu0: f64,
    /// Base step for the ε-differences.
    pub step: f64,
    /// Extrapolation disagreement threshold.
    pub smoothness_tol: f64,
}

impl<'a> VectorFieldExpansion<'a> {
    /// Blown-up remainder W(y, ε) = (1/ε) Q⁻¹ F(P₀ + εQy; α(ε), c(ε)) − By.
    fn w(&self, y: V3, eps: f64) -> Result<V3> {
        let (alpha, c) = self.path.eval(&self.fh.alpha0, self.fh.c0, eps);
        let params = WaveParameters { alpha, c };
        let qy = matvec3(&self.q, y);
        let x = State3::new(self.base[0] + eps * qy[0], self.base[1] + eps * qy[1], self.base[2] + eps * qy[2]);
        let f = tw_vector_field(self.model, &params, x)?.to_array();
        let n = matvec3(&self.qi, f);
        let b = [self.mu0 * y[1], -self.mu0 * y[0], 0.0];
        Ok([n[0] / eps - b[0], n[1] / eps - b[1], n[2] / eps - b[2]])
    }

    /// Constant term X₀ (independent of y when the path is admissible).
    pub fn x0(&self, y: V3) -> Result<V3> {
        let e = self.step;
        let even = |e: f64| -> Result<V3> {
            let a = self.w(y, e)?;
            let b = self.w(y, -e)?;
            Ok([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0])
        };
        let r1 = richardson(even(e)?, even(e / 2.0)?);
        let r2 = richardson(even(e / 2.0)?, even(e / 4.0)?);
        self.check(r1, r2)?;
        Ok(r2)
    }

    /// First-order term X₁(y).
    pub fn x1(&self, y: V3) -> Result<V3> {
        let e = self.step;
        let diff = |e: f64| -> Result<V3> {
            let a = self.w(y, e)?;
            let b = self.w(y, -e)?;
            Ok([(a[0] - b[0]) / (2.0 * e), (a[1] - b[1]) / (2.0 * e), (a[2] - b[2]) / (2.0 * e)])
        };
        let r1 = richardson(diff(e)?, diff(e / 2.0)?);
        let r2 = richardson(diff(e / 2.0)?, diff(e / 4.0)?);
        self.check(r1, r2)?;
        Ok(r2)
    }

    fn check(&self, a: V3, b: V3) -> Result<()> {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            d = d.max((a[i] - b[i]).abs());
        }
        if d > self.smoothness_tol {
            return Err(Error::ExtrapolationDisagreement { delta: d });
        }
        Ok(())
    }
}

fn richardson(coarse: V3, fine: V3) -> V3 {
    [
        (4.0 * fine[0] - coarse[0]) / 3.0,
        (4.0 * fine[1] - coarse[1]) / 3.0,
        (4.0 * fine[2] - coarse[2]) / 3.0,
    ]
}

/// Build the expansion evaluators for a canonical model at a classified point.
/// The path must start at (α₀, c₀), which holds by construction of
/// [`UnfoldingPath`].
pub fn expand_vector_field<'a>(
    model: &'a dyn Model,
    fh: &'a FoldHopfPoint,
    path: &'a UnfoldingPath,
) -> Result<VectorFieldExpansion<'a>> {
    if model.diff_coeff() != 1.0 {
        return Err(Error::Precondition("expansion requires the canonical model"));
    }
    if path.alpha1.len() > fh.alpha0.len() || path.alpha2.len() > fh.alpha0.len() {
        return Err(Error::Precondition("path coefficients longer than parameter vector"));
    }
    let q = fh.q;
    let qi = inv3(&q, 1e-12)?;
    Ok(VectorFieldExpansion {
        model,
        fh,
        path,
        q,
        qi,
        base: fh.eq.point.to_array(),
        mu0: fh.mu0,
        step: 1e-3,
        smoothness_tol: 1e-7,
    })
}

/// Composite trapezoid rule for a 2π-periodic integrand, spectrally accurate
/// on smooth integrands.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(mut f: F, nodes: usize) -> f64 {
    let n = nodes.max(4);
    let h = 2.0 * core::f64::consts::PI / n as f64;
    let mut s = 0.0;
    for k in 0..n {
        s += f(k as f64 * h);
    }
    s * h
}

/// The averaged functions R₁, R₂ with their solvability diagnostics.
pub struct AveragedSystem<'a> {
    exp: VectorFieldExpansion<'a>,
    pub quad_nodes: usize,
    /// max |X₀| over a fixed sample of points.
    pub solvability_residual: f64,
}

/// Tolerance on the solvability residual max|X₀|.
pub const SOLVABILITY_TOL: f64 = 1e-8;

impl<'a> AveragedSystem<'a> {
    pub fn r1(&self, r: f64, w: f64) -> Result<f64> {
        self.quad(r, w, 0)
    }

    pub fn r2(&self, r: f64, w: f64) -> Result<f64> {
        self.quad(r, w, 1)
    }

    pub fn pair(&self, r: f64, w: f64) -> Result<(f64, f64)> {
        Ok((self.r1(r, w)?, self.r2(r, w)?))
    }

    fn quad(&self, r: f64, w: f64, which: usize) -> Result<f64> {
        self.quad_n(r, w, which, self.quad_nodes)
    }

    fn quad_n(&self, r: f64, w: f64, which: usize, n: usize) -> Result<f64> {
        let mut err = None;
        let val = periodic_trapezoid(
            |th| {
                let y = [r * th.cos(), r * th.sin(), w];
                match self.exp.x1(y) {
                    Ok(x) => {
                        if which == 0 {
                            th.cos() * x[0] + th.sin() * x[1]
                        } else {
                            x[2]
                        }
                    }
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            },
            n,
        );
        match err {
            Some(e) => Err(e),
            None => Ok(val),
        }
    }

    /// Node-doubling self check at a sample point; returns the change.
    pub fn quadrature_self_check(&self, r: f64, w: f64) -> Result<f64> {
        let a1 = self.quad_n(r, w, 0, self.quad_nodes)?;
        let a2 = self.quad_n(r, w, 0, 2 * self.quad_nodes)?;
        let b1 = self.quad_n(r, w, 1, self.quad_nodes)?;
        let b2 = self.quad_n(r, w, 1, 2 * self.quad_nodes)?;
        let delta = (a1 - a2).abs().max((b1 - b2).abs());
        if delta > 1e-10 {
            return Err(Error::QuadratureNonSmooth { delta });
        }
        Ok(delta)
    }
}

/// Assemble the averaged system; errors if the constant term X₀ exceeds the
/// solvability tolerance (averaging does not apply then).
pub fn averaged_functions<'a>(
    exp: VectorFieldExpansion<'a>,
    quadrature_order: usize,
) -> Result<AveragedSystem<'a>> {
    let mut resid: f64 = 0.0;
    for y in [[0.0, 0.0, 0.0], [0.3, -0.2, 0.4], [0.7, 0.1, -0.5]] {
        let x0 = exp.x0(y)?;
        for v in x0 {
            resid = resid.max(v.abs());
        }
    }
    if resid > SOLVABILITY_TOL {
        return Err(Error::SolvabilityResidual { value: resid });
    }
    Ok(AveragedSystem { exp, quad_nodes: quadrature_order.max(16), solvability_residual: resid })
}

/// A nondegenerate zero of the averaged functions.
#[derive(Debug, Clone, Copy)]
pub struct AveragedZero {
    pub r: f64,
    pub w: f64,
    pub jac: [[f64; 2]; 2],
    pub det: f64,
    pub residual: f64,
}

/// Newton iteration on (R₁, R₂) from `guess = (r, w)` with r > 0. The
/// Jacobian uses fourth-order central differences so the recorded
/// determinant inherits quadrature-level accuracy.
pub fn find_averaged_zero(avg: &AveragedSystem<'_>, guess: (f64, f64)) -> Result<AveragedZero> {
    let (mut r, mut w) = guess;
    if r <= 0.0 {
        return Err(Error::Precondition("initial guess must have r > 0"));
    }
    let mut residual = f64::INFINITY;
    for iter in 0..50 {
        let (f1, f2) = avg.pair(r, w)?;
        residual = f1.abs().max(f2.abs());
        if residual < 1e-10 {
            if r < 1e-6 * guess.0.max(1e-6) {
                // the averaged system always vanishes on r = 0; that boundary
                // zero carries no orbit
                return Err(Error::Precondition("Newton converged to the r = 0 boundary"));
            }
            let jac = averaged_jacobian(avg, r, w)?;
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det.abs() <= 1e-10 {
                return Err(Error::DegenerateJacobian { det });
            }
            return Ok(AveragedZero { r, w, jac, det, residual });
        }
        let j = averaged_jacobian(avg, r, w)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() <= 1e-12 {
            return Err(Error::DegenerateJacobian { det });
        }
        let dr = (f1 * j[1][1] - j[0][1] * f2) / det;
        let dw = (j[0][0] * f2 - f1 * j[1][0]) / det;
        // damp the step rather than leave the admissible half-plane
        let mut scale = 1.0;
        while r - scale * dr <= 0.0 && scale > 1e-6 {
            scale *= 0.5;
        }
        if r - scale * dr <= 0.0 {
            return Err(Error::Precondition("Newton left the r > 0 half-plane"));
        }
        r -= scale * dr;
        w -= scale * dw;
        let _ = iter;
    }
    Err(Error::NewtonStagnation { iterations: 50, residual })
}

fn averaged_jacobian(avg: &AveragedSystem<'_>, r: f64, w: f64) -> Result<[[f64; 2]; 2]> {
    let h = 1e-3 * (1.0 + r.abs().max(w.abs()));
    let d5 = |f: &dyn Fn(f64, f64) -> Result<f64>, dr: f64, dw: f64| -> Result<f64> {
        let m2 = f(r - 2.0 * h * dr, w - 2.0 * h * dw)?;
        let m1 = f(r - h * dr, w - h * dw)?;
        let p1 = f(r + h * dr, w + h * dw)?;
        let p2 = f(r + 2.0 * h * dr, w + 2.0 * h * dw)?;
        Ok((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h))
    };
    let f1 = |r: f64, w: f64| avg.r1(r, w);
    let f2 = |r: f64, w: f64| avg.r2(r, w);
    Ok([
        [d5(&f1, 1.0, 0.0)?, d5(&f1, 0.0, 1.0)?],
        [d5(&f2, 1.0, 0.0)?, d5(&f2, 0.0, 1.0)?],
    ])
}

/// Closed-form averaged system for the builtin model under the quadratic
/// unfolding γ(ε) = γ₀ + γ₁ ε² with p and c frozen, in canonical quantities.
///
/// With a = 3u₀ − 1.1 and w₀ = u₀/γ₀:
///
/// ```text
/// R₁(r, w) = −(2π c₀ a γ₀ / μ₀²) · w · r
/// R₂(r, w) = (c₀ a / (γ₀ μ₀²)) (π r² + 2π γ₀² w²) + 2π K₃,
///            K₃ = −δ γ₁ w₀ / (c₀ γ₀ μ₀²)
/// ```
///
/// whose unique zero with r > 0 is (r*, 0), r*² = 2 γ₁ u₀ / (a γ₀²), with
/// averaged Jacobian determinant 4π² c₀² a² r*² / μ₀⁴. Real r* requires
/// γ₁ a > 0, equivalently γ₁ (11 − 30 u₀) < 0.
#[derive(Debug, Clone, Copy)]
pub struct FhnClosedForm {
    pub gamma0: f64,
    /// Coefficient of ε² in γ(ε).
    pub gamma1: f64,
    pub u0: f64,
    pub w0: f64,
    /// Canonical wave speed.
    pub c0: f64,
    /// Canonical frequency.
    pub mu0: f64,
    pub a: f64,
    pub k3: f64,
    pub r_star: f64,
    pub w_star: f64,
    pub det: f64,
}

impl FhnClosedForm {
    pub fn r1(&self, r: f64, w: f64) -> f64 {
        let pi = core::f64::consts::PI;
        -(2.0 * pi * self.c0 * self.a * self.gamma0 / (self.mu0 * self.mu0)) * w * r
    }

    pub fn r2(&self, r: f64, w: f64) -> f64 {
        let pi = core::f64::consts::PI;
        let g = self.gamma0;
        (self.c0 * self.a / (g * self.mu0 * self.mu0)) * (pi * r * r + 2.0 * pi * g * g * w * w)
            + 2.0 * pi * self.k3
    }
}

/// Evaluate the closed forms at a classified point of the builtin model.
///
/// Named precondition failures: `gamma1 must be nonzero`; `unfolding sign`
/// (γ₁(3u₀ − 1.1) must be positive for a real zero — at the double point
/// u₀ = 11/30 the coefficient a vanishes and no sign works).
pub fn fhn_averaged_closed_form(fh: &FoldHopfPoint, gamma1: f64) -> Result<FhnClosedForm> {
    let gamma0 = fh.alpha0[crate::model::FHN_GAMMA];
    let u0 = fh.eq.point.u;
    let w0 = fh.eq.point.w;
    let a = 3.0 * u0 - 1.1;
    if gamma1 == 0.0 {
        return Err(Error::Precondition("gamma1 must be nonzero"));
    }
    if a.abs() <= 1e-12 {
        return Err(Error::Precondition(
            "unfolding sign: the quadratic coefficient 3 u0 - 1.1 vanishes at the double point",
        ));
    }
    if gamma1 * a <= 0.0 {
        return Err(Error::Precondition(
            "unfolding sign: gamma1 * (3 u0 - 1.1) must be positive for a real averaged zero",
        ));
    }
    let c0 = fh.c0;
    let mu0 = fh.mu0;
    let mu2 = mu0 * mu0;
    let delta = crate::model::FHN_DELTA;
    let k3 = -delta * gamma1 * w0 / (c0 * gamma0 * mu2);
    let r_star2 = 2.0 * gamma1 * u0 / (a * gamma0 * gamma0);
    let r_star = r_star2.sqrt();
    let pi = core::f64::consts::PI;
    let det = 4.0 * pi * pi * c0 * c0 * a * a * r_star2 / (mu2 * mu2);
    Ok(FhnClosedForm { gamma0, gamma1, u0, w0, c0, mu0, a, k3, r_star, w_star: 0.0, det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::fhn_classified_points;
    use crate::linalg::matmul3;
    use crate::model::{builtin_fhn, canonical_rescale, CanonicalModel, FhnModel};
    use crate::rat::{Exactness, Rat};
    #[allow(unused_imports)]
    use alloc::vec;

    fn classified(gamma_num: i64, gamma_den: i64) -> Vec<FoldHopfPoint> {
        fhn_classified_points(Exactness::Rational(Rat::new(gamma_num, gamma_den).unwrap())).unwrap()
    }

    /// Pick the branch whose averaged zero is real for the given γ₁.
    fn branch_for(points: &[FoldHopfPoint], gamma1: f64) -> FoldHopfPoint {
        points
            .iter()
            .find(|fh| gamma1 * (3.0 * fh.eq.point.u - 1.1) > 0.0)
            .expect("no branch admits the unfolding sign")
            .clone()
    }

    #[test]
    fn quadrature_exact_on_cos_squared() {
        let v = periodic_trapezoid(|t| t.cos() * t.cos(), 64);
        assert!((v - core::f64::consts::PI).abs() < 1e-14);
    }

    struct LinearModel;
    impl Model for LinearModel {
        fn f(&self, u: f64, w: f64, _a: &[f64]) -> f64 {
            1.0 * u - 0.5 * w
        }
        fn g(&self, u: f64, w: f64, _a: &[f64]) -> f64 {
            0.5 * u - 0.25 * w
        }
        fn f_u(&self, _: f64, _: f64, _: &[f64]) -> f64 {
            1.0
        }
        fn f_w(&self, _: f64, _: f64, _: &[f64]) -> f64 {
            -0.5
        }
        fn g_u(&self, _: f64, _: f64, _: &[f64]) -> f64 {
            0.5
        }
        fn g_w(&self, _: f64, _: f64, _: &[f64]) -> f64 {
            -0.25
        }
        fn diff_coeff(&self) -> f64 {
            1.0
        }
        fn param_dim(&self) -> usize {
            0
        }
        fn param_names(&self) -> &'static [&'static str] {
            &[]
        }
    }

    /// Same linear part with quadratic terms u² in f and w² in g.
    struct QuadModel;
    impl Model for QuadModel {
        fn f(&self, u: f64, w: f64, _a: &[f64]) -> f64 {
            1.0 * u - 0.5 * w + u * u
        }
        fn g(&self, u: f64, w: f64, _a: &[f64]) -> f64 {
            0.5 * u - 0.25 * w + w * w
        }
        fn f_u(&self, u: f64, _: f64, _: &[f64]) -> f64 {
            1.0 + 2.0 * u
        }
        fn f_w(&self, _: f64, _: f64, _: &[f64]) -> f64 {
            -0.5
        }
        fn g_u(&self, _: f64, _: f64, _: &[f64]) -> f64 {
            0.5
        }
        fn g_w(&self, _: f64, w: f64, _: &[f64]) -> f64 {
            -0.25 + 2.0 * w
        }
        fn diff_coeff(&self) -> f64 {
            1.0
        }
        fn param_dim(&self) -> usize {
            0
        }
        fn param_names(&self) -> &'static [&'static str] {
            &[]
        }
    }

    fn toy_fold_hopf(model: &dyn Model) -> FoldHopfPoint {
        // fold-Hopf at the origin with c0 = 0.5: trace and det conditions hold
        use crate::equilibria::{classify_fold_hopf, eigenvalues_3x3, Classification, Equilibrium};
        use crate::model::tw_jacobian;
        let params = WaveParameters::new(vec![], 0.5).unwrap();
        let point = State3::new(0.0, 0.0, 0.0);
        let j = tw_jacobian(model, &params, point).unwrap();
        let eq = Equilibrium { point, residual: 0.0, eigenvalues: eigenvalues_3x3(&j) };
        match classify_fold_hopf(model, &eq, &params).unwrap() {
            Classification::FoldHopf(fh) => fh,
            other => panic!("toy model must classify, got {other:?}"),
        }
    }

    #[test]
    fn linear_model_has_zero_x1() {
        let m = LinearModel;
        let fh = toy_fold_hopf(&m);
        let path = UnfoldingPath::default();
        let exp = expand_vector_field(&m, &fh, &path).unwrap();
        for y in [[0.2, -0.4, 0.3], [1.0, 0.0, -1.0]] {
            let x1 = exp.x1(y).unwrap();
            for v in x1 {
                assert!(v.abs() < 1e-9, "X1 = {x1:?}");
            }
        }
        let avg = averaged_functions(exp, 64).unwrap();
        assert!(avg.solvability_residual < 1e-9);
        let (r1, r2) = avg.pair(0.7, 0.2).unwrap();
        assert!(r1.abs() < 1e-8 && r2.abs() < 1e-8);
    }

    #[test]
    fn quadratic_model_matches_hand_expansion() {
        // X1(y) = Q^{-1} (0, -(Qy)_u^2, (Qy)_w^2 / c0): direct assembly vs extraction
        let m = QuadModel;
        let fh = toy_fold_hopf(&m);
        let path = UnfoldingPath::default();
        let exp = expand_vector_field(&m, &fh, &path).unwrap();
        let q = fh.q;
        let qi = inv3(&q, 1e-12).unwrap();
        for y in [[0.3, 0.1, -0.2], [0.8, -0.5, 0.4]] {
            let qy = matvec3(&q, y);
            let hand = matvec3(&qi, [0.0, -qy[0] * qy[0], qy[2] * qy[2] / fh.c0]);
            let x1 = exp.x1(y).unwrap();
            for i in 0..3 {
                assert!((x1[i] - hand[i]).abs() < 1e-8, "{x1:?} vs {hand:?}");
            }
        }
    }

    #[test]
    fn transform_agrees_with_explicit_eigenbasis_up_to_block_form() {
        // the alternative transform with columns (−g_w/c₀, −μ₀², g_u/c₀),
        // (μ₀, c₀μ₀, 0), (g_w, 0, −g_u) conjugates to the same block
        use crate::model::tw_jacobian;
        let pts = classified(4, 1);
        for fh in &pts {
            let [_, _, gu, gw] = fh.partials;
            let (c0, mu0) = (fh.c0, fh.mu0);
            let qp: M3 = [
                [-gw / c0, mu0, gw],
                [-mu0 * mu0, c0 * mu0, 0.0],
                [gu / c0, 0.0, -gu],
            ];
            let m = builtin_fhn();
            let params = WaveParameters::new(fh.alpha0.clone(), fh.c0_original).unwrap();
            let (cm, cp, _) = canonical_rescale(&m, &params).unwrap();
            let j = tw_jacobian(&cm, &cp, fh.eq.point).unwrap();
            for q in [&fh.q, &qp] {
                let qi = inv3(q, 1e-14).unwrap();
                let b = matmul3(&qi, &matmul3(&j, q));
                let want = [[0.0, mu0, 0.0], [-mu0, 0.0, 0.0], [0.0, 0.0, 0.0]];
                for i in 0..3 {
                    for k in 0..3 {
                        assert!((b[i][k] - want[i][k]).abs() < 1e-8);
                    }
                }
            }
        }
    }

    fn fhn_canonical() -> CanonicalModel<'static> {
        static MODEL: FhnModel = FhnModel;
        let params = WaveParameters::new(vec![4.0, 0.0], 1.0).unwrap();
        let (cm, _, _) = canonical_rescale(&MODEL, &params).unwrap();
        cm
    }

    #[test]
    fn linear_path_violates_solvability() {
        let pts = classified(4, 1);
        let fh = branch_for(&pts, 1.0);
        let cm = fhn_canonical();
        let path = UnfoldingPath { alpha1: vec![1.0, 0.0], alpha2: vec![], c1: 0.0, c2: 0.0 };
        let exp = expand_vector_field(&cm, &fh, &path).unwrap();
        let x0 = exp.x0([0.0, 0.0, 0.0]).unwrap();
        let resid = x0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(resid > 1e-4, "expected a genuine constant drift, got {resid:e}");
        assert!(matches!(
            averaged_functions(exp, 64),
            Err(Error::SolvabilityResidual { .. })
        ));
    }

    #[test]
    fn quadratic_path_oracle_equivalence_on_grid() {
        let pts = classified(4, 1);
        let fh = branch_for(&pts, 1.0);
        let cm = fhn_canonical();
        let path = UnfoldingPath::quadratic(vec![1.0, 0.0]);
        let exp = expand_vector_field(&cm, &fh, &path).unwrap();
        let avg = averaged_functions(exp, 256).unwrap();
        assert!(avg.solvability_residual <= SOLVABILITY_TOL);
        let cf = fhn_averaged_closed_form(&fh, 1.0).unwrap();
        let wscale = cf.r_star;
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            let r = 2.0 * (i as f64 + 0.5) / 20.0;
            for j in 0..20 {
                let w = -wscale + 2.0 * wscale * (j as f64 + 0.5) / 20.0;
                let (r1, r2) = avg.pair(r, w).unwrap();
                worst = worst.max((r1 - cf.r1(r, w)).abs()).max((r2 - cf.r2(r, w)).abs());
            }
        }
        assert!(worst < 1e-7, "worst grid deviation {worst:e}");
    }

    #[test]
    fn averaged_zero_matches_closed_forms() {
        for (num, den) in [(7i64, 2i64), (4, 1), (9, 2)] {
            for gamma1 in [1.0, -1.0] {
                let pts = classified(num, den);
                let fh = branch_for(&pts, gamma1);
                let cf = fhn_averaged_closed_form(&fh, gamma1).unwrap();
                let cm = fhn_canonical();
                let path = UnfoldingPath::quadratic(vec![gamma1, 0.0]);
                let exp = expand_vector_field(&cm, &fh, &path).unwrap();
                let avg = averaged_functions(exp, 256).unwrap();
                let z = find_averaged_zero(&avg, (cf.r_star * 1.15, 0.002)).unwrap();
                assert!(
                    (z.r - cf.r_star).abs() / cf.r_star < 1e-7,
                    "gamma={num}/{den} g1={gamma1}: r* {} vs {}",
                    z.r,
                    cf.r_star
                );
                assert!(z.w.abs() < 1e-7, "w* = {}", z.w);
                assert!(
                    (z.det - cf.det).abs() / cf.det.abs() < 1e-6,
                    "det {} vs {}",
                    z.det,
                    cf.det
                );
            }
        }
    }

    #[test]
    fn r1_vanishes_at_r_zero() {
        let pts = classified(4, 1);
        let fh = branch_for(&pts, 1.0);
        let cm = fhn_canonical();
        let path = UnfoldingPath::quadratic(vec![1.0, 0.0]);
        let exp = expand_vector_field(&cm, &fh, &path).unwrap();
        let avg = averaged_functions(exp, 128).unwrap();
        for w in [-0.5, 0.0, 0.7] {
            assert!(avg.r1(0.0, w).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn quadrature_doubling_stable() {
        let pts = classified(4, 1);
        let fh = branch_for(&pts, 1.0);
        let cm = fhn_canonical();
        let path = UnfoldingPath::quadratic(vec![1.0, 0.0]);
        let exp = expand_vector_field(&cm, &fh, &path).unwrap();
        let avg = averaged_functions(exp, 256).unwrap();
        let delta = avg.quadrature_self_check(0.4, 0.1).unwrap();
        assert!(delta < 1e-10);
    }

    #[test]
    fn closed_form_preconditions() {
        let pts = classified(4, 1);
        // wrong sign rejected with the named condition
        let lower = pts.iter().find(|f| f.eq.point.u < 0.3).unwrap();
        match fhn_averaged_closed_form(lower, 1.0) {
            Err(Error::Precondition(name)) => assert!(name.contains("unfolding sign")),
            other => panic!("expected precondition failure, got {other:?}"),
        }
        match fhn_averaged_closed_form(lower, 0.0) {
            Err(Error::Precondition(name)) => assert!(name.contains("nonzero")),
            other => panic!("expected precondition failure, got {other:?}"),
        }
        // at the double point u0 = 11/30 the quadratic coefficient vanishes:
        // no unfolding sign admits a real zero
        let boundary = fhn_classified_points(Exactness::Rational(Rat::new(300, 91).unwrap())).unwrap();
        for g1 in [1.0, -1.0] {
            assert!(fhn_averaged_closed_form(&boundary[0], g1).is_err());
        }
    }

    #[test]
    fn g1_structure_of_extracted_terms() {
        // the extracted X1 contains the quadratic a(u + γ0 w)² pattern through
        // the column of Q^{-1} that multiplies the v-row; verified against the
        // direct assembly at sample points
        let pts = classified(4, 1);
        let fh = branch_for(&pts, 1.0);
        let cm = fhn_canonical();
        let path = UnfoldingPath::quadratic(vec![1.0, 0.0]);
        let exp = expand_vector_field(&cm, &fh, &path).unwrap();
        let q = fh.q;
        let qi = inv3(&q, 1e-12).unwrap();
        let u0 = fh.eq.point.u;
        let a = 3.0 * u0 - 1.1;
        let gamma0 = fh.alpha0[0];
        let delta = crate::model::FHN_DELTA;
        let w0 = fh.eq.point.w;
        for y in [[0.4, 0.2, -0.3], [1.0, -0.6, 0.5]] {
            let qy = matvec3(&q, y);
            // quadratic source: v-row gets +a x1^2 + x1^3 from −(h(u)−h(u0))
            // truncation at first order keeps a x1^2 only; the γ1-drift source
            // is the constant −δ γ1 w0 / c0 in the w-row
            let quad = matvec3(&qi, [0.0, a * qy[0] * qy[0], 0.0]);
            let konst = matvec3(&qi, [0.0, 0.0, -delta * 1.0 * w0 / fh.c0]);
            let hand = [quad[0] + konst[0], quad[1] + konst[1], quad[2] + konst[2]];
            let x1 = exp.x1(y).unwrap();
            for i in 0..3 {
                assert!((x1[i] - hand[i]).abs() < 1e-7, "{x1:?} vs {hand:?}");
            }
            // and the u-component of Qy is u + γ0 w in original coordinates:
            // the pattern (y_r cosθ + γ0-weighted kernel) enters through qy[0]
            assert!((qy[0] - (y[0] + gamma0 * y[2])).abs() < 1e-13);
        }
    }
}
