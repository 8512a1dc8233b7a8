//! Explicit relative-bound constants and numerical verification of the
//! operator inequalities on trigonometric test suites.
//!
//! On the unit periodic interval the rescaled linearization splits as
//! `F(ε) = F₀ + F₁(ε)`: F₀ has the constant point coefficients, F₁ carries
//! the ξ-dependent differences
//!
//! ```text
//! β_u = T² f_u(φ,ψ,α) − A² f_u(P₀,α₀)   (and β_w, γ_u, γ_w alike)
//! ```
//!
//! plus the drift (c₀A − cT)∂_ξ, with T the orbit period and A = 2π/μ₀. The
//! bound `|F₁(u,w)|₂ ≤ a|(u,w)|₂ + b|(F₀−λ)(u,w)|₂` holds with
//!
//! ```text
//! κ₁ = 3·max{|c₀A − cT|, |β_u|_∞ + |γ_w|_∞, |β_w|_∞ + |γ_u|_∞}
//! κ₂(λ) = max{A²(|f_u| + |g_w|), A²(|f_w| + |g_u|)} + |λ|/2
//! a = κ₁·(1 + (2κ₂ + 2n(n+1))/(n − 1 − |c₀A|) + 2κ₂/|c₀A|)
//! b = κ₁·(1/(n − 1 − |c₀A|) + 1/|c₀A|)
//! ```
//!
//! for any integer n > 1 + |c₀A|, via the interpolation inequality
//! `|u_ξ|₂ ≤ |u_ξξ|₂/(n−1) + 2n(n+1)|u|₂/(n−1)`.
//!
//! Test functions are trigonometric polynomials: differentiation is exact
//! term-wise, variable-coefficient products are applied pointwise on a 4x
//! oversampled grid, and L²-norms are discrete Parseval sums, so the checks
//! carry no differentiation error. The norm of a pair is |u|₂ + |w|₂.

use crate::equilibria::FoldHopfPoint;
use crate::model::Model;
use crate::orbits::PeriodicOrbit;
use crate::rng::CounterRng;
use crate::{Error, Result};
#[allow(unused_imports)]
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Complex trigonometric polynomial Σ c_k e^{2πikξ} on [0, 1), modes −K..K.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    /// coeffs[k + degree] is the mode-k coefficient.
    pub coeffs: Vec<C64>,
    pub degree: usize,
}

impl TrigPoly {
    pub fn random(degree: usize, rng: &mut CounterRng) -> Self {
        let mut coeffs = Vec::with_capacity(2 * degree + 1);
        for _ in 0..2 * degree + 1 {
            coeffs.push(C64::new(rng.normal(), rng.normal()));
        }
        TrigPoly { coeffs, degree }
    }

    pub fn zero(degree: usize) -> Self {
        TrigPoly { coeffs: vec![C64::new(0.0, 0.0); 2 * degree + 1], degree }
    }

    pub fn constant(c: C64, degree: usize) -> Self {
        let mut p = Self::zero(degree);
        p.coeffs[degree] = c;
        p
    }

    pub fn single_mode(k: i64, degree: usize) -> Self {
        let mut p = Self::zero(degree);
        p.coeffs[(k + degree as i64) as usize] = C64::new(1.0, 0.0);
        p
    }

    /// Exact term-wise derivative: mode k picks up 2πik.
    pub fn deriv(&self) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let k = i as f64 - self.degree as f64;
            *c *= C64::new(0.0, 2.0 * core::f64::consts::PI * k);
        }
        out
    }

    /// Values on the uniform m-point grid ξ_j = j/m.
    pub fn eval_grid(&self, m: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let k = i as f64 - self.degree as f64;
            for (j, o) in out.iter_mut().enumerate() {
                let ph = 2.0 * core::f64::consts::PI * k * j as f64 / m as f64;
                *o += c * C64::new(ph.cos(), ph.sin());
            }
        }
        out
    }

    /// Exact L² norm by Parseval.
    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Discrete Parseval sum norm of grid values: sqrt((1/m) Σ |f_j|²).
pub fn grid_norm(vals: &[C64]) -> f64 {
    (vals.iter().map(|v| v.norm_sqr()).sum::<f64>() / vals.len() as f64).sqrt()
}

/// Sup-norms of the four coefficient differences and the drift coefficient.
#[derive(Debug, Clone, Copy, Default)]
pub struct SupNorms {
    pub beta_u: f64,
    pub beta_w: f64,
    pub gamma_u: f64,
    pub gamma_w: f64,
    /// |c₀A − cT|.
    pub speed: f64,
}

impl SupNorms {
    pub fn max_all(&self) -> f64 {
        self.speed
            .max(self.beta_u + self.gamma_w)
            .max(self.beta_w + self.gamma_u)
    }
}

fn coeff_difference(model: &dyn Model, orbit: &PeriodicOrbit, fh: &FoldHopfPoint, xi_unit: f64) -> [f64; 4] {
    let t = orbit.period;
    let a = fh.reference_period();
    let s = orbit.interp(xi_unit * t);
    let al = &orbit.params.alpha;
    let p0 = fh.eq.point;
    let a0 = &fh.alpha0;
    [
        t * t * model.f_u(s[0], s[2], al) - a * a * model.f_u(p0.u, p0.w, a0),
        t * t * model.f_w(s[0], s[2], al) - a * a * model.f_w(p0.u, p0.w, a0),
        t * t * model.g_u(s[0], s[2], al) - a * a * model.g_u(p0.u, p0.w, a0),
        t * t * model.g_w(s[0], s[2], al) - a * a * model.g_w(p0.u, p0.w, a0),
    ]
}

/// Sup over a 2048-point grid of each coefficient difference, sharpened by
/// golden-section maximization around the grid argmax, plus |c₀A − cT|.
pub fn coefficient_sup_norms(model: &dyn Model, orbit: &PeriodicOrbit, fh: &FoldHopfPoint) -> SupNorms {
    coefficient_sup_norms_with(model, orbit, fh, 2048)
}

/// Same with an explicit scan grid size (refinement convergence checks).
pub fn coefficient_sup_norms_with(
    model: &dyn Model,
    orbit: &PeriodicOrbit,
    fh: &FoldHopfPoint,
    n: usize,
) -> SupNorms {
    let mut sup = [0.0f64; 4];
    let mut arg = [0.0f64; 4];
    for j in 0..n {
        let x = j as f64 / n as f64;
        let d = coeff_difference(model, orbit, fh, x);
        for i in 0..4 {
            if d[i].abs() > sup[i] {
                sup[i] = d[i].abs();
                arg[i] = x;
            }
        }
    }
    // local refinement on the densest interpolant
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    for i in 0..4 {
        let mut lo = arg[i] - 1.0 / n as f64;
        let mut hi = arg[i] + 1.0 / n as f64;
        let f = |x: f64| coeff_difference(model, orbit, fh, x - x.floor())[i].abs();
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = f(x1);
        let mut f2 = f(x2);
        for _ in 0..40 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = f(x1);
            }
        }
        sup[i] = sup[i].max(f1.max(f2));
    }
    let a = fh.reference_period();
    SupNorms {
        beta_u: sup[0],
        beta_w: sup[1],
        gamma_u: sup[2],
        gamma_w: sup[3],
        speed: (fh.c0 * a - orbit.params.c * orbit.period).abs(),
    }
}

/// The constants (κ₁, κ₂, a, b) for a given λ and admissible integer n.
pub fn relative_bound_constants(
    sup: &SupNorms,
    fh: &FoldHopfPoint,
    lambda: C64,
    n: u32,
) -> Result<(f64, f64, f64, f64)> {
    let a_ref = fh.reference_period();
    let ca = (fh.c0 * a_ref).abs();
    if (n as f64) <= 1.0 + ca {
        return Err(Error::BadParameter("n must exceed 1 + |c0 A|"));
    }
    let kappa1 = 3.0 * sup.max_all();
    let [fu, fw, gu, gw] = fh.partials;
    let a2 = a_ref * a_ref;
    let kappa2 = (a2 * (fu.abs() + gw.abs())).max(a2 * (fw.abs() + gu.abs())) + 0.5 * lambda.norm();
    let nf = n as f64;
    let denom = nf - 1.0 - ca;
    let a_eps = kappa1 * (1.0 + (2.0 * kappa2 + 2.0 * nf * (nf + 1.0)) / denom + 2.0 * kappa2 / ca);
    let b_eps = kappa1 * (1.0 / denom + 1.0 / ca);
    Ok((kappa1, kappa2, a_eps, b_eps))
}

/// Smallest admissible n, i.e. the least integer exceeding 1 + |c₀A|.
pub fn minimal_n(fh: &FoldHopfPoint) -> u32 {
    let ca = (fh.c0 * fh.reference_period()).abs();
    let mut n = (1.0 + ca).floor() as u32 + 1;
    if n as f64 <= 1.0 + ca {
        n += 1;
    }
    n
}

/// Exhaustive scan of b(ε) over admissible integers in
/// (1 + |c₀A|, 1 + |c₀A| + 100], returning the minimizing n and its b.
pub fn optimal_n_for_b(sup: &SupNorms, fh: &FoldHopfPoint, lambda: C64) -> Result<(u32, f64)> {
    let n0 = minimal_n(fh);
    let mut best = (n0, f64::INFINITY);
    for n in n0..=n0 + 100 {
        let (_, _, _, b) = relative_bound_constants(sup, fh, lambda, n)?;
        if b < best.1 {
            best = (n, b);
        }
    }
    Ok(best)
}

/// Everything measured by one relative-bound verification run.
#[derive(Debug, Clone)]
pub struct RelativeBoundReport {
    pub epsilon: f64,
    pub n: u32,
    pub kappa1: f64,
    pub kappa2_at_lambda: f64,
    pub a_eps: f64,
    pub b_eps: f64,
    /// Most positive value of |F₁(u,w)|₂ − a|(u,w)|₂ − b|(F₀−λ)(u,w)|₂.
    pub max_violation: f64,
    pub sup_norms: SupNorms,
}

/// Apply F₁ and F₀ − λ to a random test suite and record the worst margin of
/// the relative-bound inequality. A positive `max_violation` would falsify
/// the implementation, not the bound, so it is reported rather than raised.
pub fn verify_relative_bound(
    model: &dyn Model,
    orbit: &PeriodicOrbit,
    fh: &FoldHopfPoint,
    lambda: C64,
    n: u32,
    suite_size: usize,
    seed: u64,
) -> Result<RelativeBoundReport> {
    if suite_size == 0 {
        return Err(Error::BadParameter("suite_size must be at least 1"));
    }
    let sup = coefficient_sup_norms(model, orbit, fh);
    let (kappa1, kappa2, a_eps, b_eps) = relative_bound_constants(&sup, fh, lambda, n)?;

    let degree = 32;
    let m = 4 * (2 * degree + 1);
    // coefficient samples on the unit grid
    let mut beta = [vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]];
    for j in 0..m {
        let d = coeff_difference(model, orbit, fh, j as f64 / m as f64);
        for i in 0..4 {
            beta[i][j] = d[i];
        }
    }
    let drift = fh.c0 * fh.reference_period() - orbit.params.c * orbit.period;
    let a_ref = fh.reference_period();
    let a2 = a_ref * a_ref;
    let [fu0, fw0, gu0, gw0] = fh.partials;
    let c0a = fh.c0 * a_ref;

    let mut rng = CounterRng::new(seed, 101);
    let mut max_violation = f64::NEG_INFINITY;
    for _ in 0..suite_size {
        let u = TrigPoly::random(degree, &mut rng);
        let w = TrigPoly::random(degree, &mut rng);
        let v = violation_for(&u, &w, &beta, drift, a2, [fu0, fw0, gu0, gw0], c0a, lambda, a_eps, b_eps, m);
        max_violation = max_violation.max(v);
    }
    Ok(RelativeBoundReport {
        epsilon: orbit.epsilon,
        n,
        kappa1,
        kappa2_at_lambda: kappa2,
        a_eps,
        b_eps,
        max_violation,
        sup_norms: sup,
    })
}

/// Violation of the inequality for one explicit test pair (exposed for the
/// constant-function example).
#[allow(clippy::too_many_arguments)]
pub fn relative_bound_violation(
    model: &dyn Model,
    orbit: &PeriodicOrbit,
    fh: &FoldHopfPoint,
    lambda: C64,
    n: u32,
    u: &TrigPoly,
    w: &TrigPoly,
) -> Result<f64> {
    let sup = coefficient_sup_norms(model, orbit, fh);
    let (_, _, a_eps, b_eps) = relative_bound_constants(&sup, fh, lambda, n)?;
    let degree = u.degree.max(w.degree);
    let m = 4 * (2 * degree + 1);
    let mut beta = [vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]];
    for j in 0..m {
        let d = coeff_difference(model, orbit, fh, j as f64 / m as f64);
        for i in 0..4 {
            beta[i][j] = d[i];
        }
    }
    let drift = fh.c0 * fh.reference_period() - orbit.params.c * orbit.period;
    let a_ref = fh.reference_period();
    Ok(violation_for(
        u,
        w,
        &beta,
        drift,
        a_ref * a_ref,
        fh.partials,
        fh.c0 * a_ref,
        lambda,
        a_eps,
        b_eps,
        m,
    ))
}

#[allow(clippy::too_many_arguments)]
fn violation_for(
    u: &TrigPoly,
    w: &TrigPoly,
    beta: &[Vec<f64>; 4],
    drift: f64,
    a2: f64,
    p0: [f64; 4],
    c0a: f64,
    lambda: C64,
    a_eps: f64,
    b_eps: f64,
    m: usize,
) -> f64 {
    let [fu0, fw0, gu0, gw0] = p0;
    let ug = u.eval_grid(m);
    let wg = w.eval_grid(m);
    let uxg = u.deriv().eval_grid(m);
    let wxg = w.deriv().eval_grid(m);
    let uxxg = u.deriv().deriv().eval_grid(m);

    let mut f1_u = vec![C64::new(0.0, 0.0); m];
    let mut f1_w = vec![C64::new(0.0, 0.0); m];
    let mut f0_u = vec![C64::new(0.0, 0.0); m];
    let mut f0_w = vec![C64::new(0.0, 0.0); m];
    for j in 0..m {
        f1_u[j] = uxg[j] * drift + ug[j] * beta[0][j] + wg[j] * beta[1][j];
        f1_w[j] = wxg[j] * drift + ug[j] * beta[2][j] + wg[j] * beta[3][j];
        f0_u[j] = uxxg[j] - uxg[j] * c0a + ug[j] * (a2 * fu0) + wg[j] * (a2 * fw0) - lambda * ug[j];
        f0_w[j] = -wxg[j] * c0a + ug[j] * (a2 * gu0) + wg[j] * (a2 * gw0) - lambda * wg[j];
    }
    let lhs = grid_norm(&f1_u) + grid_norm(&f1_w);
    let norm_pair = grid_norm(&ug) + grid_norm(&wg);
    let norm_f0 = grid_norm(&f0_u) + grid_norm(&f0_w);
    lhs - a_eps * norm_pair - b_eps * norm_f0
}

/// Worst violation of `|u_ξ|₂ ≤ |u_ξξ|₂/(n−1) + 2n(n+1)|u|₂/(n−1)` over a
/// random suite of trigonometric polynomials of degree ≤ 64, with exact
/// spectral norms.
pub fn verify_kato_inequality(n: u32, suite_size: usize, seed: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::BadParameter("n must be at least 2"));
    }
    let nf = n as f64;
    let mut rng = CounterRng::new(seed, 202);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..suite_size.max(1) {
        let u = TrigPoly::random(64, &mut rng);
        let ux = u.deriv();
        let uxx = ux.deriv();
        let v = ux.norm_l2() - uxx.norm_l2() / (nf - 1.0) - 2.0 * nf * (nf + 1.0) / (nf - 1.0) * u.norm_l2();
        worst = worst.max(v);
    }
    Ok(worst)
}

/// The same inequality for a single pure mode e^{2πikξ}, in closed form:
/// 2πk ≤ (2πk)²/(n−1) + 2n(n+1)/(n−1).
pub fn kato_single_mode_violation(k: i64, n: u32) -> f64 {
    let nf = n as f64;
    let om = 2.0 * core::f64::consts::PI * k.unsigned_abs() as f64;
    om - om * om / (nf - 1.0) - 2.0 * nf * (nf + 1.0) / (nf - 1.0)
}
