//! Model interface for the coupled reaction-diffusion/ODE pair and its
//! three-dimensional traveling-wave system, plus the builtin FitzHugh-Nagumo
//! instance with an applied current.

use crate::{Error, Result};
use alloc::boxed::Box;
#[allow(unused_imports)]
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// A coupled system `u_t = d u_xx + f(u,w,α)`, `w_t = g(u,w,α)`.
///
/// First partials are required (analysis and spectra consume them); second
/// partials default to central finite differences of the first partials and
/// are only consulted by derivative-consistency diagnostics, so the default
/// is adequate unless a model overrides them with closed forms.
pub trait Model: Send + Sync {
    fn f(&self, u: f64, w: f64, alpha: &[f64]) -> f64;
    fn g(&self, u: f64, w: f64, alpha: &[f64]) -> f64;

    fn f_u(&self, u: f64, w: f64, alpha: &[f64]) -> f64;
    fn f_w(&self, u: f64, w: f64, alpha: &[f64]) -> f64;
    fn g_u(&self, u: f64, w: f64, alpha: &[f64]) -> f64;
    fn g_w(&self, u: f64, w: f64, alpha: &[f64]) -> f64;

    /// Diffusion constant of the `u` equation; must be positive.
    fn diff_coeff(&self) -> f64;

    /// Length of the parameter vector.
    fn param_dim(&self) -> usize;

    /// Names for the parameter slots, index-aligned with `alpha`.
    fn param_names(&self) -> &'static [&'static str];

    /// Whether second partials below are closed-form (vs. finite differences).
    fn has_analytic_second_partials(&self) -> bool {
        false
    }

    fn f_uu(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        let h = fd_step(u);
        (self.f_u(u + h, w, alpha) - self.f_u(u - h, w, alpha)) / (2.0 * h)
    }
    fn f_uw(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        let h = fd_step(w);
        (self.f_u(u, w + h, alpha) - self.f_u(u, w - h, alpha)) / (2.0 * h)
    }
    fn f_ww(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        let h = fd_step(w);
        (self.f_w(u, w + h, alpha) - self.f_w(u, w - h, alpha)) / (2.0 * h)
    }
    fn g_uu(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        let h = fd_step(u);
        (self.g_u(u + h, w, alpha) - self.g_u(u - h, w, alpha)) / (2.0 * h)
    }
    fn g_uw(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        let h = fd_step(w);
        (self.g_u(u, w + h, alpha) - self.g_u(u, w - h, alpha)) / (2.0 * h)
    }
    fn g_ww(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        let h = fd_step(w);
        (self.g_w(u, w + h, alpha) - self.g_w(u, w - h, alpha)) / (2.0 * h)
    }
}

fn fd_step(x: f64) -> f64 {
    1e-6 * (1.0 + x.abs())
}

/// Wave parameters: a parameter vector α and a nonzero wave speed c.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveParameters {
    pub alpha: Vec<f64>,
    pub c: f64,
}

impl WaveParameters {
    pub fn new(alpha: Vec<f64>, c: f64) -> Result<Self> {
        if c == 0.0 {
            return Err(Error::ZeroWaveSpeed);
        }
        Ok(WaveParameters { alpha, c })
    }
}

/// A point of the 3D traveling-wave phase space; `v` is the spatial
/// derivative `u_ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State3 {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl State3 {
    pub fn new(u: f64, v: f64, w: f64) -> Self {
        State3 { u, v, w }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        State3 { u: a[0], v: a[1], w: a[2] }
    }
}

/// Right-hand side of the traveling-wave system
/// `(u', v', w') = (v, (c v − f)/d, g/c)` at the given state.
///
/// For the canonical d = 1 form this is `(v, c v − f, g/c)`; the general-d
/// form is only exercised when classifying equilibria of a model as given,
/// before rescaling.
pub fn tw_vector_field(model: &dyn Model, params: &WaveParameters, s: State3) -> Result<State3> {
    if params.c == 0.0 {
        return Err(Error::ZeroWaveSpeed);
    }
    let d = model.diff_coeff();
    let f = model.f(s.u, s.w, &params.alpha);
    let g = model.g(s.u, s.w, &params.alpha);
    Ok(State3::new(s.v, (params.c * s.v - f) / d, g / params.c))
}

/// Jacobian of [`tw_vector_field`] with respect to (u, v, w):
/// rows `(0, 1, 0)`, `(−f_u/d, c/d, −f_w/d)`, `(g_u/c, 0, g_w/c)`.
pub fn tw_jacobian(model: &dyn Model, params: &WaveParameters, s: State3) -> Result<[[f64; 3]; 3]> {
    if params.c == 0.0 {
        return Err(Error::ZeroWaveSpeed);
    }
    let d = model.diff_coeff();
    let a = &params.alpha;
    Ok([
        [0.0, 1.0, 0.0],
        [-model.f_u(s.u, s.w, a) / d, params.c / d, -model.f_w(s.u, s.w, a) / d],
        [model.g_u(s.u, s.w, a) / params.c, 0.0, model.g_w(s.u, s.w, a) / params.c],
    ])
}

/// Wrapper presenting an arbitrary model in the canonical unit-diffusion form
/// obtained by rescaling the spatial variable ξ → ξ/√d.
pub struct CanonicalModel<'a> {
    inner: &'a dyn Model,
}

impl Model for CanonicalModel<'_> {
    fn f(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.f(u, w, alpha)
    }
    fn g(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.g(u, w, alpha)
    }
    fn f_u(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.f_u(u, w, alpha)
    }
    fn f_w(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.f_w(u, w, alpha)
    }
    fn g_u(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.g_u(u, w, alpha)
    }
    fn g_w(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.g_w(u, w, alpha)
    }
    fn diff_coeff(&self) -> f64 {
        1.0
    }
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn param_names(&self) -> &'static [&'static str] {
        self.inner.param_names()
    }
    fn has_analytic_second_partials(&self) -> bool {
        self.inner.has_analytic_second_partials()
    }
    fn f_uu(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.f_uu(u, w, alpha)
    }
    fn f_uw(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.f_uw(u, w, alpha)
    }
    fn f_ww(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.f_ww(u, w, alpha)
    }
    fn g_uu(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.g_uu(u, w, alpha)
    }
    fn g_uw(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.g_uw(u, w, alpha)
    }
    fn g_ww(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        self.inner.g_ww(u, w, alpha)
    }
}

/// Rescale to unit diffusion: ξ → ξ/√d maps wave speed c to c/√d and leaves
/// the reaction terms untouched. The returned `scale_factor` is √d; multiply
/// canonical lengths (periods, Bloch parameters inverted) by it to map back.
/// Applying it to an already-canonical model is the identity.
pub fn canonical_rescale<'a>(
    model: &'a dyn Model,
    params: &WaveParameters,
) -> Result<(CanonicalModel<'a>, WaveParameters, f64)> {
    let d = model.diff_coeff();
    if d <= 0.0 {
        return Err(Error::NonpositiveDiffusion(d));
    }
    let scale = d.sqrt();
    let rescaled = WaveParameters { alpha: params.alpha.clone(), c: params.c / scale };
    Ok((CanonicalModel { inner: model }, rescaled, scale))
}

/// FitzHugh-Nagumo with an applied current:
/// `u_t = d u_xx + h(u) − w + p`, `w_t = δ(u − γ w)`, `h(u) = u(u−1)(α−u)`,
/// with α = 0.1, d = 5, δ = 0.01 fixed and free parameters (γ, p).
pub struct FhnModel;

/// Fixed FHN constants.
pub const FHN_ALPHA: f64 = 0.1;
pub const FHN_DIFFUSION: f64 = 5.0;
pub const FHN_DELTA: f64 = 0.01;

/// Index of γ in the FHN parameter vector.
pub const FHN_GAMMA: usize = 0;
/// Index of p in the FHN parameter vector.
pub const FHN_P: usize = 1;

/// The bistable cubic `h(u) = u(u−1)(α−u)` with α = 0.1.
pub fn fhn_h(u: f64) -> f64 {
    u * (u - 1.0) * (FHN_ALPHA - u)
}

/// `h'(u) = −3u² + 2.2u − 0.1`.
pub fn fhn_h_prime(u: f64) -> f64 {
    -3.0 * u * u + 2.2 * u - FHN_ALPHA
}

/// The implicit equilibrium cubic `g(u, γ) = u/γ − h(u)
/// = u³ − 1.1u² + (0.1 + 1/γ)u`; equilibria solve `g(u, γ) = p`.
pub fn fhn_equilibrium_cubic(u: f64, gamma: f64) -> f64 {
    u / gamma - fhn_h(u)
}

impl Model for FhnModel {
    fn f(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        fhn_h(u) - w + alpha[FHN_P]
    }
    fn g(&self, u: f64, w: f64, alpha: &[f64]) -> f64 {
        FHN_DELTA * (u - alpha[FHN_GAMMA] * w)
    }
    fn f_u(&self, u: f64, _w: f64, _alpha: &[f64]) -> f64 {
        fhn_h_prime(u)
    }
    fn f_w(&self, _u: f64, _w: f64, _alpha: &[f64]) -> f64 {
        -1.0
    }
    fn g_u(&self, _u: f64, _w: f64, _alpha: &[f64]) -> f64 {
        FHN_DELTA
    }
    fn g_w(&self, _u: f64, _w: f64, alpha: &[f64]) -> f64 {
        -FHN_DELTA * alpha[FHN_GAMMA]
    }
    fn diff_coeff(&self) -> f64 {
        FHN_DIFFUSION
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["gamma", "p"]
    }
    fn has_analytic_second_partials(&self) -> bool {
        true
    }
    fn f_uu(&self, u: f64, _w: f64, _alpha: &[f64]) -> f64 {
        -6.0 * u + 2.2
    }
    fn f_uw(&self, _u: f64, _w: f64, _alpha: &[f64]) -> f64 {
        0.0
    }
    fn f_ww(&self, _u: f64, _w: f64, _alpha: &[f64]) -> f64 {
        0.0
    }
    fn g_uu(&self, _u: f64, _w: f64, _alpha: &[f64]) -> f64 {
        0.0
    }
    fn g_uw(&self, _u: f64, _w: f64, _alpha: &[f64]) -> f64 {
        0.0
    }
    fn g_ww(&self, _u: f64, _w: f64, _alpha: &[f64]) -> f64 {
        0.0
    }
}

/// The builtin FHN model.
pub fn builtin_fhn() -> FhnModel {
    FhnModel
}

/// Resolve a registered model by name. User models plug in by implementing
/// [`Model`] and extending this registry (or passing the object directly to
/// the analysis entry points, which only see `&dyn Model`).
pub fn model_by_name(name: &str) -> Option<Box<dyn Model>> {
    match name {
        "fhn" => Some(Box::new(FhnModel)),
        _ => None,
    }
}

/// Relative disagreement between supplied analytic partials and central
/// finite differences of f, g at the given point; used by the
/// derivative-consistency check.
pub fn derivative_consistency(model: &dyn Model, u: f64, w: f64, alpha: &[f64]) -> f64 {
    let hu = fd_step(u);
    let hw = fd_step(w);
    let rel = |analytic: f64, fd: f64| (analytic - fd).abs() / (1.0 + analytic.abs());
    let fu = (model.f(u + hu, w, alpha) - model.f(u - hu, w, alpha)) / (2.0 * hu);
    let fw = (model.f(u, w + hw, alpha) - model.f(u, w - hw, alpha)) / (2.0 * hw);
    let gu = (model.g(u + hu, w, alpha) - model.g(u - hu, w, alpha)) / (2.0 * hu);
    let gw = (model.g(u, w + hw, alpha) - model.g(u, w - hw, alpha)) / (2.0 * hw);
    let mut worst: f64 = 0.0;
    worst = worst.max(rel(model.f_u(u, w, alpha), fu));
    worst = worst.max(rel(model.f_w(u, w, alpha), fw));
    worst = worst.max(rel(model.g_u(u, w, alpha), gu));
    worst = worst.max(rel(model.g_w(u, w, alpha), gw));
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn cubic_roots_and_values() {
        assert_eq!(fhn_h(0.0), 0.0);
        assert_eq!(fhn_h(1.0), 0.0);
        assert!(fhn_h(0.1).abs() < 1e-17);
        // h(0.5) = 0.5 * (-0.5) * (-0.4) = 0.1
        assert!((fhn_h(0.5) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_cubic_expansion() {
        // g(u, γ) = u^3 - 1.1 u^2 + (0.1 + 1/γ) u
        let gamma = 4.0;
        let mut r = CounterRng::new(11, 0);
        for _ in 0..50 {
            let u = r.uniform(-1.0, 2.0);
            let direct = u * u * u - 1.1 * u * u + (0.1 + 1.0 / gamma) * u;
            assert!((fhn_equilibrium_cubic(u, gamma) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn fhn_derivative_consistency() {
        let m = builtin_fhn();
        let alpha = [4.0, 0.02];
        let mut r = CounterRng::new(3, 1);
        for _ in 0..100 {
            let u = r.uniform(-0.5, 1.5);
            let w = r.uniform(-0.5, 0.5);
            assert!(derivative_consistency(&m, u, w, &alpha) < 1e-6);
        }
    }

    #[test]
    fn vector_field_at_equilibrium_vanishes() {
        // v = 0, f = 0, g = 0 is exactly the zero set of the field
        let m = builtin_fhn();
        let gamma = 2.0;
        let u = 0.3;
        let w = u / gamma;
        let p = w - fhn_h(u);
        let params = WaveParameters::new(alloc::vec![gamma, p], 0.7).unwrap();
        let rate = tw_vector_field(&m, &params, State3::new(u, 0.0, w)).unwrap();
        assert!(rate.u.abs() < 1e-15 && rate.v.abs() < 1e-15 && rate.w.abs() < 1e-15);
    }

    #[test]
    fn v_passthrough() {
        let m = builtin_fhn();
        let (canon, cp, _) = canonical_rescale(&m, &WaveParameters::new(alloc::vec![4.0, 0.02], 0.5).unwrap()).unwrap();
        let rate = tw_vector_field(&canon, &cp, State3::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(rate.u, 1.0);
    }

    #[test]
    fn jacobian_structure_and_fd() {
        let m = builtin_fhn();
        let params = WaveParameters::new(alloc::vec![4.0, 0.025], 0.4).unwrap();
        let mut r = CounterRng::new(7, 2);
        for _ in 0..100 {
            let s = State3::new(r.uniform(-0.5, 1.0), r.uniform(-1.0, 1.0), r.uniform(-0.5, 0.5));
            let j = tw_jacobian(&m, &params, s).unwrap();
            assert_eq!(j[0], [0.0, 1.0, 0.0]);
            assert_eq!(j[2][1], 0.0);
            // finite differences of the field
            for col in 0..3 {
                let h = 1e-6;
                let mut sp = s.to_array();
                let mut sm = s.to_array();
                sp[col] += h;
                sm[col] -= h;
                let fp = tw_vector_field(&m, &params, State3::from_array(sp)).unwrap().to_array();
                let fm = tw_vector_field(&m, &params, State3::from_array(sm)).unwrap().to_array();
                for row in 0..3 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    assert!(
                        (j[row][col] - fd).abs() / (1.0 + fd.abs()) < 1e-6,
                        "entry ({row},{col}): {} vs fd {}",
                        j[row][col],
                        fd
                    );
                }
            }
        }
    }

    #[test]
    fn rescale_identity_on_canonical() {
        let m = builtin_fhn();
        let params = WaveParameters::new(alloc::vec![4.0, 0.02], 0.5).unwrap();
        let (canon, cp, s) = canonical_rescale(&m, &params).unwrap();
        assert!((s - FHN_DIFFUSION.sqrt()).abs() < 1e-15);
        assert!((cp.c - 0.5 / FHN_DIFFUSION.sqrt()).abs() < 1e-15);
        // second rescale is the identity
        let (_, cp2, s2) = canonical_rescale(&canon, &cp).unwrap();
        assert_eq!(s2, 1.0);
        assert_eq!(cp2.c, cp.c);
    }

    #[test]
    fn rescale_rejects_bad_diffusion() {
        struct Bad;
        impl Model for Bad {
            fn f(&self, _: f64, _: f64, _: &[f64]) -> f64 {
                0.0
            }
            fn g(&self, _: f64, _: f64, _: &[f64]) -> f64 {
                0.0
            }
            fn f_u(&self, _: f64, _: f64, _: &[f64]) -> f64 {
                0.0
            }
            fn f_w(&self, _: f64, _: f64, _: &[f64]) -> f64 {
                0.0
            }
            fn g_u(&self, _: f64, _: f64, _: &[f64]) -> f64 {
                0.0
            }
            fn g_w(&self, _: f64, _: f64, _: &[f64]) -> f64 {
                0.0
            }
            fn diff_coeff(&self) -> f64 {
                -1.0
            }
            fn param_dim(&self) -> usize {
                0
            }
            fn param_names(&self) -> &'static [&'static str] {
                &[]
            }
        }
        let p = WaveParameters::new(alloc::vec![], 1.0).unwrap();
        assert!(matches!(canonical_rescale(&Bad, &p), Err(Error::NonpositiveDiffusion(_))));
    }
}
