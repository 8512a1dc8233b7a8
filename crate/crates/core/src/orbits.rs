//! Periodic orbits of the traveling-wave system by Newton shooting.
//!
//! The averaged zero supplies the initial guess P₀ + εQ(r*, 0, w*) with
//! period 2π/μ₀; shooting solves Φ_T(Y₀) − Y₀ = 0 with a phase hyperplane
//! through the prediction, with the monodromy of the variational equations
//! as the Newton Jacobian. Families are continued in ε by rescaling the
//! previous orbit about the equilibrium.

use crate::averaging::{AveragedZero, UnfoldingPath};
use crate::equilibria::{eigenvalues_3x3, FoldHopfPoint};
use crate::linalg::{matvec3, norm3, solve_dense, sub3, M3, V3};
use crate::model::{tw_jacobian, tw_vector_field, Model, State3, WaveParameters};
use crate::ode::{hermite, Integrator};
use crate::{Error, Result};
#[allow(unused_imports)]
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Largest amplitude scale at which the asymptotic predictions are trusted
/// by default.
pub const EPS_MAX_DEFAULT: f64 = 0.05;

/// Number of equispaced profile samples stored per orbit.
pub const ORBIT_SAMPLES: usize = 512;

/// A converged periodic orbit with dense-output samples.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub epsilon: f64,
    /// Canonical-frame parameters at this ε.
    pub params: WaveParameters,
    /// Equispaced states over one period (ξ_k = k·period/N).
    pub samples: Vec<V3>,
    /// Field values at the samples (Hermite slopes).
    pub derivs: Vec<V3>,
    pub period: f64,
    pub shooting_residual: f64,
    pub floquet: [C64; 3],
    /// det M vs exp(∫ trace) relative deviation recorded at construction.
    pub liouville_deviation: f64,
}

impl PeriodicOrbit {
    /// Profile state at arbitrary ξ by cubic Hermite on the sample grid.
    pub fn interp(&self, xi: f64) -> V3 {
        let n = self.samples.len();
        let h = self.period / n as f64;
        let mut x = xi % self.period;
        if x < 0.0 {
            x += self.period;
        }
        let k = ((x / h) as usize).min(n - 1);
        let k1 = (k + 1) % n;
        let t0 = k as f64 * h;
        let mut out = [0.0; 3];
        hermite(x, t0, &self.samples[k], &self.derivs[k], t0 + h, &self.samples[k1], &self.derivs[k1], &mut out);
        out
    }

    /// Max distance of the profile from a reference point over the samples.
    pub fn amplitude_from(&self, center: V3) -> f64 {
        self.samples
            .iter()
            .map(|s| norm3(sub3(*s, center)))
            .fold(0.0, f64::max)
    }
}

/// Initial state and period guess for the orbit at amplitude ε:
/// P₀ + εQ(r*, 0, w*) and 2π/μ₀.
pub fn predict_initial_orbit(fh: &FoldHopfPoint, zero: &AveragedZero, eps: f64) -> (State3, f64) {
    let off = matvec3(&fh.q, [zero.r, 0.0, zero.w]);
    let p0 = fh.eq.point;
    (
        State3::new(p0.u + eps * off[0], p0.v + eps * off[1], p0.w + eps * off[2]),
        fh.reference_period(),
    )
}

/// Shooting setup: prediction (doubles as the phase anchor), period guess,
/// and the equilibrium used by the amplitude-anchored speed-relaxation
/// fallback.
#[derive(Debug, Clone)]
pub struct OrbitGuess {
    pub state: State3,
    pub period: f64,
    pub center: State3,
}

struct Flow<'a> {
    model: &'a dyn Model,
    params: WaveParameters,
}

impl Flow<'_> {
    fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let s = State3::new(y[0], y[1], y[2]);
        let f = tw_vector_field(self.model, &self.params, s).expect("c != 0 checked at entry");
        dy[0] = f.u;
        dy[1] = f.v;
        dy[2] = f.w;
    }

    /// Variational system: state, monodromy (row-major), trace quadrature.
    fn rhs_var(&self, y: &[f64], dy: &mut [f64]) {
        self.rhs(y, dy);
        let s = State3::new(y[0], y[1], y[2]);
        let j = tw_jacobian(self.model, &self.params, s).expect("c != 0 checked at entry");
        for i in 0..3 {
            for k in 0..3 {
                let mut acc = 0.0;
                for (l, jl) in j[i].iter().enumerate() {
                    acc += jl * y[3 + 3 * l + k];
                }
                dy[3 + 3 * i + k] = acc;
            }
        }
        dy[12] = j[0][0] + j[1][1] + j[2][2];
    }

    fn flow_to(&self, ig: &Integrator, y0: V3, t: f64) -> Result<V3> {
        let y = ig.solve(|_, y, dy| self.rhs(y, dy), 0.0, t, &y0)?;
        Ok([y[0], y[1], y[2]])
    }

    fn monodromy(&self, ig: &Integrator, y0: V3, t: f64) -> Result<(V3, M3, f64)> {
        let mut state = [0.0; 13];
        state[..3].copy_from_slice(&y0);
        state[3] = 1.0;
        state[7] = 1.0;
        state[11] = 1.0;
        let y = ig.solve(|_, y, dy| self.rhs_var(y, dy), 0.0, t, &state)?;
        let endpoint = [y[0], y[1], y[2]];
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                m[i][k] = y[3 + 3 * i + k];
            }
        }
        Ok((endpoint, m, y[12]))
    }
}

/// Newton shooting for a periodic orbit.
///
/// Unknowns (Y₀, T); equations Φ_T(Y₀) − Y₀ = 0 plus the phase condition
/// ⟨field(prediction), Y₀ − prediction⟩ = 0. If plain Newton stagnates, a
/// fallback relaxes the wave speed as a fifth unknown against an
/// amplitude-anchoring equation |Y₀ − center|² = |prediction − center|².
pub fn shoot_periodic(model: &dyn Model, params: &WaveParameters, guess: &OrbitGuess) -> Result<PeriodicOrbit> {
    if params.c == 0.0 {
        return Err(Error::ZeroWaveSpeed);
    }
    let ig = Integrator::default();
    match newton_fixed_speed(model, params, guess, &ig) {
        Ok(orb) => Ok(orb),
        Err(Error::NewtonStagnation { .. }) => newton_relaxed_speed(model, params, guess, &ig),
        Err(e) => Err(e),
    }
}

fn newton_fixed_speed(
    model: &dyn Model,
    params: &WaveParameters,
    guess: &OrbitGuess,
    ig: &Integrator,
) -> Result<PeriodicOrbit> {
    let flow = Flow { model, params: params.clone() };
    let anchor = guess.state.to_array();
    let fp = tw_vector_field(model, params, guess.state)?.to_array();
    let mut y0 = anchor;
    let mut t = guess.period;
    let min_period = 0.1 * guess.period;
    let mut residual = f64::INFINITY;
    for _ in 0..30 {
        if t < min_period {
            return Err(Error::PeriodCollapse { period: t });
        }
        let (ye, m, _) = flow.monodromy(ig, y0, t)?;
        let clos = sub3(ye, y0);
        let phase = dot(fp, sub3(y0, anchor));
        residual = clos.iter().fold(phase.abs(), |a, v| a.max(v.abs()));
        if residual < 1e-11 {
            return assemble_orbit(model, params, y0, t, residual, &flow, ig, 0.0);
        }
        let fe = tw_vector_field(model, params, State3::from_array(ye))?.to_array();
        let mut a = [0.0; 16];
        let mut b = [0.0; 4];
        for i in 0..3 {
            for k in 0..3 {
                a[i * 4 + k] = m[i][k] - if i == k { 1.0 } else { 0.0 };
            }
            a[i * 4 + 3] = fe[i];
            b[i] = -clos[i];
        }
        for k in 0..3 {
            a[12 + k] = fp[k];
        }
        a[15] = 0.0;
        b[3] = -phase;
        solve_dense(4, &mut a, &mut b)?;
        y0 = [y0[0] + b[0], y0[1] + b[1], y0[2] + b[2]];
        t += b[3];
    }
    Err(Error::NewtonStagnation { iterations: 30, residual })
}

fn newton_relaxed_speed(
    model: &dyn Model,
    params: &WaveParameters,
    guess: &OrbitGuess,
    ig: &Integrator,
) -> Result<PeriodicOrbit> {
    let anchor = guess.state.to_array();
    let center = guess.center.to_array();
    let amp2 = {
        let d = sub3(anchor, center);
        dot(d, d)
    };
    let fp = tw_vector_field(model, params, guess.state)?.to_array();
    let mut y0 = anchor;
    let mut t = guess.period;
    let mut c = params.c;
    let min_period = 0.1 * guess.period;
    let mut residual = f64::INFINITY;
    for _ in 0..30 {
        if t < min_period {
            return Err(Error::PeriodCollapse { period: t });
        }
        let pc = WaveParameters { alpha: params.alpha.clone(), c };
        let flow = Flow { model, params: pc.clone() };
        let (ye, m, _) = flow.monodromy(ig, y0, t)?;
        let clos = sub3(ye, y0);
        let phase = dot(fp, sub3(y0, anchor));
        let danc = sub3(y0, center);
        let anc = dot(danc, danc) - amp2;
        residual = clos
            .iter()
            .fold(phase.abs().max(anc.abs()), |a, v| a.max(v.abs()));
        if residual < 1e-11 {
            return assemble_orbit(model, &pc, y0, t, residual, &flow, ig, (c - params.c).abs());
        }
        // finite-difference column for the speed unknown
        let dc = 1e-7 * (1.0 + c.abs());
        let flow_dc = Flow { model, params: WaveParameters { alpha: params.alpha.clone(), c: c + dc } };
        let ye_dc = flow_dc.flow_to(ig, y0, t)?;
        let fe = tw_vector_field(model, &pc, State3::from_array(ye))?.to_array();
        let mut a = [0.0; 25];
        let mut b = [0.0; 5];
        for i in 0..3 {
            for k in 0..3 {
                a[i * 5 + k] = m[i][k] - if i == k { 1.0 } else { 0.0 };
            }
            a[i * 5 + 3] = fe[i];
            a[i * 5 + 4] = (ye_dc[i] - ye[i]) / dc;
            b[i] = -clos[i];
        }
        for k in 0..3 {
            a[15 + k] = fp[k];
            a[20 + k] = 2.0 * danc[k];
        }
        b[3] = -phase;
        b[4] = -anc;
        solve_dense(5, &mut a, &mut b)?;
        y0 = [y0[0] + b[0], y0[1] + b[1], y0[2] + b[2]];
        t += b[3];
        c += b[4];
    }
    Err(Error::NewtonStagnation { iterations: 30, residual })
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[allow(clippy::too_many_arguments)]
fn assemble_orbit(
    model: &dyn Model,
    params: &WaveParameters,
    y0: V3,
    period: f64,
    residual: f64,
    flow: &Flow<'_>,
    ig: &Integrator,
    _speed_shift: f64,
) -> Result<PeriodicOrbit> {
    let n = ORBIT_SAMPLES;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * period / n as f64).collect();
    let states = ig.solve_sampled(|_, y, dy| flow.rhs(y, dy), 0.0, period, &y0, &times)?;
    let mut samples = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    for s in states {
        let v: V3 = [s[0], s[1], s[2]];
        let f = tw_vector_field(model, params, State3::from_array(v))?.to_array();
        samples.push(v);
        derivs.push(f);
    }
    let (_, m, tr) = flow.monodromy(ig, y0, period)?;
    let floquet = eigenvalues_3x3(&m);
    let detm = crate::linalg::det3(&m);
    let liouville_deviation = (detm - tr.exp()).abs() / tr.exp().abs().max(1e-300);
    Ok(PeriodicOrbit {
        epsilon: 0.0,
        params: params.clone(),
        samples,
        derivs,
        period,
        shooting_residual: residual,
        floquet,
        liouville_deviation,
    })
}

/// Floquet multipliers: eigenvalues of the monodromy of the variational
/// equations over one period, recomputed from the stored initial sample.
pub fn floquet_multipliers(model: &dyn Model, orbit: &PeriodicOrbit) -> Result<[C64; 3]> {
    let flow = Flow { model, params: orbit.params.clone() };
    let ig = Integrator::default();
    let (_, m, _) = flow.monodromy(&ig, orbit.samples[0], orbit.period)?;
    Ok(eigenvalues_3x3(&m))
}

/// Result of a family continuation: converged orbits in ascending ε plus the
/// first failure, if any.
#[derive(Debug)]
pub struct Continuation {
    pub orbits: Vec<PeriodicOrbit>,
    pub failed_at: Option<(f64, Error)>,
}

/// Shoot the family over an ascending ε list. The smallest ε starts from the
/// averaging prediction; each subsequent ε reuses the previous orbit rescaled
/// about the equilibrium. Stops at the first failure and returns the partial
/// family tagged with the failing ε.
pub fn continue_in_epsilon(
    model: &dyn Model,
    fh: &FoldHopfPoint,
    zero: &AveragedZero,
    path: &UnfoldingPath,
    eps_list: &[f64],
) -> Result<Continuation> {
    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    let mut failed_at = None;
    for (i, &eps) in eps_list.iter().enumerate() {
        if eps <= 0.0 {
            return Err(Error::Precondition("epsilon values must be positive"));
        }
        if i > 0 && eps < eps_list[i - 1] {
            return Err(Error::Precondition("epsilon list must be ascending"));
        }
        let (alpha, c) = path.eval(&fh.alpha0, fh.c0, eps);
        let params = WaveParameters { alpha, c };
        let (pred, period_guess) = predict_initial_orbit(fh, zero, eps);
        let p0 = fh.eq.point.to_array();
        let guess = match orbits.last() {
            None => OrbitGuess { state: pred, period: period_guess, center: fh.eq.point },
            Some(prev) => {
                let ratio = eps / prev.epsilon;
                let y = prev.samples[0];
                let scaled = [
                    p0[0] + ratio * (y[0] - p0[0]),
                    p0[1] + ratio * (y[1] - p0[1]),
                    p0[2] + ratio * (y[2] - p0[2]),
                ];
                OrbitGuess { state: State3::from_array(scaled), period: prev.period, center: fh.eq.point }
            }
        };
        match shoot_periodic(model, &params, &guess) {
            Ok(mut orb) => {
                orb.epsilon = eps;
                orbits.push(orb);
            }
            Err(e) => {
                failed_at = Some((eps, e));
                break;
            }
        }
    }
    Ok(Continuation { orbits, failed_at })
}
