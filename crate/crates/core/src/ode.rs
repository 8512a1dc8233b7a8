//! Adaptive embedded Runge-Kutta integration with dense output.
//!
//! Dormand-Prince 5(4) with PI-free standard step control and first-same-as-last
//! stage reuse. Dense output between accepted steps is cubic Hermite on the
//! stored endpoint states and derivatives, which is what the orbit store and
//! the spectral coefficient evaluation consume.

use crate::{Error, Result};
#[allow(unused_imports)]
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Integrator configuration. Defaults match the shooting and Evans kernels:
/// absolute tolerance 1e-12, relative tolerance 1e-10.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator { atol: 1e-12, rtol: 1e-10, max_steps: 2_000_000 }
    }
}

/// One accepted step: endpoint times, states and derivatives.
pub struct Step<'a> {
    pub t0: f64,
    pub y0: &'a [f64],
    pub f0: &'a [f64],
    pub t1: f64,
    pub y1: &'a [f64],
    pub f1: &'a [f64],
}

/// Cubic Hermite evaluation on a step at parameter `t` in [t0, t1].
pub fn hermite(t: f64, t0: f64, y0: &[f64], f0: &[f64], t1: f64, y1: &[f64], f1: &[f64], out: &mut [f64]) {
    let h = t1 - t0;
    let th = if h == 0.0 { 0.0 } else { (t - t0) / h };
    let t2 = th * th;
    let t3 = t2 * th;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + th;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    for i in 0..out.len() {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

impl Integrator {
    /// Integrate `y' = f(t, y)` from `t0` to `t1 >= t0`, invoking `sink` on
    /// every accepted step. Returns the final state.
    pub fn solve_with<F, S>(&self, mut f: F, t0: f64, t1: f64, y0: &[f64], mut sink: S) -> Result<Vec<f64>>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        S: FnMut(Step<'_>),
    {
        if t1 < t0 {
            return Err(Error::Precondition("integration span must be forward"));
        }
        let n = y0.len();
        let mut y = y0.to_vec();
        let mut t = t0;
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
        let mut ytmp = vec![0.0; n];
        let mut ynew = vec![0.0; n];
        f(t, &y, &mut k[0]);

        let span = t1 - t0;
        if span == 0.0 {
            return Ok(y);
        }
        let mut h = (span * 1e-3).min(1e-2).max(span * 1e-12);

        for _ in 0..self.max_steps {
            if t >= t1 {
                return Ok(y);
            }
            if t + h > t1 {
                h = t1 - t;
            }
            for s in 0..6 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s + 1) {
                        acc += A[s][j] * kj[i];
                    }
                    ytmp[i] = y[i] + h * acc;
                }
                f(t + C[s] * h, &ytmp, &mut k[s + 1]);
            }
            // 5th-order solution is stage 6's argument (FSAL)
            ynew.copy_from_slice(&ytmp);
            let mut err = 0.0f64;
            for i in 0..n {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                e *= h;
                let sc = self.atol + self.rtol * ynew[i].abs().max(y[i].abs());
                err += (e / sc) * (e / sc);
            }
            err = (err / n as f64).sqrt();
            if !err.is_finite() || !ynew.iter().all(|v| v.is_finite()) {
                return Err(Error::IntegrationBlowup { at: t });
            }
            if err <= 1.0 {
                let tn = t + h;
                sink(Step { t0: t, y0: &y, f0: &k[0], t1: tn, y1: &ynew, f1: &k[6] });
                t = tn;
                core::mem::swap(&mut y, &mut ynew);
                let (a, b) = k.split_at_mut(6);
                core::mem::swap(&mut a[0], &mut b[0]);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
            if h < span * 1e-14 {
                return Err(Error::IntegrationBlowup { at: t });
            }
        }
        Err(Error::NewtonStagnation { iterations: self.max_steps, residual: t1 - t })
    }

    /// Final state only.
    pub fn solve<F>(&self, f: F, t0: f64, t1: f64, y0: &[f64]) -> Result<Vec<f64>>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        self.solve_with(f, t0, t1, y0, |_| {})
    }

    /// States at the requested ascending sample times (must lie in [t0, t1]).
    /// Steps are clipped to land exactly on each sample time, so the sampled
    /// states carry integration accuracy rather than interpolation accuracy.
    pub fn solve_sampled<F>(&self, mut f: F, t0: f64, t1: f64, y0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(times.len());
        let mut y = y0.to_vec();
        let mut t = t0;
        for &tq in times {
            if tq < t - 1e-12 || tq > t1 + 1e-12 {
                return Err(Error::Precondition("sample times outside integration span"));
            }
            if tq > t {
                y = self.solve_with(&mut f, t, tq, &y, |_| {})?;
                t = tq;
            }
            out.push(y.clone());
        }
        Ok(out)
    }
}
