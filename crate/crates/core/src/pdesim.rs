//! Direct time integration of the co-moving PDE on one period.
//!
//! Method of lines on a periodic grid: second-order central differences for
//! diffusion and advection, reaction pointwise. Time stepping is IMEX —
//! diffusion by a backward-Euler cyclic tridiagonal solve, advection and
//! reaction by Heun — so the perturbation growth about a wave train can be
//! measured against the spectral prediction in the μ = 0 Bloch sector.

use crate::model::{Model, WaveParameters};
use crate::{Error, Result};
#[allow(unused_imports)]
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Periodic 1D grid; `n` cells (power of two, at least 64) over `length`.
#[derive(Debug, Clone, Copy)]
pub struct Grid1D {
    pub n: usize,
    pub length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::BadParameter("grid cells must be a power of two, at least 64"));
        }
        if length <= 0.0 {
            return Err(Error::BadParameter("grid length must be positive"));
        }
        Ok(Grid1D { n, length })
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }
}

/// Decay rate of the k-th discrete Fourier mode under the central
/// second-difference stencil: −(2/h²)(1 − cos(2πk/n)).
pub fn diffusion_stencil_symbol(k: usize, grid: &Grid1D) -> f64 {
    let h = grid.spacing();
    -(2.0 / (h * h)) * (1.0 - (2.0 * core::f64::consts::PI * k as f64 / grid.n as f64).cos())
}

/// Semidiscrete right-hand side of the co-moving system on a grid.
pub struct Stepper<'a> {
    model: &'a dyn Model,
    pub params: WaveParameters,
    pub grid: Grid1D,
}

/// Method-of-lines discretization; requires the canonical unit-diffusion
/// model.
pub fn semidiscretize<'a>(model: &'a dyn Model, params: &WaveParameters, grid: Grid1D) -> Result<Stepper<'a>> {
    if model.diff_coeff() != 1.0 {
        return Err(Error::Precondition("simulation requires the canonical model"));
    }
    Ok(Stepper { model, params: params.clone(), grid })
}

impl Stepper<'_> {
    /// Advection + reaction terms (the explicitly integrated part).
    pub fn explicit_rhs(&self, u: &[f64], w: &[f64], du: &mut [f64], dw: &mut [f64]) {
        let n = self.grid.n;
        let h = self.grid.spacing();
        let c = self.params.c;
        let a = &self.params.alpha;
        for j in 0..n {
            let jm = (j + n - 1) % n;
            let jp = (j + 1) % n;
            let ux = (u[jp] - u[jm]) / (2.0 * h);
            let wx = (w[jp] - w[jm]) / (2.0 * h);
            du[j] = -c * ux + self.model.f(u[j], w[j], a);
            dw[j] = -c * wx + self.model.g(u[j], w[j], a);
        }
    }

    /// Full semidiscrete right-hand side including diffusion.
    pub fn full_rhs(&self, u: &[f64], w: &[f64], du: &mut [f64], dw: &mut [f64]) {
        self.explicit_rhs(u, w, du, dw);
        let n = self.grid.n;
        let h2 = self.grid.spacing() * self.grid.spacing();
        for j in 0..n {
            let jm = (j + n - 1) % n;
            let jp = (j + 1) % n;
            du[j] += (u[jm] - 2.0 * u[j] + u[jp]) / h2;
        }
    }

    /// Coefficient bound of the explicit part: |c| plus the reaction Lipschitz
    /// estimate over the given state.
    pub fn explicit_bound(&self, u: &[f64], w: &[f64]) -> f64 {
        let a = &self.params.alpha;
        let mut lip: f64 = 0.0;
        for j in 0..u.len() {
            let row_f = self.model.f_u(u[j], w[j], a).abs() + self.model.f_w(u[j], w[j], a).abs();
            let row_g = self.model.g_u(u[j], w[j], a).abs() + self.model.g_w(u[j], w[j], a).abs();
            lip = lip.max(row_f.max(row_g));
        }
        self.params.c.abs() + lip
    }

    /// The CFL-type bound 0.25·h²/B with B the explicit-part bound at the
    /// given state.
    pub fn dt_max(&self, u: &[f64], w: &[f64]) -> f64 {
        let h = self.grid.spacing();
        0.25 * h * h / self.explicit_bound(u, w).max(1e-300)
    }
}

/// Solve (I − r·D₂)x = d on the periodic grid (constant-coefficient cyclic
/// tridiagonal system) by the Sherman–Morrison splitting.
fn cyclic_diffusion_solve(r_over_h2: f64, d: &[f64], x: &mut [f64], work: &mut [f64]) {
    let n = d.len();
    let a = -r_over_h2; // sub and sup diagonal
    let b = 1.0 + 2.0 * r_over_h2; // diagonal
    let gamma = -b;
    // B differs from the cyclic matrix on the first and last diagonal entries
    let b0 = b - gamma;
    let bn = b - a * a / gamma;
    // Thomas on B for two right-hand sides: d and the correction vector
    let (cp, dp) = work.split_at_mut(n);
    // forward sweep for rhs = d
    let mut beta = b0;
    cp[0] = a / beta;
    dp[0] = d[0] / beta;
    for j in 1..n {
        let bj = if j == n - 1 { bn } else { b };
        beta = bj - a * cp[j - 1];
        cp[j] = a / beta;
        dp[j] = (d[j] - a * dp[j - 1]) / beta;
    }
    x[n - 1] = dp[n - 1];
    for j in (0..n - 1).rev() {
        x[j] = dp[j] - cp[j] * x[j + 1];
    }
    // forward sweep for rhs = u-vector (gamma, 0, ..., 0, a)
    let mut beta = b0;
    dp[0] = gamma / beta;
    for j in 1..n {
        let bj = if j == n - 1 { bn } else { b };
        beta = bj - a * cp[j - 1];
        dp[j] = ((if j == n - 1 { a } else { 0.0 }) - a * dp[j - 1]) / beta;
    }
    // back substitution reusing dp as the q-solution
    for j in (0..n - 1).rev() {
        dp[j] -= cp[j] * dp[j + 1];
    }
    let vx = x[0] + a / gamma * x[n - 1];
    let vq = dp[0] + a / gamma * dp[n - 1];
    let factor = vx / (1.0 + vq);
    for j in 0..n {
        x[j] -= factor * dp[j];
    }
}

/// One stored trajectory with snapshots.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub grid: Grid1D,
    pub dt: f64,
    pub t_end: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<(Vec<f64>, Vec<f64>)>,
}

/// IMEX evolution from the initial (u, w): Heun on advection + reaction,
/// backward Euler on diffusion. dt must satisfy the CFL-type bound at the
/// initial state; snapshots are recorded every `snapshot_every` steps.
pub fn evolve(
    stepper: &Stepper<'_>,
    initial: (&[f64], &[f64]),
    dt: f64,
    t_end: f64,
    snapshot_every: usize,
) -> Result<SimulationRun> {
    let n = stepper.grid.n;
    if initial.0.len() != n || initial.1.len() != n {
        return Err(Error::BadParameter("initial data does not match the grid"));
    }
    let dt_max = stepper.dt_max(initial.0, initial.1);
    if dt > dt_max {
        return Err(Error::CflViolation { dt, dt_max });
    }
    let every = snapshot_every.max(1);
    let steps = (t_end / dt).ceil() as usize;
    let h2 = stepper.grid.spacing() * stepper.grid.spacing();
    let r = dt / h2;

    let mut u = initial.0.to_vec();
    let mut w = initial.1.to_vec();
    let mut du1 = vec![0.0; n];
    let mut dw1 = vec![0.0; n];
    let mut du2 = vec![0.0; n];
    let mut dw2 = vec![0.0; n];
    let mut up = vec![0.0; n];
    let mut wp = vec![0.0; n];
    let mut work = vec![0.0; 2 * n];
    let mut times = vec![0.0];
    let mut snapshots = vec![(u.clone(), w.clone())];

    for step in 0..steps {
        stepper.explicit_rhs(&u, &w, &mut du1, &mut dw1);
        for j in 0..n {
            up[j] = u[j] + dt * du1[j];
            wp[j] = w[j] + dt * dw1[j];
        }
        stepper.explicit_rhs(&up, &wp, &mut du2, &mut dw2);
        for j in 0..n {
            up[j] = u[j] + 0.5 * dt * (du1[j] + du2[j]);
            wp[j] = w[j] + 0.5 * dt * (dw1[j] + dw2[j]);
        }
        cyclic_diffusion_solve(r, &up, &mut u, &mut work);
        core::mem::swap(&mut w, &mut wp);
        let t = (step + 1) as f64 * dt;
        if !u.iter().all(|v| v.is_finite()) || !w.iter().all(|v| v.is_finite()) {
            return Err(Error::IntegrationBlowup { at: t });
        }
        if (step + 1) % every == 0 {
            times.push(t);
            snapshots.push((u.clone(), w.clone()));
        }
    }
    Ok(SimulationRun { grid: stepper.grid, dt, t_end, times, snapshots })
}

/// L² distance minimized over cyclic translates of the reference profile.
pub fn distance_to_translates(u: &[f64], w: &[f64], wave_u: &[f64], wave_w: &[f64], h: f64) -> f64 {
    let n = u.len();
    let mut best = f64::INFINITY;
    for s in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let js = (j + s) % n;
            let du = u[j] - wave_u[js];
            let dw = w[j] - wave_w[js];
            acc += du * du + dw * dw;
        }
        best = best.min(acc);
    }
    (h * best).sqrt()
}

/// Least-squares fit of the perturbation growth rate.
#[derive(Debug, Clone, Copy)]
pub struct GrowthFit {
    pub sigma: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Fit log distance-to-translates against time on the window where the
/// distance lies in `window`. An empty window is inconclusive, not evidence
/// of stability.
pub fn measure_growth_rate(
    run: &SimulationRun,
    wave_u: &[f64],
    wave_w: &[f64],
    window: (f64, f64),
) -> Result<GrowthFit> {
    let h = run.grid.spacing();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (t, (u, w)) in run.times.iter().zip(run.snapshots.iter()) {
        let d = distance_to_translates(u, w, wave_u, wave_w, h);
        if d >= window.0 && d <= window.1 {
            xs.push(*t);
            ys.push(d.max(1e-300).ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::Precondition("growth window empty: run is inconclusive"));
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|v| v * v).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let icpt = (sy - slope * sx) / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    let ybar = sy / n;
    for (x, y) in xs.iter().zip(ys.iter()) {
        let e = y - (slope * x + icpt);
        ss_res += e * e;
        ss_tot += (y - ybar) * (y - ybar);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(GrowthFit { sigma: slope, r_squared: r2, window: (xs[0], xs[xs.len() - 1]), points: xs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_fhn, canonical_rescale, fhn_equilibrium_cubic};

    struct NoReaction;
    impl Model for NoReaction {
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
            1.0
        }
        fn param_dim(&self) -> usize {
            0
        }
        fn param_names(&self) -> &'static [&'static str] {
            &[]
        }
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(512, 10.0).is_ok());
        assert!(Grid1D::new(100, 10.0).is_err());
        assert!(Grid1D::new(32, 10.0).is_err());
    }

    #[test]
    fn constant_equilibrium_is_steady() {
        let m = builtin_fhn();
        let gamma = 2.0;
        let u0 = 0.3;
        let w0 = u0 / gamma;
        let p = w0 - crate::model::fhn_h(u0);
        assert!((fhn_equilibrium_cubic(u0, gamma) - p).abs() < 1e-15);
        let params = WaveParameters::new(alloc::vec![gamma, p], 0.5).unwrap();
        let (cm, cp, _) = canonical_rescale(&m, &params).unwrap();
        let grid = Grid1D::new(64, 5.0).unwrap();
        let st = semidiscretize(&cm, &cp, grid).unwrap();
        let u = alloc::vec![u0; 64];
        let w = alloc::vec![w0; 64];
        let mut du = alloc::vec![0.0; 64];
        let mut dw = alloc::vec![0.0; 64];
        st.full_rhs(&u, &w, &mut du, &mut dw);
        for j in 0..64 {
            assert!(du[j].abs() < 1e-14 && dw[j].abs() < 1e-14);
        }
        // drift over T = 10 stays at rounding level
        let dt = 0.9 * st.dt_max(&u, &w);
        let run = evolve(&st, (&u, &w), dt, 10.0, 50).unwrap();
        let (uf, wf) = run.snapshots.last().unwrap();
        let drift = uf
            .iter()
            .zip(u.iter())
            .chain(wf.iter().zip(w.iter()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(drift < 1e-6, "drift {drift:e}");
    }

    #[test]
    fn implicit_step_amplification_matches_closed_form() {
        // pure diffusion, c = 0: one step multiplies mode k by 1/(1 + dt·|sym|)
        let m = NoReaction;
        let params = WaveParameters { alpha: alloc::vec![], c: 0.0 };
        let grid = Grid1D::new(128, 4.0).unwrap();
        let st = semidiscretize(&m, &params, grid).unwrap();
        let n = 128;
        let k = 7usize;
        let u0: Vec<f64> = (0..n)
            .map(|j| (2.0 * core::f64::consts::PI * k as f64 * j as f64 / n as f64).cos())
            .collect();
        let w0 = alloc::vec![0.0; n];
        let dt = 1e-4;
        assert!(dt <= st.dt_max(&u0, &w0).max(1e-4));
        let run = evolve(&st, (&u0, &w0), dt, dt, 1).unwrap();
        let sym = diffusion_stencil_symbol(k, &grid);
        let gain = 1.0 / (1.0 - dt * sym);
        let (u1, _) = &run.snapshots[1];
        for j in 0..n {
            assert!((u1[j] - gain * u0[j]).abs() < 1e-12, "cell {j}: {} vs {}", u1[j], gain * u0[j]);
        }
    }

    #[test]
    fn diffusion_mode_decay_rate() {
        // semidiscrete decay of mode k at the stencil symbol rate
        let m = NoReaction;
        let params = WaveParameters { alpha: alloc::vec![], c: 0.0 };
        let grid = Grid1D::new(128, 4.0).unwrap();
        let st = semidiscretize(&m, &params, grid).unwrap();
        let n = 128;
        let k = 3usize;
        let u0: Vec<f64> = (0..n)
            .map(|j| (2.0 * core::f64::consts::PI * k as f64 * j as f64 / n as f64).sin())
            .collect();
        let w0 = alloc::vec![0.0; n];
        let mut du = alloc::vec![0.0; n];
        let mut dw = alloc::vec![0.0; n];
        st.full_rhs(&u0, &w0, &mut du, &mut dw);
        let sym = diffusion_stencil_symbol(k, &grid);
        for j in 0..n {
            assert!((du[j] - sym * u0[j]).abs() < 1e-9 * (1.0 + sym.abs()));
        }
    }

    #[test]
    fn cfl_guard() {
        let m = builtin_fhn();
        let params = WaveParameters::new(alloc::vec![2.0, 0.04], 0.5).unwrap();
        let (cm, cp, _) = canonical_rescale(&m, &params).unwrap();
        let grid = Grid1D::new(64, 5.0).unwrap();
        let st = semidiscretize(&cm, &cp, grid).unwrap();
        let u = alloc::vec![0.3; 64];
        let w = alloc::vec![0.15; 64];
        let dt = 10.0 * st.dt_max(&u, &w);
        assert!(matches!(evolve(&st, (&u, &w), dt, 1.0, 1), Err(Error::CflViolation { .. })));
    }

    #[test]
    fn translate_distance_invariance() {
        let n = 64;
        let wave_u: Vec<f64> = (0..n).map(|j| (2.0 * core::f64::consts::PI * j as f64 / n as f64).cos()).collect();
        let wave_w: Vec<f64> = (0..n).map(|j| (2.0 * core::f64::consts::PI * j as f64 / n as f64).sin()).collect();
        let mut u = wave_u.clone();
        u[10] += 1e-3;
        let w = wave_w.clone();
        let d0 = distance_to_translates(&u, &w, &wave_u, &wave_w, 0.1);
        // cyclic shift of the whole state leaves the distance unchanged
        let mut us = alloc::vec![0.0; n];
        let mut ws = alloc::vec![0.0; n];
        for j in 0..n {
            us[j] = u[(j + 17) % n];
            ws[j] = w[(j + 17) % n];
        }
        let d1 = distance_to_translates(&us, &ws, &wave_u, &wave_w, 0.1);
        assert!((d0 - d1).abs() < 1e-12);
        // exact translate has distance ~0
        let d2 = distance_to_translates(&wave_u, &wave_w, &wave_u, &wave_w, 0.1);
        assert!(d2 < 1e-14);
    }
}
