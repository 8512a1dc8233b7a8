//! Fourier-discretization cross-check for the Bloch operators.
//!
//! A truncated Fourier (Hill-type) discretization of the linearized operator
//! about a wave, used only to cross-validate eigenvalues located through the
//! Evans function. Eigenvalues are extracted by shifted inverse iteration
//! with a Rayleigh-quotient finish.

use crate::linalg::LuC64;
use crate::model::Model;
use crate::orbits::PeriodicOrbit;
use crate::spectrum::SpectralCoefficients;
use crate::{Error, Result};
#[allow(unused_imports)]
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Fourier coefficients c_m, m ∈ −2N..2N, of samples on an M-point grid.
fn dft_coeffs(samples: &[f64], n_modes: usize) -> Vec<C64> {
    let m = samples.len();
    let mut out = Vec::with_capacity(4 * n_modes + 1);
    for mm in -(2 * n_modes as i64)..=(2 * n_modes as i64) {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &s) in samples.iter().enumerate() {
            let ph = -2.0 * core::f64::consts::PI * mm as f64 * j as f64 / m as f64;
            acc += C64::new(s * ph.cos(), s * ph.sin());
        }
        out.push(acc / m as f64);
    }
    out
}

/// Assemble the dense Bloch-operator discretization with `n_modes` Fourier
/// modes per component and return the eigenvalue nearest `shift`.
pub fn hill_eigenvalue_near(
    model: &dyn Model,
    orbit: &PeriodicOrbit,
    mu: f64,
    shift: C64,
    n_modes: usize,
) -> Result<C64> {
    let nm = n_modes.max(8);
    let t = orbit.period;
    let c = orbit.params.c;
    let coeffs = SpectralCoefficients { model, orbit };
    let msamp = 8 * nm;
    let mut fu = vec![0.0; msamp];
    let mut fw = vec![0.0; msamp];
    let mut gu = vec![0.0; msamp];
    let mut gw = vec![0.0; msamp];
    for j in 0..msamp {
        let xi = t * j as f64 / msamp as f64;
        let p = coeffs.partials(xi);
        fu[j] = p[0];
        fw[j] = p[1];
        gu[j] = p[2];
        gw[j] = p[3];
    }
    let fu_h = dft_coeffs(&fu, nm);
    let fw_h = dft_coeffs(&fw, nm);
    let gu_h = dft_coeffs(&gu, nm);
    let gw_h = dft_coeffs(&gw, nm);
    let hat = |h: &[C64], d: i64| -> C64 { h[(d + 2 * nm as i64) as usize] };

    let nk = 2 * nm + 1;
    let n = 2 * nk;
    let mut hmat = vec![C64::new(0.0, 0.0); n * n];
    let base = 2.0 * core::f64::consts::PI / t;
    for krow in 0..nk {
        let k = krow as i64 - nm as i64;
        let dk = C64::new(0.0, base * k as f64 + mu);
        for lcol in 0..nk {
            let l = lcol as i64 - nm as i64;
            let m = k - l;
            if m.abs() <= 2 * nm as i64 {
                hmat[krow * n + lcol] += hat(&fu_h, m);
                hmat[krow * n + (nk + lcol)] += hat(&fw_h, m);
                hmat[(nk + krow) * n + lcol] += hat(&gu_h, m);
                hmat[(nk + krow) * n + (nk + lcol)] += hat(&gw_h, m);
            }
        }
        hmat[krow * n + krow] += dk * dk - dk * c;
        hmat[(nk + krow) * n + (nk + krow)] += -dk * c;
    }

    // shifted inverse iteration
    let mut shifted = hmat.clone();
    for i in 0..n {
        shifted[i * n + i] -= shift;
    }
    let lu = LuC64::factor(n, shifted)?;
    let mut v = vec![C64::new(0.0, 0.0); n];
    // deterministic pseudo-random start vector
    let mut rng = crate::rng::CounterRng::new(0xA11CE, 17);
    for x in v.iter_mut() {
        *x = C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    for _ in 0..60 {
        lu.solve(&mut v);
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::Precondition("inverse iteration collapsed"));
        }
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    // Rayleigh quotient on the full operator
    let mut hv = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += hmat[i * n + j] * v[j];
        }
        hv[i] = acc;
    }
    let num: C64 = v.iter().zip(hv.iter()).map(|(a, b)| a.conj() * b).sum();
    let den: C64 = v.iter().map(|a| a.conj() * a).sum();
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_recovers_pure_mode() {
        // f(ξ) = 3 + 2 cos(2π·2 j/M) has coefficients c0 = 3, c±2 = 1
        let m = 64;
        let samples: Vec<f64> = (0..m)
            .map(|j| 3.0 + 2.0 * (2.0 * core::f64::consts::PI * 2.0 * j as f64 / m as f64).cos())
            .collect();
        let h = dft_coeffs(&samples, 4);
        let at = |d: i64| h[(d + 8) as usize];
        assert!((at(0) - C64::new(3.0, 0.0)).norm() < 1e-12);
        assert!((at(2) - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((at(-2) - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(at(1).norm() < 1e-12);
    }
}
