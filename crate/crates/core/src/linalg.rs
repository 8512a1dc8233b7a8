//! Small fixed-size linear algebra and polynomial root kernels.
//!
//! Everything here is 2x2/3x3 or a low-degree polynomial; dense general-purpose
//! routines exist only where the Fourier cross-check needs a complex solve.

use crate::{Error, Result};
#[allow(unused_imports)]
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

pub type V3 = [f64; 3];
pub type M3 = [[f64; 3]; 3];

pub fn add3(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale3(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot3(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: V3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn matvec3(m: &M3, v: V3) -> V3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn matmul3(a: &M3, b: &M3) -> M3 {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for (k, bk) in b.iter().enumerate() {
                r[i][j] += a[i][k] * bk[j];
            }
        }
    }
    r
}

pub fn det3(m: &M3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse via the adjugate; errors when |det| is below the cutoff.
pub fn inv3(m: &M3, det_cutoff: f64) -> Result<M3> {
    let d = det3(m);
    if d.abs() <= det_cutoff {
        return Err(Error::SingularTransform { det: d });
    }
    let c = |i: usize, j: usize| -> f64 {
        let (r0, r1) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (c0, c1) = match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    };
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = c(j, i) / d;
        }
    }
    Ok(inv)
}

/// Coefficients (c2, c1, c0) of det(lambda I - M) = lambda^3 + c2 lambda^2 + c1 lambda + c0.
pub fn char_poly3(m: &M3) -> (f64, f64, f64) {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2] - m[1][2] * m[2][1];
    (-tr, m2, -det3(m))
}

fn ccbrt(z: C64) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return z;
    }
    let (r, th) = z.to_polar();
    C64::from_polar(r.powf(1.0 / 3.0), th / 3.0)
}

/// Roots of z^3 + a z^2 + b z + c with complex coefficients.
///
/// Cardano on the depressed cubic, branch chosen to avoid cancellation, then
/// one round of Newton polish per root.
pub fn cubic_roots(a: C64, b: C64, c: C64) -> [C64; 3] {
    let third = 1.0 / 3.0;
    let p = b - a * a * third;
    let q = a * a * a * (2.0 / 27.0) - a * b * third + c;
    let half_q = q * 0.5;
    let disc = half_q * half_q + p * p * p / 27.0;
    let sq = disc.sqrt();
    // pick the branch with the larger |u^3| for stability
    let u3a = -half_q + sq;
    let u3b = -half_q - sq;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let mut roots = [C64::new(0.0, 0.0); 3];
    if u3.norm() == 0.0 {
        // triple root of the depressed cubic at 0
        for r in roots.iter_mut() {
            *r = -a * third;
        }
        return roots;
    }
    let u = ccbrt(u3);
    let omega = C64::new(-0.5, 0.75f64.sqrt());
    let mut uk = u;
    for rk in roots.iter_mut() {
        let t = uk - p / (uk * 3.0);
        *rk = t - a * third;
        uk *= omega;
    }
    // Newton polish on the original cubic
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let f = ((*r + a) * *r + b) * *r + c;
            let df = (*r * 3.0 + a * 2.0) * *r + b;
            if df.norm() > 0.0 {
                let step = f / df;
                if step.norm().is_finite() {
                    *r -= step;
                }
            }
        }
    }
    roots
}

/// Roots of a real-coefficient cubic, sorted by real part then imaginary part.
pub fn cubic_roots_real(a: f64, b: f64, c: f64) -> [C64; 3] {
    let mut r = cubic_roots(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0));
    // real-coefficient cubic: snap conjugate-pair artifacts
    for z in r.iter_mut() {
        if z.im.abs() < 1e-14 * (1.0 + z.re.abs()) {
            z.im = 0.0;
        }
    }
    r.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    r
}

/// Solve a dense real n x n system in place by Gaussian elimination with
/// partial pivoting. `a` is row-major n*n, `b` length n; the solution lands in `b`.
pub fn solve_dense(n: usize, a: &mut [f64], b: &mut [f64]) -> Result<()> {
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if a[i * n + k].abs() > a[piv * n + k].abs() {
                piv = i;
            }
        }
        if a[piv * n + k].abs() < 1e-300 {
            return Err(Error::SingularTransform { det: 0.0 });
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            b.swap(k, piv);
        }
        for i in k + 1..n {
            let f = a[i * n + k] / a[k * n + k];
            a[i * n + k] = 0.0;
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
            b[i] -= f * b[k];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i * n + j] * b[j];
        }
        b[i] = s / a[i * n + i];
    }
    Ok(())
}

/// Dense complex LU with partial pivoting; factors stored in place.
pub struct LuC64 {
    n: usize,
    lu: Vec<C64>,
    piv: Vec<usize>,
}

impl LuC64 {
    pub fn factor(n: usize, a: Vec<C64>) -> Result<Self> {
        let mut lu = a;
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if lu[i * n + k].norm() > lu[p * n + k].norm() {
                    p = i;
                }
            }
            if lu[p * n + k].norm() < 1e-300 {
                return Err(Error::SingularTransform { det: 0.0 });
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let t = f * lu[k * n + j];
                    lu[i * n + j] -= t;
                }
            }
        }
        Ok(LuC64 { n, lu, piv })
    }

    pub fn solve(&self, b: &mut [C64]) {
        let n = self.n;
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            for i in k + 1..n {
                let t = self.lu[i * n + k] * bk;
                b[i] -= t;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s / self.lu[i * n + i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m: M3 = [[2.0, 1.0, 0.5], [-1.0, 3.0, 0.0], [0.25, 0.0, 1.5]];
        let mi = inv3(&m, 1e-12).unwrap();
        let id = matmul3(&m, &mi);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[i][j] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cubic_known_roots() {
        // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
        let r = cubic_roots_real(-6.0, 11.0, -6.0);
        assert!((r[0].re - 1.0).abs() < 1e-12);
        assert!((r[1].re - 2.0).abs() < 1e-12);
        assert!((r[2].re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_conjugate_pair() {
        // z(z^2 + 4): roots 0, +-2i
        let r = cubic_roots_real(0.0, 4.0, 0.0);
        assert!(r[0].norm() < 1e-12 || r[1].norm() < 1e-12);
        let imax = r.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!((imax - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dense_solve_4x4() {
        let mut a = vec![
            4.0, 1.0, 0.0, 2.0, //
            1.0, 3.0, 1.0, 0.0, //
            0.0, 1.0, 2.0, 1.0, //
            2.0, 0.0, 1.0, 5.0,
        ];
        let x_true = [1.0, -2.0, 3.0, 0.5];
        let mut b = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                b[i] += a[i * 4 + j] * x_true[j];
            }
        }
        solve_dense(4, &mut a, &mut b).unwrap();
        for i in 0..4 {
            assert!((b[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_lu_solve() {
        let n = 3;
        let a: Vec<C64> = [
            (2.0, 1.0),
            (0.5, -0.25),
            (0.0, 0.0),
            (1.0, 0.0),
            (3.0, -1.0),
            (0.5, 0.5),
            (0.0, 2.0),
            (0.0, 0.0),
            (1.5, 0.5),
        ]
        .iter()
        .map(|&(r, i)| C64::new(r, i))
        .collect();
        let x_true: Vec<C64> = vec![C64::new(1.0, -1.0), C64::new(0.5, 2.0), C64::new(-3.0, 0.25)];
        let mut b = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                b[i] += a[i * n + j] * x_true[j];
            }
        }
        let lu = LuC64::factor(n, a).unwrap();
        lu.solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x_true[i]).norm() < 1e-12);
        }
    }
}
