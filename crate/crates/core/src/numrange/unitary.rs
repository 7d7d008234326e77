//! Riemannian ascent over the unitary group for
//! `w_C(A) = max_U |tr(C U A U^*)|`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::linalg::random::{haar_unitary, stream_rng};
use crate::linalg::{c64, hermitian_eigenvectors, CMatrix, C64};

#[derive(Clone, Copy, Debug)]
pub struct UnitaryOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for UnitaryOptions {
    fn default() -> Self {
        UnitaryOptions {
            restarts: 32,
            max_iter: 1500,
            grad_tol: 1e-10,
        }
    }
}

/// `exp(τΩ)` for skew-Hermitian `Ω`, through the eigendecomposition of the
/// Hermitian matrix `iΩ`.
fn skew_exp(omega: &DMatrix<C64>, tau: f64) -> DMatrix<C64> {
    let k = omega * c64(0.0, 1.0);
    let k = (&k + k.adjoint()) * c64(0.5, 0.0);
    let (vals, vecs) = hermitian_eigenvectors(k);
    let n = vals.len();
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(1.0, -tau * vals[i])
        } else {
            c64(0.0, 0.0)
        }
    });
    &vecs * phases * vecs.adjoint()
}

/// Gradient ascent of `|g|²`, `g = tr(C M)`, along the orbit `M = UAU^*`
/// from a starting unitary. Returns `|g|` at the final point.
fn ascend_orbit(a: &DMatrix<C64>, c: &DMatrix<C64>, u0: &DMatrix<C64>, opts: &UnitaryOptions) -> f64 {
    let mut m = u0 * a * u0.adjoint();
    let value = |m: &DMatrix<C64>| (c * m).trace().norm_sqr();
    let mut f = value(&m);
    let scale = (c.norm() * a.norm()).max(1e-300);
    let mut tau = 1.0 / (scale * scale);
    for _ in 0..opts.max_iter {
        let g = (c * &m).trace();
        let grad = &m * c - c * &m;
        let omega = (grad.adjoint() * g - &grad * g.conj()) * c64(0.5, 0.0);
        let on2 = omega.norm_squared();
        if on2.sqrt() <= opts.grad_tol * scale * scale {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let e = skew_exp(&omega, tau);
            let mn = &e * &m * e.adjoint();
            let fn_ = value(&mn);
            if fn_ >= f + 1e-4 * tau * 2.0 * on2 {
                m = mn;
                f = fn_;
                tau *= 2.0;
                accepted = true;
                break;
            }
            tau *= 0.5;
            if tau < 1e-30 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    f.sqrt()
}

/// Lower bound on `w_C(A)` from restarted orbit ascent (identity start plus
/// `restarts` Haar-random starts from streams of one seed drawn from `rng`).
pub fn c_radius_ascent<R: Rng + ?Sized>(
    a: &CMatrix,
    c: &CMatrix,
    opts: &UnitaryOptions,
    rng: &mut R,
) -> f64 {
    let n = a.dim();
    let seed: u64 = rng.gen();
    let mut best = ascend_orbit(a.as_matrix(), c.as_matrix(), &DMatrix::identity(n, n), opts);
    for k in 0..opts.restarts {
        let u = haar_unitary(&mut stream_rng(seed, k as u64), n);
        best = best.max(ascend_orbit(a.as_matrix(), c.as_matrix(), u.as_matrix(), opts));
    }
    best
}
