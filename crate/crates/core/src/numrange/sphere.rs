//! Projected-gradient ascent on the unit sphere of ℂⁿ for the q-numerical
//! radius and q-numerical range membership.
//!
//! Both objectives are built from `a = x^H C x` and `b = ‖Cx‖²`. Gradients
//! are returned in the complex form `G = 2∂f/∂x̄`, so that the directional
//! derivative along `d` is `Re(d^H G)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::linalg::random::{stream_rng, unit_vector};
use crate::linalg::{c64, cis, hermitian_eigenvectors, CMatrix, C64};

/// Settings for the restarted sphere ascent.
#[derive(Clone, Copy, Debug)]
pub struct SphereOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for SphereOptions {
    fn default() -> Self {
        SphereOptions {
            restarts: 64,
            max_iter: 2000,
            grad_tol: 1e-7,
        }
    }
}

/// Best point found by the ascent.
#[derive(Clone, Debug)]
pub struct SphereOptimum {
    pub value: f64,
    pub x: DVector<C64>,
}

/// Quantities shared by both objectives at a point `x`.
struct Moments {
    cx: DVector<C64>,
    chx: DVector<C64>,
    a: C64,
    /// `‖Cx − a x‖² = b − |a|²` on the sphere, without cancellation.
    spread: f64,
}

/// Below this value `b − |a|²` is treated as zero and its square root as
/// nondifferentiable.
const DEGENERATE: f64 = 1e-14;

/// Sufficient-increase constant. Small values let doubled steps overshoot and
/// zigzag across the maximum.
const ARMIJO: f64 = 0.3;

pub(crate) struct QObjective<'a> {
    c: &'a DMatrix<C64>,
    ch: DMatrix<C64>,
    q: f64,
    s: f64,
    /// Membership target; `None` maximizes `q|a| + s√(b − |a|²)`.
    target: Option<C64>,
}

impl<'a> QObjective<'a> {
    pub(crate) fn radius(c: &'a CMatrix, q: f64) -> Self {
        Self::build(c, q, None)
    }

    pub(crate) fn membership(c: &'a CMatrix, q: f64, z: C64) -> Self {
        Self::build(c, q, Some(z))
    }

    fn build(c: &'a CMatrix, q: f64, target: Option<C64>) -> Self {
        QObjective {
            c: c.as_matrix(),
            ch: c.as_matrix().adjoint(),
            q,
            s: (1.0 - q * q).max(0.0).sqrt(),
            target,
        }
    }

    fn moments(&self, x: &DVector<C64>) -> Moments {
        let cx = self.c * x;
        let a = x.dotc(&cx);
        let chx = &self.ch * x;
        let spread = (&cx - x * a).norm_squared();
        Moments { cx, chx, a, spread }
    }

    fn value_of(&self, m: &Moments) -> f64 {
        let d = m.spread;
        match self.target {
            None => self.q * m.a.norm() + self.s * d.sqrt(),
            Some(z) => self.s * d.sqrt() - (z - m.a * self.q).norm(),
        }
    }

    pub(crate) fn value(&self, x: &DVector<C64>) -> f64 {
        self.value_of(&self.moments(x))
    }

    fn value_grad(&self, x: &DVector<C64>) -> (f64, DVector<C64>) {
        let m = self.moments(x);
        let value = self.value_of(&m);
        // 2∂|a|²/∂x̄ / 2 = ā Cx + a C^H x
        let mix = &m.cx * m.a.conj() + &m.chx * m.a;
        let mut g = DVector::zeros(x.len());
        let d = m.spread;
        if self.s > 0.0 && d > DEGENERATE {
            let chcx = &self.ch * &m.cx;
            g += (chcx - &mix) * c64(self.s / d.sqrt(), 0.0);
        }
        match self.target {
            None => {
                let na = m.a.norm();
                if self.q > 0.0 && na > DEGENERATE {
                    g += &mix * c64(self.q / na, 0.0);
                }
            }
            Some(z) => {
                let dz = z - m.a * self.q;
                let nd = dz.norm();
                if self.q > 0.0 && nd > DEGENERATE {
                    g += (&m.cx * dz.conj() + &m.chx * dz) * c64(self.q / nd, 0.0);
                }
            }
        }
        (value, g)
    }
}

fn normalize(v: DVector<C64>) -> DVector<C64> {
    let n = v.norm();
    v / c64(n, 0.0)
}

/// Armijo-backtracked projected gradient ascent from `x0`. Stops early once
/// the value reaches `stop_at`.
fn ascend(obj: &QObjective<'_>, x0: DVector<C64>, opts: &SphereOptions, stop_at: f64) -> SphereOptimum {
    let mut x = normalize(x0);
    let (mut f, mut grad) = obj.value_grad(&x);
    let scale = obj.c.norm().max(1e-300);
    let mut tau = 1.0 / scale;
    for _ in 0..opts.max_iter {
        if f >= stop_at {
            break;
        }
        let radial = x.dotc(&grad).re;
        let g = &grad - &x * c64(radial, 0.0);
        let gn2 = g.norm_squared();
        if gn2.sqrt() <= opts.grad_tol * scale.max(1.0) {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let xn = normalize(&x + &g * c64(tau, 0.0));
            let fn_ = obj.value(&xn);
            if fn_ >= f + ARMIJO * tau * gn2 {
                x = xn;
                accepted = true;
                tau *= 2.0;
                break;
            }
            tau *= 0.5;
            if tau < 1e-18 {
                break;
            }
        }
        if !accepted {
            break;
        }
        let (fv, gv) = obj.value_grad(&x);
        f = fv;
        grad = gv;
    }
    SphereOptimum { value: f, x }
}

/// Deterministic starting points: top eigenvectors of `Re(e^{-iθ}C)` for
/// eight angles and the standard basis.
fn structured_starts(c: &CMatrix) -> Vec<DVector<C64>> {
    let n = c.dim();
    let mut starts = Vec::new();
    for k in 0..8 {
        let theta = std::f64::consts::TAU * k as f64 / 8.0;
        let (_, vecs) = hermitian_eigenvectors(c.rotated_hermitian_part(theta));
        starts.push(vecs.column(0).into_owned());
    }
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = c64(1.0, 0.0);
        starts.push(e);
    }
    let mut all_equal = DVector::from_element(n, c64(1.0, 0.0));
    for (i, z) in all_equal.iter_mut().enumerate() {
        *z = cis(0.7 * i as f64);
    }
    starts.push(all_equal);
    starts
}

/// Maximizes `obj` over the sphere from structured and random starts. The
/// random restarts draw from streams of a single seed taken from `rng`.
pub(crate) fn maximize<R: Rng + ?Sized>(
    c: &CMatrix,
    obj: &QObjective<'_>,
    opts: &SphereOptions,
    stop_at: f64,
    rng: &mut R,
) -> SphereOptimum {
    let n = c.dim();
    let seed: u64 = rng.gen();
    let mut best: Option<SphereOptimum> = None;
    let structured = structured_starts(c);
    let randoms = (0..opts.restarts).map(|k| unit_vector(&mut stream_rng(seed, k as u64), n).into_inner());
    for x0 in structured.into_iter().chain(randoms) {
        let r = ascend(obj, x0, opts, stop_at);
        let better = best.as_ref().is_none_or(|b| r.value > b.value);
        if better {
            best = Some(r);
        }
        if best.as_ref().unwrap().value >= stop_at {
            break;
        }
    }
    best.expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{gaussian_matrix, gaussian_vector, seeded};

    /// Compares the tangential derivative along `d` at unit `x` with a
    /// central difference along the curve `normalize(x + h d)`.
    fn finite_difference_check(obj: &QObjective<'_>, x: &DVector<C64>, d: &DVector<C64>) {
        let x = normalize(x.clone());
        let d = d - &x * c64(x.dotc(d).re, 0.0);
        let h = 1e-6;
        let (_, g) = obj.value_grad(&x);
        let at = |t: f64| obj.value(&normalize(&x + &d * c64(t, 0.0)));
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let an = d.dotc(&g).re;
        assert!((fd - an).abs() < 1e-6 * (1.0 + an.abs()), "fd {fd} vs analytic {an}");
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = seeded(11);
        let c = gaussian_matrix(&mut rng, 4);
        for &q in &[0.0, 0.3, 0.8, 1.0] {
            let x = gaussian_vector(&mut rng, 4).into_inner();
            let d = gaussian_vector(&mut rng, 4).into_inner();
            finite_difference_check(&QObjective::radius(&c, q), &x, &d);
            finite_difference_check(&QObjective::membership(&c, q, c64(0.3, -0.2)), &x, &d);
        }
    }
}
