//! Seeded random matrices and vectors.
//!
//! Every generator takes the caller's RNG; `stream_rng` derives independent,
//! order-free streams from a master seed so parallel trials stay reproducible.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{c64, cis, CMatrix, CVector, RankOne, C64};

pub type SpecRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SpecRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` under master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SpecRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f(rng_k, k)` for `k < trials` in parallel, each on stream `k` of
/// `seed`. Results come back in trial order.
pub fn par_trials<T, F>(seed: u64, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SpecRng, usize) -> T + Sync,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|k| f(&mut stream_rng(seed, k as u64), k))
        .collect()
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_raw(gaussian_rect(rng, n, n))
}

pub(crate) fn gaussian_rect<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    // column-major fill keeps the stream layout independent of nalgebra internals
    let data: Vec<C64> = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    DMatrix::from_vec(rows, cols, data)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    let data: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    CVector::from_raw(DVector::from_vec(data))
}

/// Uniformly distributed point on the unit sphere of ℂⁿ.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = gaussian_vector(rng, n);
        if v.norm() > 1e-8 {
            return v.normalized().expect("nonzero");
        }
    }
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// diagonal of R rotated to be positive.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_rect(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    CMatrix::from_raw(q)
}

/// `n×k` matrix with orthonormal columns, Haar distributed.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> DMatrix<C64> {
    let u = haar_unitary(rng, n);
    u.as_matrix().columns(0, k).into_owned()
}

pub fn rank_one<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RankOne {
    RankOne {
        left: gaussian_vector(rng, n),
        right: gaussian_vector(rng, n),
    }
}

/// Unit-norm rank-one operator `u⊗v` with `|⟨u,v⟩| = q`.
pub fn unit_rank_one_with_overlap<R: Rng + ?Sized>(rng: &mut R, n: usize, q: f64) -> RankOne {
    let u = haar_unitary(rng, n);
    let e0 = CVector::from_raw(u.as_matrix().column(0).into_owned());
    let e1 = CVector::from_raw(u.as_matrix().column(1).into_owned());
    let s = (1.0 - q * q).max(0.0).sqrt();
    let phase = cis(rng.gen_range(0.0..std::f64::consts::TAU));
    let v = e0.scale(c64(q, 0.0) * phase).add(&e1.scale(c64(s, 0.0)));
    RankOne { left: e0, right: v }
}

/// Product of Gaussian `n×r` and `r×n` factors; rank `min(r, n)` almost surely.
pub fn rank_r_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, r: usize) -> CMatrix {
    let a = gaussian_rect(rng, n, r);
    let b = gaussian_rect(rng, r, n);
    CMatrix::from_raw(a * b)
}

/// `U D U^H` with Haar `U` and complex Gaussian diagonal `D`.
pub fn normal_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let d: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    let u = haar_unitary(rng, n);
    let m = u.as_matrix() * CMatrix::from_diagonal(&d).as_matrix() * u.as_matrix().adjoint();
    CMatrix::from_raw(m)
}

pub fn hermitian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_rect(rng, n, n);
    CMatrix::from_raw((&g + g.adjoint()) * c64(0.5, 0.0))
}

/// Uniform point on the unit circle.
pub fn unit_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    cis(rng.gen_range(0.0..std::f64::consts::TAU))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_unitary() {
        let mut rng = seeded(1);
        for n in 1..7 {
            assert!(haar_unitary(&mut rng, n).is_unitary(1e-12));
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = gaussian_vector(&mut stream_rng(5, 3), 4);
        let b = gaussian_vector(&mut stream_rng(5, 3), 4);
        let c = gaussian_vector(&mut stream_rng(5, 4), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn overlap_construction() {
        let mut rng = seeded(2);
        for &q in &[0.0, 0.3, 1.0] {
            let r = unit_rank_one_with_overlap(&mut rng, 4, q);
            assert!((r.left.norm() - 1.0).abs() < 1e-12);
            assert!((r.right.norm() - 1.0).abs() < 1e-12);
            assert!((r.trace().norm() - q).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_and_rank() {
        let mut rng = seeded(3);
        assert!(normal_matrix(&mut rng, 5).is_normal(1e-10));
        assert_eq!(rank_r_matrix(&mut rng, 5, 2).rank(), 2);
        assert!(hermitian_matrix(&mut rng, 4).is_hermitian(1e-14));
    }
}
