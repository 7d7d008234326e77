//! Numerical checks of the q-numerical range lemmas: the lower bound
//! `w_q ≥ min{w_0, w_r}`, the Hausdorff continuity bound, convexity in `q`,
//! conjugation symmetry of `w_C` and constancy of rank-one profiles.

use rand::Rng;
use serde::Serialize;

use super::{c_numerical_radius, q_disc, q_member, q_numerical_radius, q_profile, CWeight, QParam};
use crate::error::{Error, Result};
use crate::linalg::random::{stream_rng, unit_vector};
use crate::linalg::{cis, spectral_data, CMatrix, C64};
use crate::region::{hausdorff, max_nn_spacing};

pub const LWQ_TOL: f64 = 1e-6;
/// `|w_0 − w_r|` above which strict inequality is required.
pub const LWQ_STRICT_GAP: f64 = 1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct LwqReport {
    pub q: f64,
    pub r: f64,
    pub w0: f64,
    pub wq: f64,
    pub wr: f64,
    /// `min{w_0, w_r} − w_q`.
    pub violation: f64,
    pub strictness_checked: bool,
    pub strict: bool,
    pub pass: bool,
}

/// Checks `w_q(C) ≥ min{w_0(C), w_r(C)}` for `0 < q < r ≤ 1`, with strict
/// inequality required when `|w_0 − w_r| > 1e-4`.
pub fn check_lwq<R: Rng + ?Sized>(c: &CMatrix, q: QParam, r: QParam, rng: &mut R) -> Result<LwqReport> {
    let w0 = q_numerical_radius(c, QParam(0.0), rng);
    check_lwq_with_w0(c, w0, q, r, rng)
}

/// As `check_lwq` with `w_0(C)` supplied by the caller.
pub fn check_lwq_with_w0<R: Rng + ?Sized>(
    c: &CMatrix,
    w0: f64,
    q: QParam,
    r: QParam,
    rng: &mut R,
) -> Result<LwqReport> {
    if !(q.value() > 0.0 && q.value() < r.value()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < q < r <= 1, got q = {}, r = {}",
            q.value(),
            r.value()
        )));
    }
    let wq = q_numerical_radius(c, q, rng);
    let wr = q_numerical_radius(c, r, rng);
    let floor = w0.min(wr);
    let violation = floor - wq;
    let strictness_checked = (w0 - wr).abs() > LWQ_STRICT_GAP;
    let strict = wq > floor + LWQ_TOL;
    let pass = violation <= LWQ_TOL && (!strictness_checked || strict);
    Ok(LwqReport {
        q: q.value(),
        r: r.value(),
        w0,
        wq,
        wr,
        violation,
        strictness_checked,
        strict,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HausdorffReport {
    pub q1: f64,
    pub q2: f64,
    /// Sampled Hausdorff distance between the two point clouds.
    pub distance: f64,
    /// `‖C‖√(δ² + 2δ)` with `δ = |q1 − q2|`.
    pub bound: f64,
    /// Twice the largest nearest-neighbour spacing of either cloud.
    pub slack: f64,
    pub pass: bool,
}

/// Boundary angles sampled on every disc, shared by both ranges.
const DISC_ANGLES: usize = 8;

/// Samples `W_{q1}(C)` and `W_{q2}(C)` as unions of discs generated by the
/// same `samples` unit vectors and compares their Hausdorff distance with
/// `‖C‖√(δ² + 2δ)` plus sampling slack.
pub fn check_hausdorff_bound<R: Rng + ?Sized>(
    c: &CMatrix,
    q1: QParam,
    q2: QParam,
    samples: usize,
    rng: &mut R,
) -> Result<HausdorffReport> {
    let n = c.dim();
    let mut cloud1 = Vec::with_capacity(samples * (DISC_ANGLES + 1));
    let mut cloud2 = Vec::with_capacity(samples * (DISC_ANGLES + 1));
    for _ in 0..samples {
        let x = unit_vector(rng, n);
        let d1 = q_disc(c, &x, q1)?;
        let d2 = q_disc(c, &x, q2)?;
        cloud1.push(d1.center);
        cloud2.push(d2.center);
        for k in 0..DISC_ANGLES {
            let theta = std::f64::consts::TAU * k as f64 / DISC_ANGLES as f64;
            cloud1.push(d1.boundary_point(theta));
            cloud2.push(d2.boundary_point(theta));
        }
    }
    let distance = hausdorff(&cloud1, &cloud2);
    let delta = (q1.value() - q2.value()).abs();
    let bound = c.operator_norm() * (delta * delta + 2.0 * delta).sqrt();
    let slack = 2.0 * max_nn_spacing(&cloud1).max(max_nn_spacing(&cloud2));
    Ok(HausdorffReport {
        q1: q1.value(),
        q2: q2.value(),
        distance,
        bound,
        slack,
        pass: distance <= bound + slack,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MidpointReport {
    pub q1: f64,
    pub q2: f64,
    pub tested: usize,
    pub failures: usize,
    pub min_margin: f64,
    pub pass: bool,
}

/// Margin below which a convex combination counts as a failure.
pub const MIDPOINT_TOL: f64 = 1e-4;

/// Draws `z_i ∈ W_{q_i}(C)` from random discs and tests
/// `t z_1 + (1−t) z_2 ∈ W_{t q_1 + (1−t) q_2}(C)` for `t ∈ {¼, ½, ¾}`.
pub fn check_midpoint_convexity<R: Rng + ?Sized>(
    c: &CMatrix,
    q1: QParam,
    q2: QParam,
    pairs: usize,
    rng: &mut R,
) -> Result<MidpointReport> {
    let n = c.dim();
    let draw = |q: QParam, rng: &mut R| -> Result<C64> {
        let d = q_disc(c, &unit_vector(rng, n), q)?;
        let rho = rng.gen::<f64>().sqrt();
        Ok(d.center + cis(rng.gen_range(0.0..std::f64::consts::TAU)) * (d.radius * rho))
    };
    let mut tested = 0;
    let mut failures = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..pairs {
        let z1 = draw(q1, rng)?;
        let z2 = draw(q2, rng)?;
        for &t in &[0.25, 0.5, 0.75] {
            let z = z1 * t + z2 * (1.0 - t);
            let q = QParam::new(t * q1.value() + (1.0 - t) * q2.value())?;
            let m = q_member(c, q, z, rng);
            tested += 1;
            min_margin = min_margin.min(m.margin);
            if m.margin < -MIDPOINT_TOL {
                failures += 1;
            }
        }
    }
    Ok(MidpointReport {
        q1: q1.value(),
        q2: q2.value(),
        tested,
        failures,
        min_margin,
        pass: failures == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationReport {
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    /// Which sufficient condition on `C` was detected, if any.
    pub hypothesis: Option<&'static str>,
    /// Only decided when a hypothesis holds.
    pub pass: Option<bool>,
}

pub const CONJUGATION_TOL: f64 = 1e-6;

/// Compares `w_C(X)` with `w_C(X̄)`. Equality is asserted when `C` is a rank
/// one normal operator or a normal operator whose spectrum is closed under
/// conjugation (so `C` is unitarily similar to `C̄`).
pub fn conjugation_symmetry_wc<R: Rng + ?Sized>(
    c: &CWeight,
    x: &CMatrix,
    rng: &mut R,
) -> Result<ConjugationReport> {
    let seed: u64 = rng.gen();
    let lhs = c_numerical_radius(x, c, &mut stream_rng(seed, 0))?.value;
    let rhs = c_numerical_radius(&x.conjugate(), c, &mut stream_rng(seed, 0))?.value;
    let hypothesis = conjugation_hypothesis(c.matrix())?;
    let difference = (lhs - rhs).abs();
    Ok(ConjugationReport {
        lhs,
        rhs,
        difference,
        hypothesis,
        pass: hypothesis.map(|_| difference <= CONJUGATION_TOL),
    })
}

pub(crate) fn conjugation_hypothesis(c: &CMatrix) -> Result<Option<&'static str>> {
    if !c.is_normal(1e-10 * c.frobenius_norm().max(1.0)) {
        return Ok(None);
    }
    if c.rank() == 1 {
        return Ok(Some("rank-one normal"));
    }
    let eig = spectral_data(c)?.eigenvalues;
    let mut remaining: Vec<C64> = eig.iter().map(|z| z.conj()).collect();
    let tol = 1e-8 * c.operator_norm().max(1.0);
    for z in &eig {
        match remaining.iter().position(|w| (w - z).norm() <= tol) {
            Some(i) => {
                remaining.swap_remove(i);
            }
            None => return Ok(None),
        }
    }
    Ok(Some("normal with conjugation-symmetric spectrum"))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantLemmaReport {
    /// `max_h |F(u⊗h) − F(v⊗h)|` over the sampled unit `h`.
    pub max_pair_difference: f64,
    pub hypothesis_met: bool,
    /// `max − min` of the unit rank-one profile, computed when the
    /// hypothesis holds.
    pub profile_spread: Option<f64>,
    pub pass: Option<bool>,
}

pub const CONSTANT_LEMMA_TOL: f64 = 2e-5;

/// For `F(x⊗f) = w_C(x⊗f) = ‖x‖‖f‖·w_q(C)` with `q = |⟨x,f⟩|/(‖x‖‖f‖)`:
/// if `F(u⊗h) = F(v⊗h)` for every sampled unit `h` (independent unit `u`,
/// `v`), the unit rank-one profile must be constant.
pub fn check_constant_profile_lemma<R: Rng + ?Sized>(
    c: &CMatrix,
    h_samples: usize,
    rng: &mut R,
) -> Result<ConstantLemmaReport> {
    let n = c.dim();
    let u = unit_vector(rng, n);
    let v = unit_vector(rng, n);
    let mut max_pair_difference: f64 = 0.0;
    for _ in 0..h_samples {
        let h = unit_vector(rng, n);
        let fu = q_numerical_radius(c, QParam::new(u.inner(&h).norm().min(1.0))?, rng);
        let fv = q_numerical_radius(c, QParam::new(v.inner(&h).norm().min(1.0))?, rng);
        max_pair_difference = max_pair_difference.max((fu - fv).abs());
    }
    let hypothesis_met = max_pair_difference <= CONSTANT_LEMMA_TOL;
    let profile_spread = if hypothesis_met {
        Some(q_profile(c, 21, rng)?.spread())
    } else {
        None
    };
    Ok(ConstantLemmaReport {
        max_pair_difference,
        hypothesis_met,
        profile_spread,
        pass: profile_spread.map(|s| s <= CONSTANT_LEMMA_TOL),
    })
}
