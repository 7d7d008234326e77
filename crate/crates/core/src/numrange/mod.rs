//! Classical, k-, q- and C-numerical ranges and radii.
//!
//! `W_q(C)` is handled through its disc-union form: for unit `x` the set of
//! `⟨Cx, y⟩` with unit `y`, `⟨x, y⟩ = q` is the closed disc centred at
//! `q·x^H C x` with radius `√(1−q²)·√(‖Cx‖² − |x^H C x|²)`.

mod checks;
mod sphere;
mod unitary;

use rand::Rng;
use serde::Serialize;

pub use checks::{
    check_constant_profile_lemma, check_hausdorff_bound, check_lwq, check_lwq_with_w0, check_midpoint_convexity,
    conjugation_symmetry_wc, ConjugationReport, ConstantLemmaReport, HausdorffReport, LwqReport, MidpointReport,
    CONJUGATION_TOL, CONSTANT_LEMMA_TOL, LWQ_STRICT_GAP, LWQ_TOL, MIDPOINT_TOL,
};
pub(crate) use checks::conjugation_hypothesis;
pub use sphere::{SphereOptimum, SphereOptions};
pub use unitary::{c_radius_ascent, UnitaryOptions};

use crate::error::{Error, Result};
use crate::linalg::random::{haar_unitary, stream_rng, unit_vector};
use crate::linalg::{c64, cis, hermitian_eigenvalues_desc, CMatrix, CVector, RankOne, STRUCTURE_TOL, C64};
use crate::region::{convex_hull, disc_union_distance, Disc, GridSpec, Region};
use crate::sweep::maximize_angle;
use sphere::QObjective;

/// Angles in the support-function sweeps.
pub const RADIUS_SWEEP_ANGLES: usize = 1024;

/// `q ∈ [0, 1]`; complex parameters reduce to `|q|` because
/// `W_{qz}(C) = z·W_q(C)` for unit `z`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<QParam> {
        if (0.0..=1.0).contains(&q) {
            Ok(QParam(q))
        } else {
            Err(Error::InvalidParameter(format!("q must lie in [0, 1], got {q}")))
        }
    }

    /// Splits a complex `q` with `|q| ≤ 1` into `|q|` and its phase.
    pub fn from_complex(q: C64) -> Result<(QParam, f64)> {
        let m = q.norm();
        let phase = if m > 0.0 { q.arg() } else { 0.0 };
        Ok((QParam::new(m)?, phase))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `√(1 − q²)`.
    pub fn complement(self) -> f64 {
        (1.0 - self.0 * self.0).max(0.0).sqrt()
    }
}

/// Weight matrix `C` for `W_C`, with Hermitian structure detected once.
#[derive(Clone, Debug)]
pub struct CWeight {
    matrix: CMatrix,
    hermitian: bool,
    /// `φ` with `e^{-iφ}C` Hermitian, when such a phase exists.
    hermitian_phase: Option<f64>,
}

impl CWeight {
    pub fn new(matrix: CMatrix) -> CWeight {
        let hermitian = matrix.is_hermitian(STRUCTURE_TOL);
        let hermitian_phase = if hermitian {
            Some(0.0)
        } else {
            hermitian_phase(&matrix)
        };
        CWeight {
            matrix,
            hermitian,
            hermitian_phase,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// True when `C = e^{iφ}H` with `H` Hermitian.
    pub fn is_hermitian_up_to_phase(&self) -> bool {
        self.hermitian_phase.is_some()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Phase `φ` with `e^{-iφ}C` Hermitian. From `C^* = e^{-2iφ}C`, the factor is
/// `conj(tr C²)/‖C‖²_F`.
fn hermitian_phase(c: &CMatrix) -> Option<f64> {
    let fro2 = c.frobenius_norm().powi(2);
    if fro2 == 0.0 {
        return Some(0.0);
    }
    let rho = (c * c).trace().conj() / fro2;
    if (rho.norm() - 1.0).abs() > 1e-8 {
        return None;
    }
    let phi = -0.5 * rho.arg();
    let h = c.scale(cis(-phi));
    h.is_hermitian(STRUCTURE_TOL).then_some(phi)
}

/// `w(A) = max_θ λ_max(Re(e^{-iθ}A))`.
pub fn numerical_radius(a: &CMatrix) -> f64 {
    k_sum_sweep(a, 1)
}

/// `w_k(A) = max_θ Σ_{i≤k} λ_i↓(Re(e^{-iθ}A))`, valid because `W_k(A)` is
/// convex.
pub fn k_numerical_radius(a: &CMatrix, k: usize) -> Result<f64> {
    if k == 0 || k > a.dim() {
        return Err(Error::InvalidParameter(format!(
            "k must lie in 1..={}, got {k}",
            a.dim()
        )));
    }
    if k == a.dim() {
        return Ok(a.trace().norm());
    }
    Ok(k_sum_sweep(a, k))
}

fn k_sum_sweep(a: &CMatrix, k: usize) -> f64 {
    let weights: Vec<f64> = (0..a.dim()).map(|i| if i < k { 1.0 } else { 0.0 }).collect();
    richter_sweep(a, &weights)
}

/// `max_θ Σ_i w_i λ_i↓(Re(e^{-iθ}A))` with weights sorted descending.
fn richter_sweep(a: &CMatrix, weights: &[f64]) -> f64 {
    let support = |theta: f64| {
        let ev = hermitian_eigenvalues_desc(a.rotated_hermitian_part(theta));
        weights.iter().zip(ev.iter()).map(|(w, l)| w * l).sum::<f64>()
    };
    maximize_angle(support, RADIUS_SWEEP_ANGLES, 3, 1e-10).1.max(0.0)
}

/// The disc of `W_q(C)` generated by the unit vector `x`.
pub fn q_disc(c: &CMatrix, x: &CVector, q: QParam) -> Result<Disc> {
    if x.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: x.dim(),
        });
    }
    let nx = x.norm();
    if (nx - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit(nx));
    }
    let cx = c.apply(x);
    let a = cx.inner(x);
    let b = cx.norm().powi(2);
    let radius = q.complement() * (b - a.norm_sqr()).max(0.0).sqrt();
    Disc::new(a * q.value(), radius)
}

/// `w_q(C)`. Rank-one `C` goes through `rank_one_q_radius`; otherwise the
/// best value of `q|x^H C x| + √(1−q²)√(‖Cx‖² − |x^H C x|²)` over unit `x`
/// found by restarted projected-gradient ascent.
pub fn q_numerical_radius<R: Rng + ?Sized>(c: &CMatrix, q: QParam, rng: &mut R) -> f64 {
    if let Ok(r) = RankOne::from_matrix(c) {
        return rank_one_q_radius(&r, q);
    }
    q_numerical_radius_with(c, q, &SphereOptions::default(), rng).value
}

/// `w_q(u⊗v) = (‖u‖‖v‖ + q|⟨u,v⟩| + √(1−q²)√(‖u‖²‖v‖² − |⟨u,v⟩|²)) / 2`.
///
/// `|⟨Cx,y⟩| = |⟨x,v⟩||⟨u,y⟩|`, and the Fubini-Study triangle inequality
/// through `v̂, x, y, û` gives `cos²((δ − γ)/2)` with `cos δ = |⟨û,v̂⟩|`,
/// `cos γ = q`, attained on a projective geodesic.
pub fn rank_one_q_radius(r: &RankOne, q: QParam) -> f64 {
    let (u, v) = (&r.left, &r.right);
    let nu = r.norm();
    let overlap = r.trace().norm().min(nu);
    // ‖u‖‖v − P_u v‖ avoids the cancellation in √(‖u‖²‖v‖² − |⟨u,v⟩|²)
    let nu2 = u.norm().powi(2);
    let perp = if nu2 == 0.0 {
        0.0
    } else {
        u.norm() * v.sub(&u.scale(v.inner(u) / nu2)).norm()
    };
    0.5 * (nu + q.value() * overlap + q.complement() * perp)
}

pub fn q_numerical_radius_with<R: Rng + ?Sized>(
    c: &CMatrix,
    q: QParam,
    opts: &SphereOptions,
    rng: &mut R,
) -> SphereOptimum {
    let obj = QObjective::radius(c, q.value());
    sphere::maximize(c, &obj, opts, f64::INFINITY, rng)
}

/// Unit vectors drawn by `dense_sample_q_radii` in the acceptance suites.
pub const DENSE_SAMPLES: usize = 20000;
/// Largest allowed shortfall of the sphere ascent below dense sampling.
pub const DENSE_AGREEMENT: f64 = 1e-4;

/// Lower bounds for `w_q(C)` at each `q` from the discs of `samples` random
/// unit vectors, independent of the sphere ascent.
pub fn dense_sample_q_radii<R: Rng + ?Sized>(c: &CMatrix, qs: &[QParam], samples: usize, rng: &mut R) -> Vec<f64> {
    let mut best = vec![0.0f64; qs.len()];
    for _ in 0..samples {
        let x = unit_vector(rng, c.dim());
        let cx = c.apply(&x);
        let a = cx.inner(&x).norm();
        let spread = cx.sub(&x.scale(cx.inner(&x))).norm();
        for (b, q) in best.iter_mut().zip(qs) {
            *b = b.max(q.value() * a + q.complement() * spread);
        }
    }
    best
}

/// Outcome of a membership test; `margin` is the best value of
/// `radius(x) − |z − center(x)|`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Membership {
    pub member: bool,
    pub margin: f64,
}

/// Membership tolerance on the optimized margin.
pub const MEMBER_TOL: f64 = 1e-6;

/// `z ∈ W_q(C)` up to `MEMBER_TOL`; stops as soon as a covering disc is found.
pub fn q_member<R: Rng + ?Sized>(c: &CMatrix, q: QParam, z: C64, rng: &mut R) -> Membership {
    let obj = QObjective::membership(c, q.value(), z);
    let best = sphere::maximize(c, &obj, &SphereOptions::default(), 0.0, rng);
    Membership {
        member: best.value >= -MEMBER_TOL,
        margin: best.value,
    }
}

/// Result of `c_numerical_radius`; `exact` is set when the value comes from
/// the eigenvalue sweep rather than an ascent lower bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CRadius {
    pub value: f64,
    pub exact: bool,
}

/// `w_C(A) = max_U |tr(C U A U^*)|`. For `C = e^{iφ}H` with `H` Hermitian,
/// `max_θ Σ λ_i↓(H) λ_i↓(Re(e^{-iθ}A))`; for rank-one `A` through `w_q(C)`;
/// otherwise restarted Riemannian ascent.
pub fn c_numerical_radius<R: Rng + ?Sized>(a: &CMatrix, c: &CWeight, rng: &mut R) -> Result<CRadius> {
    if a.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: a.dim(),
        });
    }
    if let Some(phi) = c.hermitian_phase {
        let h = c.matrix.scale(cis(-phi));
        let weights = hermitian_eigenvalues_desc(h.into_inner());
        return Ok(CRadius {
            value: richter_sweep(a, &weights),
            exact: true,
        });
    }
    if let Ok(r) = RankOne::from_matrix(a) {
        // w_C(x⊗f) = ‖x‖‖f‖ w_q(C) with q = |⟨x,f⟩| / (‖x‖‖f‖)
        let q = QParam::new((r.trace().norm() / r.norm()).min(1.0))?;
        return Ok(CRadius {
            value: r.norm() * q_numerical_radius(&c.matrix, q, rng),
            exact: c.matrix.rank() <= 1,
        });
    }
    Ok(CRadius {
        value: c_radius_ascent(a, &c.matrix, &UnitaryOptions::default(), rng),
        exact: false,
    })
}

/// Samples of `q ↦ w_q(C)` on a uniform grid of `[0, 1]`.
#[derive(Clone, Debug, Serialize)]
pub struct QProfile {
    pub points: Vec<(f64, f64)>,
    pub argmin: usize,
    pub argmax: usize,
}

impl QProfile {
    pub const MIN_POINTS: usize = 21;

    pub fn from_points(points: Vec<(f64, f64)>) -> Result<QProfile> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("profile needs at least two points".into()));
        }
        let argmin = (0..points.len())
            .min_by(|&i, &j| points[i].1.total_cmp(&points[j].1))
            .unwrap();
        let argmax = (0..points.len())
            .max_by(|&i, &j| points[i].1.total_cmp(&points[j].1))
            .unwrap();
        Ok(QProfile {
            points,
            argmin,
            argmax,
        })
    }

    pub fn w0(&self) -> f64 {
        self.points[0].1
    }

    pub fn w1(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }

    /// `max − min` over the grid.
    pub fn spread(&self) -> f64 {
        self.points[self.argmax].1 - self.points[self.argmin].1
    }

    pub fn is_strictly_decreasing(&self, margin: f64) -> bool {
        self.points.windows(2).all(|w| w[1].1 < w[0].1 - margin)
    }

    pub fn is_strictly_increasing(&self, margin: f64) -> bool {
        self.points.windows(2).all(|w| w[1].1 > w[0].1 + margin)
    }

    /// `q,w_q` lines.
    pub fn to_csv(&self) -> String {
        self.points.iter().map(|(q, w)| format!("{q},{w}\n")).collect()
    }
}

/// `w_q(C)` on `grid_size` equally spaced `q` in `[0, 1]`.
pub fn q_profile<R: Rng + ?Sized>(c: &CMatrix, grid_size: usize, rng: &mut R) -> Result<QProfile> {
    if grid_size < QProfile::MIN_POINTS {
        return Err(Error::InvalidParameter(format!(
            "profile grid must have at least {} points, got {grid_size}",
            QProfile::MIN_POINTS
        )));
    }
    let seed: u64 = rng.gen();
    let points = (0..grid_size)
        .map(|i| {
            let q = i as f64 / (grid_size - 1) as f64;
            let w = q_numerical_radius(c, QParam(q), &mut stream_rng(seed, i as u64));
            (q, w)
        })
        .collect();
    QProfile::from_points(points)
}

/// Which hypothesis on the q-profile holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `w_0(C) ≠ w_1(C)`.
    Condition1,
    /// `w_0(C) = w_1(C)` and `w_q(C) > w_0(C)` for interior `q`.
    Condition2,
    Neither,
}

impl Condition {
    pub fn label(&self) -> &'static str {
        match self {
            Condition::Condition1 => "1",
            Condition::Condition2 => "2",
            Condition::Neither => "neither",
        }
    }
}

pub const CONDITION_TOL: f64 = 1e-6;

pub fn classify_condition(profile: &QProfile) -> Condition {
    let (w0, w1) = (profile.w0(), profile.w1());
    if (w0 - w1).abs() > CONDITION_TOL {
        return Condition::Condition1;
    }
    let n = profile.points.len();
    let interior_above = profile.points[1..n - 1]
        .iter()
        .all(|&(_, w)| w > w0 + CONDITION_TOL);
    if interior_above {
        Condition::Condition2
    } else {
        Condition::Neither
    }
}

/// Point cloud of `W_q(C)` from `samples` random discs (centre plus 16
/// boundary points each) with an outline traced on a grid.
pub fn q_range_region<R: Rng + ?Sized>(
    c: &CMatrix,
    q: QParam,
    samples: usize,
    resolution: usize,
    rng: &mut R,
) -> Result<Region> {
    let n = c.dim();
    let discs: Vec<Disc> = (0..samples)
        .map(|_| q_disc(c, &unit_vector(rng, n), q))
        .collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(samples * 17);
    for d in &discs {
        points.push(d.center);
        for k in 0..16 {
            points.push(d.boundary_point(std::f64::consts::TAU * k as f64 / 16.0));
        }
    }
    let half = c.operator_norm().max(1e-3) * 1.05;
    let grid = GridSpec::centered(resolution, c64(0.0, 0.0), half)?;
    let outline = Region::from_field(grid, 0.0, |z| disc_union_distance(&discs, z));
    let mut region = Region::from_points(points, outline.boundary);
    region.grid = Some(grid);
    Ok(region)
}

/// Point cloud of `W_C(A)` from `samples` Haar unitaries, outlined by the
/// convex hull of the samples.
pub fn c_range_region<R: Rng + ?Sized>(
    a: &CMatrix,
    c: &CMatrix,
    samples: usize,
    rng: &mut R,
) -> Result<Region> {
    if a.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: a.dim(),
        });
    }
    let n = a.dim();
    let points: Vec<C64> = (0..samples)
        .map(|_| {
            let u = haar_unitary(rng, n);
            (c * &(&(&u * a) * &u.adjoint())).trace()
        })
        .collect();
    let hull = convex_hull(&points);
    Ok(Region::from_points(points, vec![hull]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{gaussian_vector, seeded};

    fn e12(n: usize) -> CMatrix {
        CMatrix::unit(n, 0, 1)
    }

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    #[test]
    fn numerical_radius_examples() {
        let d = CMatrix::from_real_diagonal(&[2.0, -3.0]);
        assert!((numerical_radius(&d) - 3.0).abs() < 1e-8);
        assert!((numerical_radius(&e12(2)) - 0.5).abs() < 1e-8);
        assert!((numerical_radius(&CMatrix::identity(3)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn k_radius_examples() {
        let d = CMatrix::from_real_diagonal(&[3.0, 2.0, 1.0]);
        assert!((k_numerical_radius(&d, 2).unwrap() - 5.0).abs() < 1e-8);
        let a = CMatrix::from_fn(3, |i, j| c64(i as f64 - j as f64, (i * j) as f64));
        assert!((k_numerical_radius(&a, 3).unwrap() - a.trace().norm()).abs() < 1e-12);
        assert!((k_numerical_radius(&e12(3), 1).unwrap() - 0.5).abs() < 1e-8);
        assert!(k_numerical_radius(&d, 0).is_err());
        assert!(k_numerical_radius(&d, 4).is_err());
    }

    #[test]
    fn q_disc_examples() {
        let x = CVector::from_slice(&[c64(0.6, 0.0), c64(0.0, 0.8), c64(0.0, 0.0)]).unwrap();
        let d = q_disc(&CMatrix::identity(3), &x, q(0.4)).unwrap();
        assert!((d.center - c64(0.4, 0.0)).norm() < 1e-15 && d.radius < 1e-7);

        let d = q_disc(&e12(3), &CVector::basis(3, 1), q(0.0)).unwrap();
        assert!(d.center.norm() < 1e-15 && (d.radius - 1.0).abs() < 1e-15);

        let c = CMatrix::from_fn(3, |i, j| c64(1.0 + i as f64, j as f64 - 0.5));
        let d = q_disc(&c, &x, q(1.0)).unwrap();
        let a = c.apply(&x).inner(&x);
        assert!((d.center - a).norm() < 1e-14 && d.radius == 0.0);

        let not_unit = CVector::from_real(&[1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(q_disc(&c, &not_unit, q(0.5)), Err(Error::NotUnit(_))));
    }

    #[test]
    fn q_radius_examples() {
        let mut rng = seeded(3);
        assert!((q_numerical_radius(&CMatrix::identity(3), q(0.37), &mut rng) - 0.37).abs() < 1e-8);
        let w = q_numerical_radius(&e12(3), q(0.6), &mut rng);
        assert!((w - 0.9).abs() < 1e-7, "{w}");
        assert!((q_numerical_radius(&e12(3), q(0.0), &mut rng) - 1.0).abs() < 1e-7);
        assert!((q_numerical_radius(&e12(3), q(1.0), &mut rng) - 0.5).abs() < 1e-7);
    }

    #[test]
    fn rank_one_radius_matches_ascent() {
        let mut rng = seeded(11);
        for n in 2..6 {
            for k in 0..6 {
                let x = gaussian_vector(&mut rng, n);
                let f = if k == 0 { x.clone() } else { gaussian_vector(&mut rng, n) };
                let r = RankOne::new(x, f).unwrap();
                for qv in [0.0, 0.3, 0.8, 1.0] {
                    let exact = rank_one_q_radius(&r, q(qv));
                    let ascent = q_numerical_radius_with(&r.to_matrix(), q(qv), &SphereOptions::default(), &mut rng).value;
                    assert!((exact - ascent).abs() <= 1e-6 * exact, "n={n} q={qv}: {exact} vs {ascent}");
                }
            }
        }
    }

    #[test]
    fn membership_examples() {
        let mut rng = seeded(5);
        let m = q_member(&CMatrix::identity(3), q(0.3), c64(0.3, 0.0), &mut rng);
        assert!(m.member && m.margin.abs() < 1e-6);
        assert!(q_member(&e12(3), q(0.0), c64(0.99, 0.0), &mut rng).member);
        assert!(!q_member(&e12(3), q(1.0), c64(0.6, 0.0), &mut rng).member);
    }

    #[test]
    fn c_radius_examples() {
        let mut rng = seeded(7);
        let a = CMatrix::from_real_diagonal(&[2.0, -3.0]);
        let c = CWeight::new(CMatrix::from_real_diagonal(&[1.0, 0.0]));
        let r = c_numerical_radius(&a, &c, &mut rng).unwrap();
        assert!(r.exact && (r.value - 3.0).abs() < 1e-8);

        // rank-2 projection weight equals w_2
        let a = CMatrix::from_fn(4, |i, j| c64((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.3));
        let p = CWeight::new(CMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0]));
        let r = c_numerical_radius(&a, &p, &mut rng).unwrap();
        assert!((r.value - k_numerical_radius(&a, 2).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn rank_one_c_radius_matches_unitary_ascent() {
        let mut rng = seeded(13);
        let c = CWeight::new(CMatrix::from_fn(3, |i, j| c64((i + 2 * j) as f64, (i * j) as f64 - 0.5)));
        assert!(c.hermitian_phase.is_none());
        for _ in 0..4 {
            let a = RankOne::new(gaussian_vector(&mut rng, 3), gaussian_vector(&mut rng, 3))
                .unwrap()
                .to_matrix();
            let via_q = c_numerical_radius(&a, &c, &mut rng).unwrap().value;
            let ascent = c_radius_ascent(&a, c.matrix(), &UnitaryOptions::default(), &mut rng);
            assert!((via_q - ascent).abs() <= 1e-6 * via_q, "{via_q} vs {ascent}");
        }
    }

    #[test]
    fn hermitian_phase_detection() {
        let h = CMatrix::from_fn(3, |i, j| if i == j { c64(i as f64, 0.0) } else { c64(0.2, 0.1 * (j as f64 - i as f64)) });
        let w = CWeight::new(h.scale(cis(0.9)));
        assert!(!w.is_hermitian() && w.is_hermitian_up_to_phase());
        let w = CWeight::new(e12(3));
        assert!(!w.is_hermitian_up_to_phase());
        assert!(CWeight::new(CMatrix::zeros(3)).is_hermitian());
    }

    #[test]
    fn profile_and_classification() {
        let mut rng = seeded(9);
        let p = q_profile(&e12(3), 21, &mut rng).unwrap();
        assert_eq!(classify_condition(&p), Condition::Condition1);
        assert!(p.is_strictly_decreasing(0.0));
        let p = q_profile(&CMatrix::identity(3), 21, &mut rng).unwrap();
        assert_eq!(classify_condition(&p), Condition::Condition1);
        assert_eq!(p.argmin, 0);
        assert_eq!(p.argmax, 20);
        let p = q_profile(&CMatrix::zeros(3), 21, &mut rng).unwrap();
        assert_eq!(classify_condition(&p), Condition::Neither);
        assert!(q_profile(&CMatrix::zeros(3), 20, &mut rng).is_err());
    }

    #[test]
    fn qparam_validation() {
        assert!(QParam::new(-0.1).is_err());
        assert!(QParam::new(1.1).is_err());
        let (qq, phase) = QParam::from_complex(c64(0.0, 0.5)).unwrap();
        assert!((qq.value() - 0.5).abs() < 1e-15);
        assert!((phase - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
