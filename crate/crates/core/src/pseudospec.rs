//! ε-pseudospectra `σ_ε(A) = {z : ‖(zI − A)^{-1}‖ > 1/ε}` and pseudo-spectral
//! radii, computed from the smallest singular value of `zI − A`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::random::unit_complex;
use crate::linalg::{c64, cis, smallest_singular_value, spectral_data, CMatrix, CVector, C64};
use crate::region::{Disc, GridSpec, Region};
use crate::sweep::{best_periodic_peaks, golden_max};

pub const DEFAULT_GRID: usize = 512;
/// Angles in the coarse sweep of `pseudo_spectral_radius`.
pub const SWEEP_ANGLES: usize = 256;

/// Strictly positive ε.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Epsilon> {
        if value > 0.0 && value.is_finite() {
            Ok(Epsilon(value))
        } else {
            Err(Error::InvalidParameter(format!("epsilon must be > 0, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `s_min(zI − A)`, so that `‖(zI − A)^{-1}‖ = 1/s_min`.
pub fn resolvent_gap(a: &CMatrix, z: C64) -> f64 {
    smallest_singular_value(a.shift_from(z).into_inner())
}

/// Gaps at or below this multiple of `max(1, ‖A‖)` mark `z` as an eigenvalue.
const EIGEN_FLOOR: f64 = 1e-14;

/// `z ∈ σ_ε(A)`: strict inequality `s_min(zI − A) < ε`, eigenvalues included.
pub fn pseudo_member(a: &CMatrix, z: C64, eps: Epsilon) -> bool {
    let s = resolvent_gap(a, z);
    s < eps.value() || s <= EIGEN_FLOOR * a.operator_norm().max(1.0)
}

/// Samples σ_ε(A) on the box `|Re z|, |Im z| ≤ ‖A‖ + ε`, which contains it
/// because `s_min(zI − A) ≥ |z| − ‖A‖`.
pub fn pseudo_region(a: &CMatrix, eps: Epsilon, resolution: usize) -> Result<Region> {
    let half = (a.operator_norm() + eps.value()) * 1.02;
    let grid = GridSpec::centered(resolution, c64(0.0, 0.0), half)?;
    Ok(pseudo_region_on(a, eps, grid))
}

/// σ_ε(A) sampled on a caller-chosen grid.
pub fn pseudo_region_on(a: &CMatrix, eps: Epsilon, grid: GridSpec) -> Region {
    Region::from_field(grid, eps.value(), |z| resolvent_gap(a, z))
}

/// Radial search for the largest `t` with `s_min(t e^{iθ} I − A) ≤ ε`.
///
/// `s(z) = s_min(zI − A)` is 1-Lipschitz in `z`, so every evaluation with
/// `s(z_k) > ε` certifies the open disc `D(z_k, s(z_k) − ε)` lies outside
/// σ_ε(A). The search jumps through such discs, including those left by
/// earlier rays, and only evaluates where no disc applies.
struct RaySearch<'a> {
    a: &'a CMatrix,
    eps: f64,
    t_outer: f64,
}

/// Certified exclusion discs `(center, radius)`.
type Exclusions = Vec<(C64, f64)>;

impl RaySearch<'_> {
    fn gap(&self, z: C64) -> f64 {
        resolvent_gap(self.a, z)
    }

    /// Smallest `t' ≤ t` such that the ray segment `[t', t]` stays inside the
    /// known exclusion discs.
    fn skip_excluded(&self, dir: C64, mut t: f64, known: &[(C64, f64)]) -> f64 {
        'outer: loop {
            let p = dir * t;
            for &(z, r) in known.iter().rev() {
                if (p - z).norm() < r {
                    let w = dir.conj() * z;
                    let t_new = w.re - (r * r - w.im * w.im).max(0.0).sqrt();
                    if t_new < t {
                        t = t_new;
                        if t < 0.0 {
                            return t;
                        }
                        continue 'outer;
                    }
                }
            }
            return t;
        }
    }

    /// Outermost crossing on the ray at angle `theta`, or `None` when the ray
    /// misses the set. Steps shorter than `floor` are lengthened to `floor`;
    /// `tol` bounds the final bracket width. New exclusion discs are appended
    /// to `found`.
    fn outermost(
        &self,
        theta: f64,
        floor: f64,
        tol: f64,
        known: &[(C64, f64)],
        found: &mut Exclusions,
        extrapolate: bool,
    ) -> Option<f64> {
        let dir = cis(theta);
        let mut t_hi = self.t_outer;
        let mut s_hi = self.gap(dir * t_hi);
        if s_hi <= self.eps {
            return Some(t_hi);
        }
        found.push((dir * t_hi, s_hi - self.eps));
        let mut prev: Option<(f64, f64)> = None;
        loop {
            let mut t = t_hi - (s_hi - self.eps).max(floor);
            if s_hi - self.eps >= floor {
                t = self.skip_excluded(dir, t, known);
            }
            // secant prediction of the crossing; skips the certified march,
            // so it is only used where an approximate crossing suffices
            if let (true, Some((tp, sp))) = (extrapolate, prev) {
                let slope = (sp - s_hi) / (tp - t_hi);
                if slope > 0.0 {
                    let pred = t_hi - 1.05 * (s_hi - self.eps) / slope;
                    if pred < t {
                        t = pred.max(0.5 * t);
                    }
                }
            }
            prev = Some((t_hi, s_hi));
            if t <= 0.0 {
                let s0 = self.gap(c64(0.0, 0.0));
                if s0 <= self.eps {
                    return Some(self.refine(dir, 0.0, s0, t_hi, s_hi, tol));
                }
                return None;
            }
            let s = self.gap(dir * t);
            if s <= self.eps {
                return Some(self.refine(dir, t, s, t_hi, s_hi, tol));
            }
            found.push((dir * t, s - self.eps));
            t_hi = t;
            s_hi = s;
        }
    }

    /// Illinois false position on `g(t) = s(t) − ε` with `g(lo) ≤ 0 < g(hi)`.
    fn refine(&self, dir: C64, mut lo: f64, s_lo: f64, mut hi: f64, s_hi: f64, tol: f64) -> f64 {
        let mut g_lo = s_lo - self.eps;
        let mut g_hi = s_hi - self.eps;
        let mut side = 0i8;
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let mut t = hi - g_hi * (hi - lo) / (g_hi - g_lo);
            if !(t > lo && t < hi) {
                t = 0.5 * (lo + hi);
            }
            let g = self.gap(dir * t) - self.eps;
            if g <= 0.0 {
                lo = t;
                g_lo = g;
                if side == -1 {
                    g_hi *= 0.5;
                }
                side = -1;
            } else {
                hi = t;
                g_hi = g;
                if side == 1 {
                    g_lo *= 0.5;
                }
                side = 1;
            }
        }
        lo
    }
}

/// `r_ε(A) = sup{|z| : z ∈ σ_ε(A)}`.
///
/// Each ray `t e^{iθ}` is scanned inward from `‖A‖ + ε` for its outermost
/// crossing of the level `s_min = ε`. A 256-angle sweep locates the peaks
/// and golden-section search in angle refines the three best, with tight
/// brackets on every refined ray.
pub fn pseudo_spectral_radius(a: &CMatrix, eps: Epsilon) -> f64 {
    let e = eps.value();
    let scale = a.operator_norm() + e;
    let search = RaySearch {
        a,
        eps: e,
        t_outer: scale,
    };
    let (coarse_floor, coarse_tol) = (2e-3 * e.min(scale), 1e-5 * scale);
    let (fine_floor, fine_tol) = (1e-4 * e.min(scale), 1e-12 * scale);

    let h = std::f64::consts::TAU / SWEEP_ANGLES as f64;
    let mut previous: Exclusions = Vec::new();
    let mut values = Vec::with_capacity(SWEEP_ANGLES);
    for i in 0..SWEEP_ANGLES {
        let mut found = Vec::new();
        let r = search.outermost(i as f64 * h, coarse_floor, coarse_tol, &previous, &mut found, true);
        values.push(r.unwrap_or(0.0));
        previous = found;
    }

    let mut best = 0.0f64;
    for i in best_periodic_peaks(&values, 3) {
        let c = i as f64 * h;
        let mut known: Exclusions = Vec::new();
        let mut ray = |theta: f64| {
            let mut found = Vec::new();
            let r = search.outermost(theta, fine_floor, fine_tol, &known, &mut found, false);
            known.extend(found);
            r.unwrap_or(0.0)
        };
        let at_peak = ray(c);
        let (_, v) = golden_max(&mut ray, c - h, c + h, 1e-6);
        best = best.max(v).max(at_peak);
    }
    best
}

/// Closed form for rank-one operators:
/// `r_ε(x⊗f) = ½(√(|⟨x,f⟩|² + 4ε² + 4ε‖x‖‖f‖) + |⟨x,f⟩|)`.
pub fn rank_one_psr_closed_form(x: &CVector, f: &CVector, eps: Epsilon) -> Result<f64> {
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: f.dim(),
        });
    }
    let (nx, nf) = (x.norm(), f.norm());
    if nx == 0.0 || nf == 0.0 {
        return Err(Error::ZeroVector);
    }
    let ip = x.inner(f).norm();
    let e = eps.value();
    Ok(0.5 * ((ip * ip + 4.0 * e * e + 4.0 * e * nx * nf).sqrt() + ip))
}

/// Discs whose union is σ_ε(A) for normal `A`: `D(λ_i, ε)`.
pub fn normal_pseudospectrum_discs(a: &CMatrix, eps: Epsilon) -> Result<Vec<Disc>> {
    let sd = spectral_data(a)?;
    sd.eigenvalues
        .iter()
        .map(|&l| Disc::new(l, eps.value()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudoPropertyReport {
    /// Points `λ + 0.9ε·e^{iφ}` found outside σ_ε(A).
    pub inclusion_failures: usize,
    pub inclusion_tested: usize,
    /// Hausdorff distance between σ_ε(A) and `σ(A) + D(0,ε)` in grid cell
    /// diagonals; only computed for normal `A`.
    pub normal_deviation_cells: Option<f64>,
    /// `max |s_min((z+c)I − (A+cI)) − s_min(zI − A)|` over sampled `z`.
    pub translation_gap_deviation: f64,
    /// Hausdorff distance between σ_ε(A+cI) and `c + σ_ε(A)` sampled on
    /// independent grids, in cell diagonals.
    pub translation_region_cells: f64,
    /// `max |s_min(czI − cA) − |c| s_min(zI − A)|` over sampled `z`.
    pub scaling_gap_deviation: f64,
    /// `|r_ε(cA) − |c| r_{ε/|c|}(A)|`.
    pub scaling_radius_deviation: f64,
}

impl PseudoPropertyReport {
    pub fn max_numeric_deviation(&self) -> f64 {
        self.translation_gap_deviation
            .max(self.scaling_gap_deviation)
            .max(self.scaling_radius_deviation)
    }
}

/// Checks the spectrum-plus-disc inclusion, the normal-case equality and
/// the translation/scaling covariances on sampled points and regions.
pub fn check_pseudo_properties<R: Rng + ?Sized>(
    a: &CMatrix,
    eps: Epsilon,
    c: C64,
    resolution: usize,
    rng: &mut R,
) -> Result<PseudoPropertyReport> {
    if c == c64(0.0, 0.0) {
        return Err(Error::InvalidParameter("scaling constant must be nonzero".into()));
    }
    let n = a.dim();
    let e = eps.value();
    let sd = spectral_data(a)?;

    let mut inclusion_failures = 0;
    let mut inclusion_tested = 0;
    for &l in &sd.eigenvalues {
        for _ in 0..4 {
            let z = l + unit_complex(rng) * (0.9 * e);
            inclusion_tested += 1;
            if !pseudo_member(a, z, eps) {
                inclusion_failures += 1;
            }
        }
        inclusion_tested += 1;
        if !pseudo_member(a, l, eps) {
            inclusion_failures += 1;
        }
    }

    let normal_deviation_cells = if a.normality_defect() <= 1e-10 {
        let region = pseudo_region(a, eps, resolution)?;
        let grid = region.grid.expect("grid region");
        let discs = normal_pseudospectrum_discs(a, eps)?;
        let oracle = Region::from_field(grid, 0.0, |z| crate::region::disc_union_distance(&discs, z));
        Some(region.hausdorff(&oracle) / grid.cell_diagonal())
    } else {
        None
    };

    let radius = a.operator_norm() + e;
    let shifted = &CMatrix::identity(n).scale(c) + a;
    let scaled = a.scale(c);
    let mut translation_gap_deviation: f64 = 0.0;
    let mut scaling_gap_deviation: f64 = 0.0;
    for _ in 0..64 {
        let z = unit_complex(rng) * (radius * rng.gen::<f64>());
        let base = resolvent_gap(a, z);
        translation_gap_deviation =
            translation_gap_deviation.max((resolvent_gap(&shifted, z + c) - base).abs());
        scaling_gap_deviation =
            scaling_gap_deviation.max((resolvent_gap(&scaled, c * z) - c.norm() * base).abs());
    }

    let region = pseudo_region(a, eps, resolution)?;
    let moved = pseudo_region_on(
        &shifted,
        eps,
        GridSpec::centered(resolution, c, radius * 1.02 + 0.37 * region.cell_diagonal().unwrap())?,
    );
    let translated = region.map(|z| z + c);
    let translation_region_cells =
        translated.hausdorff(&moved) / region.cell_diagonal().unwrap().max(moved.cell_diagonal().unwrap());

    let cn = c.norm();
    let lhs = pseudo_spectral_radius(&scaled, eps);
    let rhs = cn * pseudo_spectral_radius(a, Epsilon::new(e / cn)?);
    let scaling_radius_deviation = (lhs - rhs).abs();

    Ok(PseudoPropertyReport {
        inclusion_failures,
        inclusion_tested,
        normal_deviation_cells,
        translation_gap_deviation,
        translation_region_cells,
        scaling_gap_deviation,
        scaling_radius_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RankOne;

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    fn diag_example() -> CMatrix {
        CMatrix::from_diagonal(&[c64(1.0, 0.0), c64(-2.0, 0.0), c64(0.0, 1.0)])
    }

    #[test]
    fn gap_examples() {
        assert!((resolvent_gap(&CMatrix::zeros(3), c64(1.0, 0.0)) - 1.0).abs() < 1e-15);
        let d = CMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(resolvent_gap(&d, c64(2.0, 0.0)).abs() < 1e-15);
        assert!(resolvent_gap(&CMatrix::unit(2, 0, 1), c64(0.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn membership_examples() {
        let z = CMatrix::zeros(3);
        assert!(pseudo_member(&z, c64(0.5, 0.0), eps(1.0)));
        assert!(!pseudo_member(&z, c64(1.0, 0.0), eps(1.0)));
        assert!(pseudo_member(&diag_example(), c64(-2.4, 0.0), eps(0.5)));
        assert!(!pseudo_member(&diag_example(), c64(-2.6, 0.0), eps(0.5)));
    }

    #[test]
    fn radius_examples() {
        assert!((pseudo_spectral_radius(&diag_example(), eps(0.5)) - 2.5).abs() < 1e-8);
        let e1e1 = CMatrix::unit(3, 0, 0);
        assert!((pseudo_spectral_radius(&e1e1, eps(1.0)) - 2.0).abs() < 1e-8);
        let e1e2 = CMatrix::unit(3, 0, 1);
        assert!((pseudo_spectral_radius(&e1e2, eps(0.5)) - 0.75f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn closed_form_examples() {
        let e = |i| CVector::basis(3, i);
        assert!((rank_one_psr_closed_form(&e(0), &e(0), eps(1.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!(
            (rank_one_psr_closed_form(&e(0), &e(1), eps(0.5)).unwrap() - 0.75f64.sqrt()).abs()
                < 1e-15
        );
        let two_e1 = e(0).scale(c64(2.0, 0.0));
        assert!((rank_one_psr_closed_form(&two_e1, &e(0), eps(1.0)).unwrap() - 3.0).abs() < 1e-15);
        assert!(matches!(
            rank_one_psr_closed_form(&CVector::zeros(3), &e(0), eps(1.0)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn region_examples() {
        let r = pseudo_region(&CMatrix::zeros(3), eps(1.0), 128).unwrap();
        let cell = r.cell_diagonal().unwrap();
        assert!(r.disc_union_deviation(&[Disc::new(c64(0.0, 0.0), 1.0).unwrap()]) < 2.0 * cell);

        // a·P with P a nontrivial projection
        let p = CMatrix::from_real_diagonal(&[3.0, 0.0, 0.0]);
        let r = pseudo_region(&p, eps(1.0), 160).unwrap();
        let discs = [
            Disc::new(c64(0.0, 0.0), 1.0).unwrap(),
            Disc::new(c64(3.0, 0.0), 1.0).unwrap(),
        ];
        assert_eq!(r.boundary.len(), 2);
        assert!(r.disc_union_deviation(&discs) < 2.0 * r.cell_diagonal().unwrap());

        // x⊗f with ⟨x,f⟩ = 0 gives a single disc
        let a = RankOne::new(CVector::basis(3, 0), CVector::basis(3, 1)).unwrap().to_matrix();
        let r = pseudo_region(&a, eps(0.5), 128).unwrap();
        let disc = Disc::new(c64(0.0, 0.0), 0.75f64.sqrt()).unwrap();
        assert!(r.disc_union_deviation(&[disc]) < 2.0 * r.cell_diagonal().unwrap());
    }

    #[test]
    fn epsilon_validation() {
        assert!(Epsilon::new(0.0).is_err());
        assert!(Epsilon::new(-1.0).is_err());
        assert!(Epsilon::new(f64::NAN).is_err());
    }
}
