//! The shift map `x⊗f ↦ Sx⊗f` with `Se_k = e_{k+1}` truncated to `ℂⁿ`.
//!
//! On rank-one pairs whose vectors avoid `e_n` the truncated shift is an
//! isometry, so zero products are preserved in both directions. Yet `S` is
//! not surjective, so the map cannot have the form `x⊗f ↦ Ux⊗h(x, f)` with a
//! unitary `U`.

use serde::Serialize;

use super::{apply_rank_one, check_zero_product_equivalence, PreserverMap, ZERO_TOL};
use crate::error::{Error, Result};
use crate::linalg::random::{complex_normal, gaussian_vector, par_trials, seeded, SpecRng};
use crate::linalg::{c64, compact_svd, CMatrix, CVector, RankOne, C64};
use crate::report::Witness;

/// Seed used by `shift_example_demo`.
pub const SHIFT_DEMO_SEED: u64 = 0x51f7;
/// Rank-one pairs tested on the truncated domain.
pub const SHIFT_DEMO_PAIRS: usize = 500;
/// Pairs touching `e_n`, and mixed pairs with an element of the extended class.
const SIDE_PAIRS: usize = 100;

/// The truncated shift: `Se_k = e_{k+1}` for `k < n`, `Se_n = 0`.
pub fn shift_operator(n: usize) -> CMatrix {
    CMatrix::from_fn(n, |i, j| if i == j + 1 { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
}

/// The element `x⊗f + c e₁⊗Sf` of the extended class and its image
/// `(c e₁ + Sx)⊗f`.
pub fn shift_class_pair(x: &CVector, f: &CVector, c: C64) -> Result<(CMatrix, CMatrix)> {
    let n = x.dim();
    let s = shift_operator(n);
    let e1 = CVector::basis(n, 0);
    let a = &RankOne::new(x.clone(), f.clone())?.to_matrix()
        + &RankOne::new(e1.scale(c), s.apply(f))?.to_matrix();
    let image = RankOne::new(e1.scale(c).add(&s.apply(x)), f.clone())?.to_matrix();
    Ok((a, image))
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftDemoReport {
    pub n: usize,
    pub seed: u64,
    /// Rank-one pairs with all vectors in the first `n − 1` coordinates.
    pub truncated_pairs: usize,
    pub truncated_zero_pairs: usize,
    pub truncated_violations: usize,
    pub equivalence_holds: bool,
    /// Pairs whose left vectors have an `e_n` component.
    pub touching_pairs: usize,
    pub touching_violations: usize,
    pub touching_witness: Witness,
    /// `dist(e₁, ran S)`; positive means `S` is not surjective.
    pub range_distance: f64,
    pub shift_rank: usize,
    /// `‖SS^* − I‖`.
    pub coisometry_defect: f64,
    pub canonical_form_fails: bool,
    pub canonical_witness: Witness,
    /// Pairs of an extended-class element with a rank-one operator. Reported
    /// only; see `mixed_witness`.
    pub mixed_pairs: usize,
    pub mixed_violations: usize,
    pub mixed_witness: Witness,
    pub pass: bool,
}

fn is_zero(m: &CMatrix) -> bool {
    m.operator_norm() <= ZERO_TOL
}

fn vector_in(rng: &mut SpecRng, n: usize, support: usize) -> CVector {
    let v = gaussian_vector(rng, support);
    CVector::from_raw(v.as_vector().clone().resize_vertically(n, c64(0.0, 0.0)))
}

/// Rank-one pair whose left vectors are `x₀ + a e_n`, `y₀ + b e_n` with
/// `x₀ ⊥ y₀` in the first `n − 1` coordinates: `A^*B = ⟨y,x⟩ f⊗g ≠ 0` while
/// `⟨Sy, Sx⟩ = ⟨y₀, x₀⟩ = 0`.
fn touching_pair(rng: &mut SpecRng, n: usize) -> Result<(RankOne, RankOne)> {
    let x0 = vector_in(rng, n, n - 1);
    let y0 = vector_in(rng, n, n - 1);
    let y0 = y0.sub(&x0.scale(y0.inner(&x0) / x0.norm().powi(2)));
    let en = CVector::basis(n, n - 1);
    let x = x0.add(&en.scale(complex_normal(rng)));
    let y = y0.add(&en.scale(complex_normal(rng)));
    Ok((
        RankOne::new(x, gaussian_vector(rng, n))?,
        RankOne::new(y, gaussian_vector(rng, n))?,
    ))
}

fn rank_one_violation(m: &PreserverMap, a: &RankOne, b: &RankOne) -> Result<bool> {
    let orig = &a.to_matrix().adjoint() * &b.to_matrix();
    let image = &apply_rank_one(m, a)?.adjoint() * &apply_rank_one(m, b)?;
    Ok(is_zero(&orig) != is_zero(&image))
}

/// Runs the demonstration with the fixed seed and pair counts.
pub fn shift_example_demo(n: usize) -> Result<ShiftDemoReport> {
    shift_example_demo_with(n, SHIFT_DEMO_PAIRS, SHIFT_DEMO_SEED)
}

pub fn shift_example_demo_with(n: usize, pairs: usize, seed: u64) -> Result<ShiftDemoReport> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("shift demo needs n >= 4, got {n}")));
    }
    let m = PreserverMap::shift_example(n)?;
    let s = shift_operator(n);
    let mut rng = seeded(seed);

    let truncated = check_zero_product_equivalence(&m, pairs, &mut rng)?;

    let side_seed = seed.wrapping_add(1);
    let touching = par_trials(side_seed, SIDE_PAIRS, |r, _| -> Result<bool> {
        let (a, b) = touching_pair(r, n)?;
        rank_one_violation(&m, &a, &b)
    })
    .into_iter()
    .collect::<Result<Vec<bool>>>()?;
    let touching_violations = touching.iter().filter(|&&v| v).count();
    let en = CVector::basis(n, n - 1);
    let e1 = CVector::basis(n, 0);
    let a = RankOne::new(en.clone(), e1.clone())?;
    let witness_norm = (&apply_rank_one(&m, &a)?.adjoint() * &apply_rank_one(&m, &a)?).operator_norm();
    let touching_witness = Witness::new(
        "A = B = e_n⊗e_1",
        witness_norm,
        format!("A*B = e_1⊗e_1 has norm 1, Phi(A)*Phi(B) has norm {witness_norm:.3e}"),
    );

    // e₁ against the range of S, via the compact SVD of S
    let p = compact_svd(&s)?.left;
    let proj = &p * (p.adjoint() * e1.as_vector());
    let range_distance = (e1.as_vector() - proj).norm();
    let shift_rank = s.rank();
    let coisometry_defect = (&(&s * &s.adjoint()) - &CMatrix::identity(n)).operator_norm();
    let canonical_form_fails = range_distance > 0.5 && shift_rank < n;
    let canonical_witness = Witness::new(
        "e_1 not in range(S)",
        range_distance,
        format!(
            "rank S = {shift_rank} < {n}, |SS* - I| = {coisometry_defect:.3}; no unitary U has Ux parallel to Sx for all x"
        ),
    );

    let mixed = par_trials(side_seed.wrapping_add(1), SIDE_PAIRS, |r, k| -> Result<bool> {
        let x = vector_in(r, n, n - 1);
        let f = vector_in(r, n, n - 1);
        let c = complex_normal(r);
        let y = vector_in(r, n, n - 1);
        let y = if k % 2 == 0 {
            y.sub(&x.scale(y.inner(&x) / x.norm().powi(2)))
        } else {
            y
        };
        let b = RankOne::new(y, vector_in(r, n, n - 1))?;
        let (a, image) = shift_class_pair(&x, &f, c)?;
        let orig = &a.adjoint() * &b.to_matrix();
        let img = &image.adjoint() * &apply_rank_one(&m, &b)?;
        Ok(is_zero(&orig) != is_zero(&img))
    })
    .into_iter()
    .collect::<Result<Vec<bool>>>()?;
    let mixed_violations = mixed.iter().filter(|&&v| v).count();
    // x = e₂, f = e₁, c = 1 with B = e₁⊗e₁: A^*B = Sf⊗e₁ = e₂⊗e₁ but Φ(A)^*Φ(B) = 0
    let (ma, mimage) = shift_class_pair(&CVector::basis(n, 1), &e1, c64(1.0, 0.0))?;
    let mb = RankOne::new(e1.clone(), e1.clone())?;
    let m_orig = (&ma.adjoint() * &mb.to_matrix()).operator_norm();
    let m_img = (&mimage.adjoint() * &apply_rank_one(&m, &mb)?).operator_norm();
    let mixed_witness = Witness::new(
        "A = e_2⊗e_1 + e_1⊗Se_1, B = e_1⊗e_1",
        m_orig,
        format!("|A*B| = {m_orig:.3}, |Phi(A)*Phi(B)| = {m_img:.3e}"),
    );

    let equivalence_holds = truncated.pass;
    Ok(ShiftDemoReport {
        n,
        seed,
        truncated_pairs: pairs,
        truncated_zero_pairs: truncated.zero_pairs,
        truncated_violations: truncated.violations,
        equivalence_holds,
        touching_pairs: SIDE_PAIRS,
        touching_violations,
        touching_witness,
        range_distance,
        shift_rank,
        coisometry_defect,
        canonical_form_fails,
        canonical_witness,
        mixed_pairs: SIDE_PAIRS,
        mixed_violations,
        mixed_witness,
        pass: equivalence_holds && canonical_form_fails && touching_violations > 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_moves_basis_vectors() {
        let s = shift_operator(5);
        let e2 = s.apply(&CVector::basis(5, 1));
        assert!(e2.sub(&CVector::basis(5, 2)).norm() == 0.0);
        assert!(s.apply(&CVector::basis(5, 4)).norm() == 0.0);
    }

    #[test]
    fn class_pair_image_formula() {
        // x = e1, f = e1, c = 2: A = e1⊗e1 + 2e1⊗e2, Φ(A) = (2e1 + e2)⊗e1
        let e1 = CVector::basis(4, 0);
        let (a, img) = shift_class_pair(&e1, &e1, c64(2.0, 0.0)).unwrap();
        assert_eq!(a.get(0, 0), c64(1.0, 0.0));
        assert_eq!(a.get(0, 1), c64(2.0, 0.0));
        assert_eq!(img.get(0, 0), c64(2.0, 0.0));
        assert_eq!(img.get(1, 0), c64(1.0, 0.0));
    }

    #[test]
    fn demo_at_eight() {
        let r = shift_example_demo_with(8, 120, 3).unwrap();
        assert!(r.equivalence_holds, "{r:?}");
        assert_eq!(r.touching_violations, r.touching_pairs);
        assert!((r.range_distance - 1.0).abs() < 1e-12);
        assert_eq!(r.shift_rank, 7);
        assert!((r.coisometry_defect - 1.0).abs() < 1e-12);
        assert!(r.pass);
        assert!(r.mixed_witness.value > 0.5);
    }

    #[test]
    fn too_small_truncation_is_rejected() {
        assert!(shift_example_demo(3).is_err());
    }
}
