//! Canonical maps preserving functionals of skew products `A^*B`, and the
//! functionals themselves.
//!
//! Surjectivity of a map is not something a finite sample can certify. The
//! checks here cover sufficiency of the canonical forms and the identities a
//! preserver must satisfy.

mod checks;
mod shift;

pub use checks::{
    check_axioms, check_axioms_selected, check_invariance, check_norm_identity, check_orthogonality_transfer,
    check_zero_product_equivalence, conjugation_distinguisher, projection_witness, AxiomOutcome,
    AxiomReport, AxiomStatus, AXIOMS, DistinguisherReport, InvarianceReport, NormIdentityReport,
    OrthogonalityReport, ZeroProductReport, AXIOM_TOL, G_FIT_TOL, INVARIANCE_TOL, NORM_TOL,
    ZERO_TOL,
};
pub use shift::{
    shift_class_pair, shift_example_demo, shift_example_demo_with, shift_operator, ShiftDemoReport,
    SHIFT_DEMO_PAIRS, SHIFT_DEMO_SEED,
};

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::random::seeded;
use crate::linalg::{
    c64, cis, right_support_partial_isometry, unitary_invariant_norm, CMatrix, CVector, NormKind,
    RankOne, C64, STRUCTURE_TOL,
};
use crate::numrange::{c_numerical_radius, k_numerical_radius, q_numerical_radius, CWeight, QParam};
use crate::pseudospec::{pseudo_region, pseudo_spectral_radius, Epsilon};
use crate::region::Region;

/// Seed of the randomized optimizers used by `Functional::evaluate`, so that
/// each functional is a fixed function of its argument.
pub const EVAL_SEED: u64 = 0x5eed_0ff0_0d;

/// Unitarity tolerance for the `U`, `V` of a map.
pub const UNITARY_TOL: f64 = 1e-10;

/// A unitary-similarity-invariant functional on matrices.
#[derive(Clone, Debug)]
pub enum Functional {
    PseudoSpectralRadius(Epsilon),
    /// σ_ε sampled on a `grid × grid` lattice. Not scalar valued.
    PseudoSpectrumRegion { eps: Epsilon, grid: usize },
    /// `w_C`; a smaller `C` is padded as `C ⊕ 0`.
    CNumericalRadius(CMatrix),
    QNumericalRadius(QParam),
    KNumericalRadius(usize),
    UnitaryInvariantNorm(NormKind),
}

impl Functional {
    pub fn label(&self) -> String {
        match self {
            Functional::PseudoSpectralRadius(e) => format!("psr(eps={})", e.value()),
            Functional::PseudoSpectrumRegion { eps, grid } => {
                format!("pseudospectrum(eps={}, grid={grid})", eps.value())
            }
            Functional::CNumericalRadius(c) => format!("wc(dim C={})", c.dim()),
            Functional::QNumericalRadius(q) => format!("wq(q={})", q.value()),
            Functional::KNumericalRadius(k) => format!("wk(k={k})"),
            Functional::UnitaryInvariantNorm(kind) => format!("norm({})", kind.label()),
        }
    }

    pub fn is_scalar(&self) -> bool {
        !matches!(self, Functional::PseudoSpectrumRegion { .. })
    }

    pub fn is_unitary_invariant_norm(&self) -> bool {
        matches!(self, Functional::UnitaryInvariantNorm(_))
    }

    /// `C ⊕ 0` of dimension `n`.
    pub fn weight_for(c: &CMatrix, n: usize) -> Result<CWeight> {
        Ok(CWeight::new(c.embed(n)?))
    }

    /// Scalar value `F(m)`. Region functionals return `InvalidParameter`.
    pub fn evaluate(&self, m: &CMatrix) -> Result<f64> {
        let mut rng = seeded(EVAL_SEED);
        match self {
            Functional::PseudoSpectralRadius(eps) => Ok(pseudo_spectral_radius(m, *eps)),
            Functional::PseudoSpectrumRegion { .. } => Err(Error::InvalidParameter(
                "pseudospectrum region is not scalar valued".into(),
            )),
            Functional::CNumericalRadius(c) => {
                Ok(c_numerical_radius(m, &Self::weight_for(c, m.dim())?, &mut rng)?.value)
            }
            Functional::QNumericalRadius(q) => Ok(q_numerical_radius(m, *q, &mut rng)),
            Functional::KNumericalRadius(k) => k_numerical_radius(m, *k),
            Functional::UnitaryInvariantNorm(kind) => Ok(unitary_invariant_norm(m, *kind)),
        }
    }

    /// Sampled σ_ε(m) for the region functional.
    pub fn region(&self, m: &CMatrix) -> Result<Region> {
        match self {
            Functional::PseudoSpectrumRegion { eps, grid } => pseudo_region(m, *eps, *grid),
            _ => Err(Error::InvalidParameter(format!("{} is scalar valued", self.label()))),
        }
    }
}

/// The phase functional `h : A ↦ 𝕋` of the two-sided unitary forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseFn {
    Constant(C64),
    /// A fixed pseudo-random phase per input, from a hash of the seed and the
    /// matrix entries.
    SeededRandomPerInput(u64),
}

impl PhaseFn {
    pub fn constant(mu: C64) -> Result<PhaseFn> {
        if !mu.re.is_finite() || !mu.im.is_finite() || (mu.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("phase {mu} is not unimodular")));
        }
        Ok(PhaseFn::Constant(mu / mu.norm()))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, PhaseFn::Constant(_))
    }

    pub fn eval(&self, a: &CMatrix) -> C64 {
        match *self {
            PhaseFn::Constant(mu) => mu,
            PhaseFn::SeededRandomPerInput(seed) => {
                let mut hasher = Sha256::new();
                hasher.update(seed.to_le_bytes());
                hasher.update((a.dim() as u64).to_le_bytes());
                for z in a.as_matrix().iter() {
                    hasher.update(z.re.to_le_bytes());
                    hasher.update(z.im.to_le_bytes());
                }
                let digest = hasher.finalize();
                let mut word = [0u8; 8];
                word.copy_from_slice(&digest[..8]);
                let u = u64::from_le_bytes(word);
                cis(std::f64::consts::TAU * (u as f64 / 2f64.powi(64)))
            }
        }
    }
}

/// The vector map `(x, f) ↦ h(x, f)` of the rank-one canonical form. Every
/// variant must satisfy `‖h(x, f)‖ = ‖f‖`; this is checked on application.
#[derive(Clone)]
pub enum HMap {
    /// `f ↦ V f`.
    Unitary(CMatrix),
    /// `f ↦ φ(x) V f` with a phase depending only on the direction of `x`.
    PhasedUnitary { v: CMatrix, seed: u64 },
    /// Swaps the first two coordinates of `f` when `|x₂| > |x₁|`. Norm
    /// preserving, but breaks orthogonality transfer.
    PerVectorPermutation,
    Custom(Arc<dyn Fn(&CVector, &CVector) -> CVector + Send + Sync>),
}

impl fmt::Debug for HMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HMap::Unitary(v) => f.debug_tuple("Unitary").field(&v.dim()).finish(),
            HMap::PhasedUnitary { v, seed } => f
                .debug_struct("PhasedUnitary")
                .field("dim", &v.dim())
                .field("seed", seed)
                .finish(),
            HMap::PerVectorPermutation => f.write_str("PerVectorPermutation"),
            HMap::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl HMap {
    pub fn label(&self) -> &'static str {
        match self {
            HMap::Unitary(_) => "unitary",
            HMap::PhasedUnitary { .. } => "phased-unitary",
            HMap::PerVectorPermutation => "per-vector-permutation",
            HMap::Custom(_) => "custom",
        }
    }

    /// `φ(x) = exp(2πi Σ w_k |x_k|²/‖x‖²)` with seeded weights `w_k`;
    /// invariant under `x ↦ cx`, so independent of the rank-one factorization.
    fn direction_phase(seed: u64, x: &CVector) -> C64 {
        let mut rng = seeded(seed);
        let nx2 = x.norm().powi(2);
        let s: f64 = x
            .as_vector()
            .iter()
            .map(|z| rng.gen::<f64>() * z.norm_sqr() / nx2)
            .sum();
        cis(std::f64::consts::TAU * s)
    }

    pub fn apply(&self, x: &CVector, f: &CVector) -> Result<CVector> {
        if x.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: f.dim(),
            });
        }
        let out = match self {
            HMap::Unitary(v) => v.apply(f),
            HMap::PhasedUnitary { v, seed } => v.apply(f).scale(Self::direction_phase(*seed, x)),
            HMap::PerVectorPermutation => {
                let mut g = f.as_vector().clone();
                if x.dim() >= 2 && x.get(1).norm() > x.get(0).norm() {
                    g.swap_rows(0, 1);
                }
                CVector::from_raw(g)
            }
            HMap::Custom(h) => h(x, f),
        };
        if out.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                found: out.dim(),
            });
        }
        let (no, nf) = (out.norm(), f.norm());
        if (no - nf).abs() > 1e-10 * nf.max(1.0) {
            return Err(Error::Domain(format!("h(x, f) has norm {no}, expected {nf}")));
        }
        Ok(out)
    }
}

/// Canonical preserver forms.
///
/// Prefer the validating constructors; `apply_map` trusts the fields.
#[derive(Clone, Debug)]
pub enum PreserverMap {
    /// `A ↦ h(A) U A V`, or `h(A) U Ā V` when `conjugate`.
    TwoSidedUnitary {
        u: CMatrix,
        v: CMatrix,
        h: PhaseFn,
        conjugate: bool,
    },
    /// `A ↦ U A V_A^*` where `V_A` maps `ran A^*` isometrically onto the span
    /// of the leading columns of `target`. The conjugate form uses `Ā` and
    /// `V_Ā`.
    PerOperatorIsometry {
        u: CMatrix,
        target: DMatrix<C64>,
        conjugate: bool,
    },
    /// `x⊗f ↦ Ux⊗h(x, f)`, or `Ux̄⊗h(x, f)` when `conjugate`. Rank one only.
    RankOneCanonical {
        u: CMatrix,
        hmap: HMap,
        conjugate: bool,
    },
    /// `x⊗f ↦ Sx⊗f` with the shift `Se_k = e_{k+1}` truncated to `ℂⁿ`.
    ShiftExample { n: usize },
}

fn require_unitary(m: &CMatrix, name: &str) -> Result<()> {
    if m.is_unitary(UNITARY_TOL) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} is not unitary")))
    }
}

impl PreserverMap {
    pub fn two_sided(u: CMatrix, v: CMatrix, h: PhaseFn, conjugate: bool) -> Result<Self> {
        require_unitary(&u, "U")?;
        require_unitary(&v, "V")?;
        if u.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: v.dim(),
            });
        }
        Ok(PreserverMap::TwoSidedUnitary { u, v, h, conjugate })
    }

    pub fn per_operator_isometry(u: CMatrix, target: DMatrix<C64>, conjugate: bool) -> Result<Self> {
        require_unitary(&u, "U")?;
        if target.nrows() != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: target.nrows(),
            });
        }
        let k = target.ncols();
        if (target.ad_mul(&target) - DMatrix::<C64>::identity(k, k)).norm() > STRUCTURE_TOL {
            return Err(Error::InvalidParameter("target must have orthonormal columns".into()));
        }
        Ok(PreserverMap::PerOperatorIsometry { u, target, conjugate })
    }

    pub fn rank_one_canonical(u: CMatrix, hmap: HMap, conjugate: bool) -> Result<Self> {
        require_unitary(&u, "U")?;
        match &hmap {
            HMap::Unitary(v) | HMap::PhasedUnitary { v, .. } => {
                require_unitary(v, "V")?;
                if v.dim() != u.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: u.dim(),
                        found: v.dim(),
                    });
                }
            }
            _ => {}
        }
        Ok(PreserverMap::RankOneCanonical { u, hmap, conjugate })
    }

    pub fn shift_example(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidParameter(format!("shift example needs n >= 4, got {n}")));
        }
        Ok(PreserverMap::ShiftExample { n })
    }

    pub fn dim(&self) -> usize {
        match self {
            PreserverMap::TwoSidedUnitary { u, .. }
            | PreserverMap::PerOperatorIsometry { u, .. }
            | PreserverMap::RankOneCanonical { u, .. } => u.dim(),
            PreserverMap::ShiftExample { n } => *n,
        }
    }

    /// The unitary `U` of the form, when it has one.
    pub fn designated_unitary(&self) -> Option<&CMatrix> {
        match self {
            PreserverMap::TwoSidedUnitary { u, .. }
            | PreserverMap::PerOperatorIsometry { u, .. }
            | PreserverMap::RankOneCanonical { u, .. } => Some(u),
            PreserverMap::ShiftExample { .. } => None,
        }
    }

    pub fn is_conjugate(&self) -> bool {
        match self {
            PreserverMap::TwoSidedUnitary { conjugate, .. }
            | PreserverMap::PerOperatorIsometry { conjugate, .. }
            | PreserverMap::RankOneCanonical { conjugate, .. } => *conjugate,
            PreserverMap::ShiftExample { .. } => false,
        }
    }

    /// Only defined on rank-one operators.
    pub fn is_rank_one_only(&self) -> bool {
        matches!(
            self,
            PreserverMap::RankOneCanonical { .. } | PreserverMap::ShiftExample { .. }
        )
    }

    pub fn label(&self) -> String {
        let conj = if self.is_conjugate() { "-conjugate" } else { "" };
        match self {
            PreserverMap::TwoSidedUnitary { h, .. } => {
                let phase = if h.is_constant() { "constant" } else { "per-input" };
                format!("two-sided-unitary{conj}(h={phase})")
            }
            PreserverMap::PerOperatorIsometry { .. } => format!("per-operator-isometry{conj}"),
            PreserverMap::RankOneCanonical { hmap, .. } => {
                format!("rank-one-canonical{conj}(h={})", hmap.label())
            }
            PreserverMap::ShiftExample { n } => format!("shift-example(n={n})"),
        }
    }
}

/// Image of a rank-one operator `x⊗f`.
pub fn apply_rank_one(m: &PreserverMap, r: &RankOne) -> Result<CMatrix> {
    if r.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: r.dim(),
        });
    }
    match m {
        PreserverMap::RankOneCanonical { u, hmap, conjugate } => {
            let x = if *conjugate { r.left.conjugate() } else { r.left.clone() };
            let h = hmap.apply(&r.left, &r.right)?;
            Ok(RankOne::new(u.apply(&x), h)?.to_matrix())
        }
        PreserverMap::ShiftExample { n } => {
            let s = shift_operator(*n);
            Ok(RankOne::new(s.apply(&r.left), r.right.clone())?.to_matrix())
        }
        _ => apply_map(m, &r.to_matrix()),
    }
}

/// `Φ(A)` for the selected form. Rank-one-only maps reject other inputs with
/// a domain error.
pub fn apply_map(m: &PreserverMap, a: &CMatrix) -> Result<CMatrix> {
    if a.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: a.dim(),
        });
    }
    match m {
        PreserverMap::TwoSidedUnitary { u, v, h, conjugate } => {
            let b = if *conjugate { a.conjugate() } else { a.clone() };
            Ok((&(u * &b) * v).scale(h.eval(a)))
        }
        PreserverMap::PerOperatorIsometry { u, target, conjugate } => {
            let b = if *conjugate { a.conjugate() } else { a.clone() };
            let vb = right_support_partial_isometry(&b, target)?;
            Ok(&(u * &b) * &vb.matrix().adjoint())
        }
        PreserverMap::RankOneCanonical { .. } | PreserverMap::ShiftExample { .. } => {
            let r = RankOne::from_matrix(a)?;
            apply_rank_one(m, &r)
        }
    }
}

/// `Φ(A)^*Φ(B)` next to `A^*B`.
pub fn skew_pair(m: &PreserverMap, a: &CMatrix, b: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let orig = &a.adjoint() * b;
    let image = &apply_map(m, a)?.adjoint() * &apply_map(m, b)?;
    Ok((orig, image))
}

pub(crate) fn real(z: f64) -> C64 {
    c64(z, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{gaussian_matrix, gaussian_vector, haar_unitary, rank_one};

    #[test]
    fn identity_two_sided_map_is_identity() {
        let m = PreserverMap::two_sided(
            CMatrix::identity(3),
            CMatrix::identity(3),
            PhaseFn::Constant(real(1.0)),
            false,
        )
        .unwrap();
        let a = gaussian_matrix(&mut seeded(1), 3);
        assert!(apply_map(&m, &a).unwrap().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn isometry_map_on_rank_one_keeps_left_factor_and_norm() {
        let mut rng = seeded(2);
        let u = haar_unitary(&mut rng, 4);
        let m = PreserverMap::per_operator_isometry(u.clone(), DMatrix::identity(4, 4), false).unwrap();
        let r = rank_one(&mut rng, 4);
        let img = RankOne::from_matrix(&apply_map(&m, &r.to_matrix()).unwrap()).unwrap();
        // Ux⊗f′ with ‖f′‖ = ‖f‖: the image's range is spanned by Ux
        let ux = u.apply(&r.left);
        let overlap = img.left.inner(&ux).norm() / (img.left.norm() * ux.norm());
        assert!((overlap - 1.0).abs() < 1e-12);
        assert!((img.norm() - r.norm()).abs() < 1e-12 * r.norm());
    }

    #[test]
    fn conjugate_variant_agrees_on_real_input() {
        let mut rng = seeded(3);
        let u = haar_unitary(&mut rng, 3);
        let v = haar_unitary(&mut rng, 3);
        let h = PhaseFn::SeededRandomPerInput(9);
        let plain = PreserverMap::two_sided(u.clone(), v.clone(), h, false).unwrap();
        let conj = PreserverMap::two_sided(u, v, h, true).unwrap();
        let a = CMatrix::from_fn(3, |i, j| real((i as f64) - 2.0 * j as f64));
        let d = apply_map(&plain, &a).unwrap().max_abs_diff(&apply_map(&conj, &a).unwrap());
        assert!(d < 1e-15);
    }

    #[test]
    fn seeded_phase_is_a_function_of_the_input() {
        let h = PhaseFn::SeededRandomPerInput(5);
        let a = gaussian_matrix(&mut seeded(4), 3);
        assert_eq!(h.eval(&a), h.eval(&a.clone()));
        assert!((h.eval(&a).norm() - 1.0).abs() < 1e-15);
        assert_ne!(h.eval(&a), h.eval(&a.scale(real(2.0))));
    }

    #[test]
    fn phased_hmap_ignores_factor_scaling() {
        let mut rng = seeded(6);
        let v = haar_unitary(&mut rng, 4);
        let hm = HMap::PhasedUnitary { v, seed: 3 };
        let x = gaussian_vector(&mut rng, 4);
        let f = gaussian_vector(&mut rng, 4);
        let a = hm.apply(&x, &f).unwrap();
        let b = hm.apply(&x.scale(c64(-0.3, 2.0)), &f).unwrap();
        assert!(a.sub(&b).norm() < 1e-13);
    }

    #[test]
    fn rank_one_maps_reject_higher_rank() {
        let m = PreserverMap::shift_example(5).unwrap();
        assert!(matches!(apply_map(&m, &CMatrix::identity(5)), Err(Error::Domain(_))));
        assert!(PreserverMap::shift_example(3).is_err());
    }

    #[test]
    fn non_norm_preserving_hmap_is_rejected() {
        let hm = HMap::Custom(Arc::new(|_, f: &CVector| f.scale(real(2.0))));
        let x = CVector::basis(3, 0);
        assert!(hm.apply(&x, &x).is_err());
    }
}
