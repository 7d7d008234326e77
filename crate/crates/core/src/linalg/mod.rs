//! Dense complex linear algebra on ℂⁿ.
//!
//! Inner products are linear in the first argument and conjugate-linear in
//! the second, so the rank-one operator `x⊗f` acts as `z ↦ ⟨z,f⟩ x` and
//! materializes to `x·f^H`. Every module in the crate shares this convention.

mod io;
pub mod random;

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, Dyn, Schur, SVD};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub use io::{
    matrix_from_json, matrix_to_json, read_matrix, read_vector, vector_from_json, vector_to_json,
    write_matrix, MatrixFile, VectorFile,
};

/// Singular values at or below this fraction of the largest one are treated
/// as zero when forming compact SVDs.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Tolerance used to accept a matrix as unitary, Hermitian or a projection.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Unit complex number `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Dense square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    /// Validates shape and finiteness.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite(format!("({i}, {j})")));
                }
            }
        }
        Ok(CMatrix(m))
    }

    /// Wraps a square matrix produced by internal arithmetic.
    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        CMatrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        CMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(n, n, f))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        CMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| c64(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Matrix unit `E_ij` (0-based) in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = C64::new(1.0, 0.0);
        CMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix(self.0.adjoint())
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> CMatrix {
        CMatrix(self.0.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, c: C64) -> CMatrix {
        CMatrix(&self.0 * c)
    }

    /// `zI − A`.
    pub fn shift_from(&self, z: C64) -> CMatrix {
        let mut m = -&self.0;
        for i in 0..m.nrows() {
            m[(i, i)] += z;
        }
        CMatrix(m)
    }

    /// Hermitian part of `e^{-iθ}A`, i.e. `(e^{-iθ}A + e^{iθ}A^H)/2`.
    pub fn rotated_hermitian_part(&self, theta: f64) -> DMatrix<C64> {
        let w = cis(-theta);
        let m = &self.0 * w;
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        CVector(&self.0 * &v.0)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        singular_values_desc(&self.0)
    }

    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Numerical rank with the crate-wide relative cutoff.
    pub fn rank(&self) -> usize {
        let s = self.singular_values();
        let smax = s.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        s.iter().filter(|&&x| x > RANK_CUTOFF * smax).count()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.0 - self.0.adjoint()).norm() <= tol * self.0.norm().max(1.0)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.dim();
        (self.0.adjoint() * &self.0 - DMatrix::<C64>::identity(n, n)).norm() <= tol
    }

    /// Frobenius norm of `AA^H − A^H A`.
    pub fn normality_defect(&self) -> f64 {
        let a = &self.0;
        (a * a.adjoint() - a.adjoint() * a).norm()
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        self.normality_defect() <= tol
    }

    /// Direct sum with a zero block so that the result has dimension `n`.
    pub fn embed(&self, n: usize) -> Result<CMatrix> {
        let k = self.dim();
        if k > n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: k,
            });
        }
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (k, k)).copy_from(&self.0);
        Ok(CMatrix(m))
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

/// Complex column vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector(DVector<C64>);

impl CVector {
    pub fn new(v: DVector<C64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if let Some(i) = v.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(format!("[{i}]")));
        }
        Ok(CVector(v))
    }

    pub(crate) fn from_raw(v: DVector<C64>) -> Self {
        CVector(v)
    }

    pub fn from_slice(entries: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        let v: Vec<C64> = entries.iter().map(|&x| c64(x, 0.0)).collect();
        Self::from_slice(&v)
    }

    pub fn zeros(n: usize) -> Self {
        CVector(DVector::zeros(n))
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = C64::new(1.0, 0.0);
        CVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<C64> {
        self.0
    }

    pub fn get(&self, i: usize) -> C64 {
        self.0[i]
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `⟨self, other⟩ = Σ self_i · conj(other_i)`.
    pub fn inner(&self, other: &CVector) -> C64 {
        other.0.dotc(&self.0)
    }

    pub fn scale(&self, c: C64) -> CVector {
        CVector(&self.0 * c)
    }

    pub fn conjugate(&self) -> CVector {
        CVector(self.0.map(|z| z.conj()))
    }

    pub fn normalized(&self) -> Result<CVector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(CVector(&self.0 / C64::new(n, 0.0)))
    }

    pub fn add(&self, other: &CVector) -> CVector {
        CVector(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        CVector(&self.0 - &other.0)
    }
}

/// The rank-one operator `x⊗f : z ↦ ⟨z,f⟩ x`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOne {
    pub left: CVector,
    pub right: CVector,
}

impl RankOne {
    pub fn new(left: CVector, right: CVector) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(Error::DimensionMismatch {
                expected: left.dim(),
                found: right.dim(),
            });
        }
        Ok(RankOne { left, right })
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    /// True when both factors are nonzero, i.e. the operator really has rank one.
    pub fn is_rank_one(&self) -> bool {
        self.left.norm() > 0.0 && self.right.norm() > 0.0
    }

    /// Matrix with entries `x_i · conj(f_j)`.
    pub fn to_matrix(&self) -> CMatrix {
        CMatrix(&self.left.0 * self.right.0.adjoint())
    }

    /// `(x⊗f)^* = f⊗x`.
    pub fn adjoint(&self) -> RankOne {
        RankOne {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// Operator norm `‖x‖‖f‖`.
    pub fn norm(&self) -> f64 {
        self.left.norm() * self.right.norm()
    }

    /// `tr(x⊗f) = ⟨x,f⟩`.
    pub fn trace(&self) -> C64 {
        self.left.inner(&self.right)
    }

    /// Factor a numerically rank-one matrix as `x⊗f` with `‖f‖ = 1`.
    pub fn from_matrix(a: &CMatrix) -> Result<RankOne> {
        let svd = checked_svd(&a.0)?;
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let s = &svd.singular_values;
        let (imax, smax) = s
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
        if smax == 0.0 {
            return Err(Error::Domain("zero matrix is not rank one".into()));
        }
        let rank = s.iter().filter(|&&x| x > RANK_CUTOFF * smax).count();
        if rank != 1 {
            return Err(Error::Domain(format!("matrix has rank {rank}, expected 1")));
        }
        let x = u.column(imax).into_owned() * C64::new(smax, 0.0);
        let f = vt.row(imax).adjoint();
        Ok(RankOne {
            left: CVector(x),
            right: CVector(f),
        })
    }
}

/// `(x⊗f)(z) = ⟨z,f⟩ x`.
pub fn rank_one_apply(r: &RankOne, z: &CVector) -> Result<CVector> {
    if z.dim() != r.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            found: z.dim(),
        });
    }
    Ok(r.left.scale(z.inner(&r.right)))
}

/// The skew product `A^* B`.
pub fn skew_product(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(CMatrix(a.0.ad_mul(&b.0)))
}

/// `Ā = JAJ` with `J` the entrywise conjugation in the standard basis.
pub fn conjugate_matrix(a: &CMatrix) -> CMatrix {
    a.conjugate()
}

/// Unitarily invariant norms, all computed from singular values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    Operator,
    Schatten(f64),
    KyFan(usize),
    Trace,
    Frobenius,
}

impl NormKind {
    /// Schatten-p norm; `p = ∞` is the operator norm.
    pub fn schatten(p: f64) -> Result<NormKind> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("Schatten p must be >= 1, got {p}")));
        }
        Ok(if p.is_infinite() {
            NormKind::Operator
        } else {
            NormKind::Schatten(p)
        })
    }

    pub fn ky_fan(k: usize) -> Result<NormKind> {
        if k == 0 {
            return Err(Error::InvalidParameter("Ky Fan k must be >= 1".into()));
        }
        Ok(NormKind::KyFan(k))
    }

    /// Evaluates the norm from singular values sorted in descending order.
    pub fn from_singular_values(&self, s: &[f64]) -> f64 {
        match *self {
            NormKind::Operator => s.first().copied().unwrap_or(0.0),
            NormKind::Schatten(p) if p.is_infinite() => s.first().copied().unwrap_or(0.0),
            NormKind::Schatten(p) => {
                let smax = s.first().copied().unwrap_or(0.0);
                if smax == 0.0 {
                    return 0.0;
                }
                // scaled to avoid overflow for large p
                smax * s.iter().map(|x| (x / smax).powf(p)).sum::<f64>().powf(1.0 / p)
            }
            NormKind::KyFan(k) => s.iter().take(k).sum(),
            NormKind::Trace => s.iter().sum(),
            NormKind::Frobenius => s.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NormKind::Operator => "operator".into(),
            NormKind::Schatten(p) => format!("schatten-{p}"),
            NormKind::KyFan(k) => format!("kyfan-{k}"),
            NormKind::Trace => "trace".into(),
            NormKind::Frobenius => "frobenius".into(),
        }
    }
}

pub fn unitary_invariant_norm(a: &CMatrix, kind: NormKind) -> f64 {
    kind.from_singular_values(&a.singular_values())
}

/// A partial isometry `W`: `W^H W` is an orthogonal projection.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialIsometry {
    matrix: CMatrix,
}

impl PartialIsometry {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let p = matrix.adjoint().as_matrix() * matrix.as_matrix();
        let idem = (&p * &p - &p).norm();
        let herm = (&p - p.adjoint()).norm();
        if idem > STRUCTURE_TOL || herm > STRUCTURE_TOL {
            return Err(Error::InvalidParameter(format!(
                "W^H W is not an orthogonal projection (idempotence defect {idem:.3e})"
            )));
        }
        Ok(PartialIsometry { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// The initial projection `W^H W`.
    pub fn initial_projection(&self) -> CMatrix {
        CMatrix(self.matrix.0.ad_mul(&self.matrix.0))
    }
}

/// Compact SVD `A = P Σ Q^H` keeping singular values above the rank cutoff.
pub struct CompactSvd {
    pub left: DMatrix<C64>,
    pub singular_values: Vec<f64>,
    pub right: DMatrix<C64>,
}

pub fn compact_svd(a: &CMatrix) -> Result<CompactSvd> {
    let n = a.dim();
    let svd = checked_svd(&a.0)?;
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let smax = svd.singular_values[order[0]];
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > RANK_CUTOFF * smax)
        .collect();
    let r = kept.len();
    let left = DMatrix::from_fn(n, r, |i, k| u[(i, kept[k])]);
    let right = DMatrix::from_fn(n, r, |i, k| vt[(kept[k], i)].conj());
    let singular_values = kept.iter().map(|&i| svd.singular_values[i]).collect();
    Ok(CompactSvd {
        left,
        singular_values,
        right,
    })
}

/// Builds `V_A = W Q^H` where `A = PΣQ^H` is a compact SVD and `W` holds the
/// first `rank(A)` columns of `target_isometry`, so that `V_A^H V_A` is the
/// projection onto `ran(A^H)`.
pub fn right_support_partial_isometry(
    a: &CMatrix,
    target_isometry: &DMatrix<C64>,
) -> Result<PartialIsometry> {
    let n = a.dim();
    if target_isometry.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target_isometry.nrows(),
        });
    }
    let m = target_isometry.ncols();
    let gram = target_isometry.ad_mul(target_isometry);
    if (gram - DMatrix::<C64>::identity(m, m)).norm() > STRUCTURE_TOL {
        return Err(Error::InvalidParameter(
            "target isometry must have orthonormal columns".into(),
        ));
    }
    let svd = compact_svd(a)?;
    let r = svd.singular_values.len();
    if r > m {
        return Err(Error::RankDeficientTarget {
            required: r,
            available: m,
        });
    }
    let w = target_isometry.columns(0, r);
    let v = w * svd.right.adjoint();
    PartialIsometry::new(CMatrix(v))
}

/// Orthogonal projection onto the range of `A^H`.
pub fn right_support_projection(a: &CMatrix) -> Result<CMatrix> {
    let svd = compact_svd(a)?;
    Ok(CMatrix(&svd.right * svd.right.adjoint()))
}

/// Eigenvalues with residual-certified eigenvectors plus singular values.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: Vec<CVector>,
    /// `‖Av − λv‖` for each returned pair.
    pub residuals: Vec<f64>,
    /// Descending.
    pub singular_values: Vec<f64>,
}

impl SpectralData {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Eigen- and singular-value data. Eigenvectors are taken as the smallest
/// right singular vector of `A − λI`; pairs must meet
/// `‖Av − λv‖ ≤ 1e-9‖A‖` or a backend error is returned.
pub fn spectral_data(a: &CMatrix) -> Result<SpectralData> {
    let n = a.dim();
    let schur = Schur::try_new(a.0.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::Backend("Schur iteration did not converge".into()))?;
    let eigenvalues: Vec<C64> = schur
        .eigenvalues()
        .ok_or_else(|| Error::Backend("Schur form is not triangular".into()))?
        .iter()
        .copied()
        .collect();
    let svd = checked_svd(&a.0)?;
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|x, y| y.total_cmp(x));
    let norm = singular_values[0];

    let mut eigenvectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &lambda in &eigenvalues {
        let shifted = a.shift_from(lambda).0;
        let svd = checked_svd(&shifted)?;
        let vt = svd.v_t.unwrap();
        let imin = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc })
            .0;
        let v = vt.row(imin).adjoint();
        let res = (&a.0 * &v - &v * lambda).norm();
        if res > 1e-9 * norm {
            return Err(Error::Backend(format!(
                "eigenpair residual {res:.3e} exceeds 1e-9·‖A‖ for λ = {lambda}"
            )));
        }
        eigenvectors.push(CVector(v));
        residuals.push(res);
    }
    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
        residuals,
        singular_values,
    })
}

/// Thin SVD computed by faer, in nalgebra's layout.
fn faer_svd(m: &DMatrix<C64>) -> Option<SVD<C64, Dyn, Dyn>> {
    let (r, c) = m.shape();
    let f = faer::Mat::<C64>::from_fn(r, c, |i, j| m[(i, j)]);
    let svd = f.thin_svd().ok()?;
    let k = r.min(c);
    let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
    Some(SVD {
        u: Some(DMatrix::from_fn(r, k, |i, j| u[(i, j)])),
        v_t: Some(DMatrix::from_fn(k, c, |i, j| v[(j, i)].conj())),
        singular_values: DVector::from_fn(k, |i, _| s[i].re),
    })
}

/// Full SVD with a reconstruction check. Singular vectors come from faer:
/// nalgebra's complex SVD returns wrong factorizations for a few percent of
/// singular inputs, although its singular values alone are reliable.
pub(crate) fn checked_svd(m: &DMatrix<C64>) -> Result<SVD<C64, Dyn, Dyn>> {
    let svd = faer_svd(m).ok_or_else(|| Error::Backend("SVD did not converge".into()))?;
    let rec = svd
        .clone()
        .recompose()
        .map_err(|e| Error::Backend(format!("SVD recomposition failed: {e}")))?;
    let tol = 1e-9 * m.norm().max(f64::MIN_POSITIVE);
    if (rec - m).norm() > tol {
        return Err(Error::Backend("SVD failed its reconstruction check".into()));
    }
    Ok(svd)
}

pub(crate) fn singular_values_desc(m: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Smallest singular value of a square matrix.
pub fn smallest_singular_value(m: DMatrix<C64>) -> f64 {
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues_desc(h: DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors (columns)
/// of a Hermitian matrix.
pub fn hermitian_eigenvectors(h: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn e(n: usize, i: usize) -> CVector {
        CVector::basis(n, i)
    }

    #[test]
    fn rank_one_apply_basis_actions() {
        let r = RankOne::new(e(3, 0), e(3, 1)).unwrap();
        assert_eq!(rank_one_apply(&r, &e(3, 1)).unwrap(), e(3, 0));
        assert_eq!(rank_one_apply(&r, &e(3, 0)).unwrap(), CVector::zeros(3));

        let x = CVector::from_slice(&[c64(1.0, 2.0), c64(-0.5, 0.0), c64(0.0, 3.0)]).unwrap();
        let f = CVector::from_slice(&[c64(0.6, 0.0), c64(0.0, 0.8), c64(0.0, 0.0)]).unwrap();
        let r = RankOne::new(x.clone(), f.clone()).unwrap();
        let out = rank_one_apply(&r, &f).unwrap();
        assert_abs_diff_eq!(out.sub(&x).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rank_one_apply_dimension_mismatch() {
        let r = RankOne::new(e(3, 0), e(3, 1)).unwrap();
        assert!(matches!(
            rank_one_apply(&r, &e(4, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(RankOne::new(e(3, 0), e(2, 0)).is_err());
    }

    #[test]
    fn rank_one_matrix_entries() {
        let x = CVector::from_slice(&[c64(1.0, 1.0), c64(2.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let f = CVector::from_slice(&[c64(0.0, 1.0), c64(1.0, 0.0), c64(3.0, -1.0)]).unwrap();
        let m = RankOne::new(x.clone(), f.clone()).unwrap().to_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), x.get(i) * f.get(j).conj());
            }
        }
    }

    #[test]
    fn skew_product_examples() {
        let b = CMatrix::from_fn(3, |i, j| c64(i as f64 + 1.0, j as f64 - 1.0));
        let p = skew_product(&CMatrix::identity(3), &b).unwrap();
        assert_abs_diff_eq!(p.max_abs_diff(&b), 0.0);

        let a = RankOne::new(e(3, 0), e(3, 0)).unwrap().to_matrix();
        let g = CVector::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let b = RankOne::new(e(3, 1), g).unwrap().to_matrix();
        let p = skew_product(&a, &b).unwrap();
        assert_abs_diff_eq!(p.frobenius_norm(), 0.0);

        assert!(skew_product(&CMatrix::identity(3), &CMatrix::identity(4)).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let real = CMatrix::from_fn(3, |i, j| c64((i * 3 + j) as f64, 0.0));
        assert_eq!(conjugate_matrix(&real), real);

        let a = CMatrix::unit(2, 0, 1).scale(c64(0.0, 1.0));
        let expected = CMatrix::unit(2, 0, 1).scale(c64(0.0, -1.0));
        assert_eq!(conjugate_matrix(&a), expected);
        assert_eq!(conjugate_matrix(&conjugate_matrix(&a)), a);
    }

    #[test]
    fn norm_examples() {
        let x = CVector::from_real(&[3.0, 4.0, 0.0]).unwrap();
        let f = CVector::from_slice(&[c64(0.0, 1.0), c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let r = RankOne::new(x, f).unwrap();
        assert_abs_diff_eq!(
            unitary_invariant_norm(&r.to_matrix(), NormKind::Operator),
            5.0 * 2f64.sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            unitary_invariant_norm(&CMatrix::identity(3), NormKind::Schatten(2.0)),
            3f64.sqrt(),
            epsilon = 1e-12
        );
        let d = CMatrix::from_real_diagonal(&[3.0, 2.0, 1.0]);
        assert_abs_diff_eq!(unitary_invariant_norm(&d, NormKind::KyFan(2)), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(unitary_invariant_norm(&d, NormKind::KyFan(7)), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(unitary_invariant_norm(&d, NormKind::Trace), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            unitary_invariant_norm(&d, NormKind::Frobenius),
            14f64.sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            unitary_invariant_norm(&d, NormKind::Schatten(1.0)),
            6.0,
            epsilon = 1e-12
        );
        assert_eq!(NormKind::schatten(f64::INFINITY).unwrap(), NormKind::Operator);
        assert!(NormKind::schatten(0.5).is_err());
        assert!(NormKind::ky_fan(0).is_err());
    }

    #[test]
    fn partial_isometry_examples() {
        // unitary A with identity target
        let u = CMatrix::from_rows(&[
            vec![c64(0.0, 1.0), c64(0.0, 0.0), c64(0.0, 0.0)],
            vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
            vec![c64(0.0, 0.0), c64(-1.0, 0.0), c64(0.0, 0.0)],
        ])
        .unwrap();
        let v = right_support_partial_isometry(&u, &DMatrix::identity(3, 3)).unwrap();
        assert!(v.matrix().is_unitary(1e-12));

        // A = e1⊗e1: V_A = w⊗e1 with unit w, V_A^H V_A = e1⊗e1
        let a = RankOne::new(e(3, 0), e(3, 0)).unwrap().to_matrix();
        let v = right_support_partial_isometry(&a, &DMatrix::identity(3, 3)).unwrap();
        let p = v.initial_projection();
        assert_abs_diff_eq!(p.max_abs_diff(&a), 0.0, epsilon = 1e-12);
        let w = v.matrix().apply(&e(3, 0));
        assert_abs_diff_eq!(w.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.matrix().apply(&e(3, 1)).norm(), 0.0, epsilon = 1e-12);

        // A = 0
        let v = right_support_partial_isometry(&CMatrix::zeros(3), &DMatrix::identity(3, 3)).unwrap();
        assert_eq!(v.matrix().frobenius_norm(), 0.0);
    }

    #[test]
    fn partial_isometry_rank_deficient_target() {
        let target = DMatrix::<C64>::identity(3, 1);
        let err = right_support_partial_isometry(&CMatrix::identity(3), &target).unwrap_err();
        assert!(matches!(
            err,
            Error::RankDeficientTarget {
                required: 3,
                available: 1
            }
        ));
    }

    #[test]
    fn spectral_data_examples() {
        let d = CMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]);
        let sd = spectral_data(&d).unwrap();
        let mut ev: Vec<f64> = sd.eigenvalues.iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        for (got, want) in sd.singular_values.iter().zip([3.0, 2.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }

        let x = CVector::from_real(&[1.0, 2.0, 2.0]).unwrap();
        let f = CVector::from_real(&[0.0, 3.0, 4.0]).unwrap();
        let sd = spectral_data(&RankOne::new(x, f).unwrap().to_matrix()).unwrap();
        assert_abs_diff_eq!(sd.singular_values[0], 15.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sd.singular_values[1], 0.0, epsilon = 1e-12);

        // nilpotent: defective eigenvalue 0, residual still tiny
        let sd = spectral_data(&CMatrix::unit(3, 0, 1)).unwrap();
        assert!(sd.residuals.iter().all(|&r| r <= 1e-9));
    }

    #[test]
    fn from_matrix_rejects_higher_rank() {
        assert!(RankOne::from_matrix(&CMatrix::identity(3)).is_err());
        assert!(RankOne::from_matrix(&CMatrix::zeros(3)).is_err());
        let a = RankOne::new(
            CVector::from_slice(&[c64(1.0, 1.0), c64(0.0, 2.0), c64(1.0, 0.0)]).unwrap(),
            CVector::from_real(&[0.5, -1.0, 2.0]).unwrap(),
        )
        .unwrap()
        .to_matrix();
        let r = RankOne::from_matrix(&a).unwrap();
        assert_abs_diff_eq!(r.to_matrix().max_abs_diff(&a), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.right.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            CMatrix::new(DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(CMatrix::new(DMatrix::zeros(0, 0)), Err(Error::EmptyDimension)));
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(1, 0)] = c64(f64::NAN, 0.0);
        assert!(matches!(CMatrix::new(m), Err(Error::NonFinite(_))));
        assert!(CVector::from_real(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn rank_one_factorization_with_zero_rows_reconstructs() {
        // this family tripped nalgebra's SVD without the reconstruction check
        for seed in 0..2000 {
            let mut rng = random::seeded(seed);
            let n = 3 + (seed % 6) as usize;
            let mut m = random::rank_r_matrix(&mut rng, n, 1).into_inner();
            m.row_mut(n - 1).fill(c64(0.0, 0.0));
            m.column_mut(n - 1).fill(c64(0.0, 0.0));
            let a = CMatrix::new(m).unwrap();
            let r = RankOne::from_matrix(&a).unwrap();
            assert!(r.to_matrix().max_abs_diff(&a) < 1e-12 * a.frobenius_norm(), "seed {seed}");
        }
    }
}
