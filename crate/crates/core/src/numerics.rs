//! Rank-revealing factorizations and subspace utilities.
//!
//! Every rank decision in the crate goes through [`numerical_rank`]: a
//! singular value counts when it exceeds `tol * sigma_max`. The tolerance is
//! always passed explicitly; [`DEFAULT_RANK_TOL`] is the value the public
//! entry points and the CLI default to.

use nalgebra::{DMatrix, DVector};

/// Relative rank tolerance used unless the caller overrides it.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Singular values within this factor of the rank threshold are flagged as
/// boundary cases.
pub const BOUNDARY_FACTOR: f64 = 10.0;

/// Thin singular value decomposition `m = u * diag(s) * v_t`, singular values
/// sorted in decreasing order. Handles empty matrices.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

pub fn svd(m: &DMatrix<f64>) -> Svd {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Svd {
            u: DMatrix::zeros(rows, 0),
            singular_values: DVector::zeros(0),
            v_t: DMatrix::zeros(0, cols),
        };
    }
    // nalgebra's SVD loses accuracy on some rank-deficient inputs; faer's does not.
    let f = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let Ok(svd) = f.thin_svd() else {
        let svd = m.clone().svd(true, true);
        return Svd {
            u: svd.u.expect("u requested"),
            singular_values: svd.singular_values,
            v_t: svd.v_t.expect("v_t requested"),
        };
    };
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = s.nrows();
    Svd {
        u: DMatrix::from_fn(rows, k, |i, j| u[(i, j)]),
        singular_values: DVector::from_fn(k, |i, _| s[i]),
        v_t: DMatrix::from_fn(k, cols, |i, j| v[(j, i)]),
    }
}

/// Number of singular values strictly above `tol * sigma_max`.
pub fn numerical_rank(singular_values: &DVector<f64>, tol: f64) -> usize {
    let max = singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if max <= 0.0 || !max.is_finite() {
        return 0;
    }
    let threshold = tol * max;
    singular_values.iter().filter(|&&s| s > threshold).count()
}

/// Outcome of a numerical rank decision, including the full spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub tolerance: f64,
    /// Absolute cut-off `tolerance * sigma_max`.
    pub threshold: f64,
    /// Singular values lying within [`BOUNDARY_FACTOR`] of the threshold on
    /// either side; a non-empty list means the rank decision is fragile.
    pub near_threshold: Vec<f64>,
}

impl RankReport {
    pub fn is_ambiguous(&self) -> bool {
        !self.near_threshold.is_empty()
    }
}

pub fn rank_report(m: &DMatrix<f64>, tol: f64) -> RankReport {
    let sv = svd(m).singular_values;
    report_from_singular_values(&sv, tol)
}

pub(crate) fn report_from_singular_values(sv: &DVector<f64>, tol: f64) -> RankReport {
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let threshold = tol * max;
    let near_threshold = if max > 0.0 {
        sv.iter()
            .cloned()
            .filter(|&s| s > threshold / BOUNDARY_FACTOR && s < threshold * BOUNDARY_FACTOR)
            .collect()
    } else {
        Vec::new()
    };
    RankReport {
        rank: numerical_rank(sv, tol),
        singular_values: sv.iter().cloned().collect(),
        tolerance: tol,
        threshold,
        near_threshold,
    }
}

/// Rank factorization `h ≈ left * right` with `left = U Σ^{1/2}` and
/// `right = Σ^{1/2} Vᵀ`, truncated at the numerical rank.
#[derive(Debug, Clone)]
pub struct RankFactorization {
    pub left: DMatrix<f64>,
    pub right: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub tolerance: f64,
}

pub fn rank_factorize(h: &DMatrix<f64>, tol: f64) -> RankFactorization {
    let Svd {
        u,
        singular_values,
        v_t,
    } = svd(h);
    let rank = numerical_rank(&singular_values, tol);
    let mut left = u.columns(0, rank).into_owned();
    let mut right = v_t.rows(0, rank).into_owned();
    for k in 0..rank {
        let root = singular_values[k].sqrt();
        left.column_mut(k).scale_mut(root);
        right.row_mut(k).scale_mut(root);
    }
    RankFactorization {
        left,
        right,
        singular_values: singular_values.iter().cloned().collect(),
        rank,
        tolerance: tol,
    }
}

/// Moore-Penrose pseudoinverse, discarding singular values at or below
/// `tol * sigma_max`.
pub fn pseudoinverse(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    let Svd {
        u,
        singular_values,
        v_t,
    } = svd(m);
    let rank = numerical_rank(&singular_values, tol);
    let mut out = DMatrix::zeros(cols, rows);
    for k in 0..rank {
        let inv = 1.0 / singular_values[k];
        out += (v_t.row(k).transpose() * u.column(k).transpose()) * inv;
    }
    out
}

/// A linear subspace of `R^ambient`, stored as a matrix with orthonormal
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Wraps a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Subspace { basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            basis: DMatrix::identity(ambient, ambient),
        }
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn into_basis(self) -> DMatrix<f64> {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Distance of `x` from the subspace, relative to `‖x‖` (0 for `x = 0`).
    pub fn relative_distance(&self, x: &DVector<f64>) -> f64 {
        let norm = x.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let residual = x - &self.basis * (self.basis.transpose() * x);
        residual.norm() / norm
    }
}

/// Orthonormal basis of the column space of `m`.
pub fn image_basis(m: &DMatrix<f64>, tol: f64) -> Subspace {
    let Svd {
        u, singular_values, ..
    } = svd(m);
    let rank = numerical_rank(&singular_values, tol);
    Subspace {
        basis: u.columns(0, rank).into_owned(),
    }
}

/// Orthonormal basis of the null space of `m`.
pub fn kernel_basis(m: &DMatrix<f64>, tol: f64) -> Subspace {
    let row_space = image_basis(&m.transpose(), tol);
    if m.nrows() == 0 {
        return Subspace::full(m.ncols());
    }
    orth_complement(&row_space)
}

/// Orthogonal complement within the ambient space.
pub fn orth_complement(s: &Subspace) -> Subspace {
    let n = s.ambient();
    if s.dim() == 0 {
        return Subspace::full(n);
    }
    if s.dim() >= n {
        return Subspace::zero(n);
    }
    let residual = DMatrix::identity(n, n) - s.projector();
    // The complementary projector has exactly n - dim unit singular values.
    let Svd { u, .. } = svd(&residual);
    Subspace {
        basis: u.columns(0, n - s.dim()).into_owned(),
    }
}

/// Sum of two subspaces.
pub fn span_union(a: &Subspace, b: &Subspace, tol: f64) -> Subspace {
    let mut m = DMatrix::zeros(a.ambient(), a.dim() + b.dim());
    m.columns_mut(0, a.dim()).copy_from(a.basis());
    m.columns_mut(a.dim(), b.dim()).copy_from(b.basis());
    image_basis(&m, tol)
}

/// Intersection, computed as the kernel of the stacked complement projections.
pub fn intersect(a: &Subspace, b: &Subspace, tol: f64) -> Subspace {
    let n = a.ambient();
    let ca = orth_complement(a);
    let cb = orth_complement(b);
    let mut stacked = DMatrix::zeros(ca.dim() + cb.dim(), n);
    stacked
        .rows_mut(0, ca.dim())
        .copy_from(&ca.basis().transpose());
    stacked
        .rows_mut(ca.dim(), cb.dim())
        .copy_from(&cb.basis().transpose());
    kernel_basis(&stacked, tol)
}

/// Principal angles between two subspaces, in increasing order, in
/// `[0, π/2]`. Returns `min(dim a, dim b)` angles.
///
/// Angles are computed as `atan2(sin, cos)` from both the cosine and sine
/// spectra so that tiny angles keep full relative accuracy.
pub fn principal_angles(a: &Subspace, b: &Subspace) -> Vec<f64> {
    let (small, large) = if a.dim() <= b.dim() { (a, b) } else { (b, a) };
    let k = small.dim();
    if k == 0 {
        return Vec::new();
    }
    let cross = large.basis().transpose() * small.basis();
    let mut cosines: Vec<f64> = svd(&cross).singular_values.iter().cloned().collect();
    cosines.resize(k, 0.0);
    let perp = small.basis() - large.basis() * &cross;
    let mut sines: Vec<f64> = svd(&perp).singular_values.iter().cloned().collect();
    sines.resize(k, 0.0);
    sines.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // cosines are sorted decreasing; pair the largest cosine with the smallest sine
    cosines
        .iter()
        .zip(sines.iter())
        .map(|(&c, &s)| s.min(1.0).atan2(c.min(1.0)))
        .collect()
}

/// True when the subspaces have equal dimension and every principal angle is
/// below `angle_tol`.
pub fn same_span(a: &Subspace, b: &Subspace, angle_tol: f64) -> bool {
    a.ambient() == b.ambient()
        && a.dim() == b.dim()
        && principal_angles(a, b).iter().all(|&t| t < angle_tol)
}

/// Largest absolute entry (0 for empty matrices).
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Horizontal concatenation of equally tall blocks.
pub fn hstack(rows: usize, blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Vertical concatenation of equally wide blocks.
pub fn vstack(cols: usize, blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.rows_mut(at, b.nrows()).copy_from(b);
        at += b.nrows();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp_residuals(m: &DMatrix<f64>, p: &DMatrix<f64>) -> [f64; 4] {
        [
            max_abs_diff(&(m * p * m), m),
            max_abs_diff(&(p * m * p), p),
            max_abs_diff(&(m * p), &(m * p).transpose()),
            max_abs_diff(&(p * m), &(p * m).transpose()),
        ]
    }

    #[test]
    fn rank_of_zero_and_outer_product() {
        assert_eq!(rank_factorize(&DMatrix::zeros(4, 3), DEFAULT_RANK_TOL).rank, 0);
        let u = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let v = DVector::from_vec(vec![3.0, 1.0]);
        let f = rank_factorize(&(&u * v.transpose()), DEFAULT_RANK_TOL);
        assert_eq!(f.rank, 1);
        assert!(max_abs_diff(&(&f.left * &f.right), &(&u * v.transpose())) < 1e-14);
    }

    #[test]
    fn factorization_residual_bound() {
        let h = DMatrix::from_fn(7, 9, |i, j| ((i * 3 + j * 5) % 7) as f64 - 3.0);
        let f = rank_factorize(&h, DEFAULT_RANK_TOL);
        let smax = f.singular_values[0];
        let bound = 10.0 * f.rank as f64 * f64::EPSILON * smax * 7.0;
        assert!(max_abs_diff(&(&f.left * &f.right), &h) <= bound);
        assert_eq!(image_basis(&f.left, DEFAULT_RANK_TOL).dim(), f.rank);
        assert_eq!(image_basis(&f.right.transpose(), DEFAULT_RANK_TOL).dim(), f.rank);
    }

    #[test]
    fn pseudoinverse_examples() {
        let i3 = DMatrix::<f64>::identity(3, 3);
        assert!(max_abs_diff(&pseudoinverse(&i3, DEFAULT_RANK_TOL), &i3) < 1e-15);
        let d = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let expected = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        assert!(max_abs_diff(&pseudoinverse(&d, DEFAULT_RANK_TOL), &expected) < 1e-15);
        let tall = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 0.0, 1.0, -1.0, 3.0, 2.0, 2.0]);
        let p = pseudoinverse(&tall, DEFAULT_RANK_TOL);
        assert!(max_abs_diff(&(&p * &tall), &DMatrix::identity(2, 2)) < 1e-12);
        for r in mp_residuals(&tall, &p) {
            assert!(r < 1e-12);
        }
    }

    #[test]
    fn pseudoinverse_of_rank_deficient_satisfies_penrose() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0]);
        let p = pseudoinverse(&a, DEFAULT_RANK_TOL);
        for r in mp_residuals(&a, &p) {
            assert!(r < 1e-10);
        }
        assert_eq!(pseudoinverse(&DMatrix::zeros(0, 3), DEFAULT_RANK_TOL).shape(), (3, 0));
    }

    #[test]
    fn subspace_operations() {
        let v = image_basis(
            &DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]),
            DEFAULT_RANK_TOL,
        );
        assert_eq!(v.dim(), 2);
        let vv = intersect(&v, &v, DEFAULT_RANK_TOL);
        assert!(same_span(&vv, &v, 1e-12));
        assert!(principal_angles(&v, &vv).iter().all(|&a| a < 1e-12));
        assert_eq!(orth_complement(&Subspace::full(4)).dim(), 0);
        let c = orth_complement(&v);
        assert_eq!(c.dim(), 1);
        assert!((v.basis().transpose() * c.basis()).amax() < 1e-14);
        let k = kernel_basis(&DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]), DEFAULT_RANK_TOL);
        assert_eq!(k.dim(), 2);
    }

    #[test]
    fn principal_angles_of_known_planes() {
        let e1 = Subspace::from_orthonormal(DMatrix::from_column_slice(2, 1, &[1.0, 0.0]));
        let t = 1e-11_f64;
        let tilted =
            Subspace::from_orthonormal(DMatrix::from_column_slice(2, 1, &[t.cos(), t.sin()]));
        let angle = principal_angles(&e1, &tilted)[0];
        assert!((angle - t).abs() < 1e-20);
        let e2 = Subspace::from_orthonormal(DMatrix::from_column_slice(2, 1, &[0.0, 1.0]));
        assert!((principal_angles(&e1, &e2)[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(!same_span(&e1, &Subspace::full(2), 1e-9));
    }

    #[test]
    fn boundary_singular_values_are_flagged() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3e-9, 1e-14]));
        let report = rank_report(&d, DEFAULT_RANK_TOL);
        assert_eq!(report.rank, 2);
        assert!(report.is_ambiguous());
        let clean = rank_report(&DMatrix::<f64>::identity(3, 3), DEFAULT_RANK_TOL);
        assert!(!clean.is_ambiguous());
    }
}
