//! Rational representations of finite families of formal power series.
//!
//! A representation `R = (A_σ, B, C)` represents the family `{S_j}` when
//! `S_j(w) = C A_w B_j` for every word `w` and index `j`. Indices `j` are
//! 0-based positions in an ordered index set.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hankel::{enumerate_words, HankelBlockMatrix, HankelLayout};
use crate::lss_core::{apply_word, word_matrix_product, ModeWord};
use crate::numerics::{
    hstack, image_basis, max_abs, max_abs_diff, numerical_rank, orth_complement, pseudoinverse, rank_factorize,
    report_from_singular_values, svd, RankReport, Subspace, DEFAULT_RANK_TOL,
};

/// A family `{S_j : j ∈ J}` of series over a finite alphabet with values in
/// `R^coef_dim`.
pub trait SeriesFamily {
    fn alphabet(&self) -> usize;
    fn index_count(&self) -> usize;
    fn coef_dim(&self) -> usize;
    /// Longest word with a known coefficient; `None` when unbounded.
    fn depth(&self) -> Option<usize>;
    /// `S_j(w)` for the 0-based index `j`.
    fn coefficient(&self, j: usize, w: &ModeWord) -> Result<DVector<f64>>;

    fn layout(&self) -> HankelLayout {
        HankelLayout {
            alphabet: self.alphabet(),
            coef_dim: self.coef_dim(),
            index_count: self.index_count(),
        }
    }
}

/// Hankel matrix of a series family: entry `((v, i), (w, j))` is
/// `[S_j(w v)]_i`, rows up to `row_depth`, columns up to `col_depth`.
pub fn series_hankel(
    psi: &dyn SeriesFamily,
    row_depth: usize,
    col_depth: usize,
    entry_cap: usize,
) -> Result<HankelBlockMatrix> {
    let layout = psi.layout();
    if let Some(depth) = psi.depth() {
        if depth < row_depth + col_depth {
            return Err(Error::OutOfDepth {
                length: row_depth + col_depth,
                depth,
            });
        }
    }
    let (rows, cols) = (layout.rows(row_depth), layout.cols(col_depth));
    let entries = rows.saturating_mul(cols);
    if entries > entry_cap {
        return Err(Error::TooLarge { entries, cap: entry_cap });
    }
    let row_words = enumerate_words(layout.alphabet, row_depth);
    let col_words = enumerate_words(layout.alphabet, col_depth);
    let mut matrix = DMatrix::zeros(rows, cols);
    for (c, w) in col_words.iter().enumerate() {
        for (r, v) in row_words.iter().enumerate() {
            let wv = w.concat(v);
            for j in 0..layout.index_count {
                let s = psi.coefficient(j, &wv)?;
                matrix
                    .view_mut((r * layout.coef_dim, c * layout.index_count + j), (layout.coef_dim, 1))
                    .copy_from(&s);
            }
        }
    }
    HankelBlockMatrix::from_matrix(layout, row_depth, col_depth, matrix)
}

/// Largest coefficient difference between two families over all words up to
/// `depth`.
pub fn series_difference(a: &dyn SeriesFamily, b: &dyn SeriesFamily, depth: usize) -> Result<f64> {
    if a.layout() != b.layout() {
        return Err(Error::Shape(format!(
            "series families have layouts {:?} and {:?}",
            a.layout(),
            b.layout()
        )));
    }
    let mut worst = 0.0_f64;
    for w in enumerate_words(a.alphabet(), depth) {
        for j in 0..a.index_count() {
            worst = worst.max((a.coefficient(j, &w)? - b.coefficient(j, &w)?).amax());
        }
    }
    Ok(worst)
}

/// `R = (A_σ, B, C)` with `B` holding one column per index.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalRepresentation {
    a: Vec<DMatrix<f64>>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
}

impl RationalRepresentation {
    pub fn new(a: Vec<DMatrix<f64>>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Shape("the alphabet must not be empty".into()));
        }
        let n = b.nrows();
        if let Some((k, bad)) = a.iter().enumerate().find(|(_, m)| m.shape() != (n, n)) {
            return Err(Error::Shape(format!(
                "transition matrix of letter {} is {:?}, expected ({n}, {n})",
                k + 1,
                bad.shape()
            )));
        }
        if c.ncols() != n {
            return Err(Error::dims("readout columns", n, c.ncols()));
        }
        Ok(RationalRepresentation { a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.nrows()
    }

    /// Transition matrix of the 1-based letter `sigma`.
    pub fn a(&self, sigma: usize) -> &DMatrix<f64> {
        &self.a[sigma - 1]
    }

    pub fn a_family(&self) -> &[DMatrix<f64>] {
        &self.a
    }

    /// Initial vectors, one column per index.
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// `C A_w B_j`.
    pub fn series(&self, j: usize, w: &ModeWord) -> Result<DVector<f64>> {
        if j >= self.b.ncols() {
            return Err(Error::Shape(format!("index {j} outside 0..{}", self.b.ncols())));
        }
        let x = apply_word(&self.a, w, &self.b.column(j).into_owned())?;
        Ok(&self.c * x)
    }

    /// Representation in the coordinates `x' = t x`.
    pub fn transformed(&self, t: &DMatrix<f64>, t_inv: &DMatrix<f64>) -> Self {
        RationalRepresentation {
            a: self.a.iter().map(|a| t * a * t_inv).collect(),
            b: t * &self.b,
            c: &self.c * t_inv,
        }
    }

    /// Restriction to the coordinates `x = basis · x'`, where the columns of
    /// `basis` are orthonormal and span an invariant subspace (`left` is the
    /// map applied on the left, usually `basisᵀ`).
    fn compressed(&self, left: &DMatrix<f64>, basis: &DMatrix<f64>) -> Self {
        RationalRepresentation {
            a: self.a.iter().map(|a| left * a * basis).collect(),
            b: left * &self.b,
            c: &self.c * basis,
        }
    }

    /// Largest absolute entry among all matrices.
    pub fn scale(&self) -> f64 {
        self.a
            .iter()
            .map(max_abs)
            .fold(max_abs(&self.b).max(max_abs(&self.c)), f64::max)
    }
}

impl SeriesFamily for RationalRepresentation {
    fn alphabet(&self) -> usize {
        self.a.len()
    }

    fn index_count(&self) -> usize {
        self.b.ncols()
    }

    fn coef_dim(&self) -> usize {
        self.c.nrows()
    }

    fn depth(&self) -> Option<usize> {
        None
    }

    fn coefficient(&self, j: usize, w: &ModeWord) -> Result<DVector<f64>> {
        self.series(j, w)
    }
}

/// Result of a breadth-first span growth: the subspace and the dimension
/// after each level (level `k` covers words of length at most `k`).
#[derive(Debug, Clone)]
pub struct SpanGrowth {
    pub space: Subspace,
    pub levels: Vec<usize>,
}

impl SpanGrowth {
    /// The level at which the span stopped growing.
    pub fn saturation_level(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }
}

/// Span of `{A_w g : |w| ≥ 0, g a column of generators}`, grown one word
/// length at a time until two consecutive levels agree.
pub fn grow_span(family: &[DMatrix<f64>], generators: &DMatrix<f64>, tol: f64) -> SpanGrowth {
    let n = generators.nrows();
    let mut space = image_basis(generators, tol);
    let mut levels = vec![space.dim()];
    while space.dim() < n && space.dim() > 0 {
        let v = space.basis();
        let mut blocks = vec![v.clone()];
        blocks.extend(family.iter().map(|a| a * v));
        let stacked = hstack(n, &blocks);
        let next = image_basis(&stacked, tol);
        if next.dim() <= space.dim() {
            break;
        }
        space = next;
        levels.push(space.dim());
    }
    debug_assert!(n == 0 || levels.len() <= n, "span growth saturates within dim - 1 steps");
    SpanGrowth { space, levels }
}

/// `W_R = span{A_w B_j}` with its growth profile.
pub fn reach_growth(r: &RationalRepresentation, tol: f64) -> SpanGrowth {
    grow_span(&r.a, &r.b, tol)
}

pub fn reach_space(r: &RationalRepresentation, tol: f64) -> Subspace {
    reach_growth(r, tol).space
}

/// `O_R = ∩_w ker C A_w`, the unobservable subspace.
pub fn obs_space(r: &RationalRepresentation, tol: f64) -> Subspace {
    orth_complement(&observable_directions(r, tol))
}

/// `O_R^⊥ = span{A_wᵀ Cᵀ}`.
fn observable_directions(r: &RationalRepresentation, tol: f64) -> Subspace {
    let transposed: Vec<DMatrix<f64>> = r.a.iter().map(|a| a.transpose()).collect();
    grow_span(&transposed, &r.c.transpose(), tol).space
}

pub fn is_reachable(r: &RationalRepresentation, tol: f64) -> bool {
    reach_space(r, tol).dim() == r.dim()
}

pub fn is_observable(r: &RationalRepresentation, tol: f64) -> bool {
    obs_space(r, tol).dim() == 0
}

/// Restriction to `W_R`. Returns the reduced representation and the
/// orthonormal basis `V` of `W_R`; `V` maps reduced states into the original
/// state space.
pub fn reach_reduce(r: &RationalRepresentation, tol: f64) -> (RationalRepresentation, DMatrix<f64>) {
    let basis = reach_space(r, tol).into_basis();
    let reduced = r.compressed(&basis.transpose(), &basis);
    (reduced, basis)
}

/// Quotient by `O_R`, realized on the orthogonal complement of `O_R`.
/// Returns the reduced representation and the projection `Uᵀ` taking
/// original states to reduced ones.
pub fn obs_reduce(r: &RationalRepresentation, tol: f64) -> (RationalRepresentation, DMatrix<f64>) {
    let basis = observable_directions(r, tol).into_basis();
    let projection = basis.transpose();
    let reduced = r.compressed(&projection, &basis);
    (reduced, projection)
}

/// A minimal representation together with the maps relating it to the input
/// representation `R`: `embedding` maps the reachable part `R_r` into `R`,
/// `quotient` maps `R_r` onto the minimal one.
#[derive(Debug, Clone)]
pub struct MinimalRepr {
    pub repr: RationalRepresentation,
    pub embedding: DMatrix<f64>,
    pub quotient: DMatrix<f64>,
}

/// Reachability reduction followed by observability reduction.
pub fn minimize_repr(r: &RationalRepresentation, tol: f64) -> MinimalRepr {
    let (reachable, embedding) = reach_reduce(r, tol);
    let (repr, quotient) = obs_reduce(&reachable, tol);
    MinimalRepr {
        repr,
        embedding,
        quotient,
    }
}

/// Column positions of `(w, j)` and `(wσ, j)` for all `|w| < col_depth`.
fn shift_columns(layout: HankelLayout, col_depth: usize) -> (Vec<usize>, Vec<Vec<usize>>) {
    let words = enumerate_words(layout.alphabet, col_depth - 1);
    let mut base = Vec::new();
    let mut shifted = vec![Vec::new(); layout.alphabet];
    for w in &words {
        for j in 0..layout.index_count {
            base.push(layout.col_index(w, j));
            for (k, cols) in shifted.iter_mut().enumerate() {
                cols.push(layout.col_index(&w.push(k + 1), j));
            }
        }
    }
    (base, shifted)
}

fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    m.select_columns(cols.iter())
}

/// Representation on the column space of a Hankel matrix: `B_j` is column
/// `(ε, j)`, `C` reads rows `(ε, ·)` and `A_σ` shifts column `(w, j)` to
/// `(wσ, j)`. Coordinates are taken in an orthonormal basis of the column
/// space.
pub fn repr_from_hankel(h: &HankelBlockMatrix, tol: f64) -> Result<RationalRepresentation> {
    let layout = h.layout();
    let hm = h.matrix();
    let space = image_basis(hm, tol);
    let rank = space.dim();
    let q = space.basis();
    let coords = q.transpose() * hm;
    let b = coords.columns(0, layout.index_count).into_owned();
    let c = q.rows(0, layout.coef_dim).into_owned();
    if rank == 0 {
        let a = vec![DMatrix::zeros(0, 0); layout.alphabet];
        return RationalRepresentation::new(a, b, c);
    }
    if h.col_depth() == 0 {
        return Err(Error::InsufficientDepth { residual: f64::INFINITY });
    }
    let (base, shifted) = shift_columns(layout, h.col_depth());
    let x = select_columns(&coords, &base);
    let x_rank = numerical_rank(&svd(&x).singular_values, tol);
    if x_rank < rank {
        return Err(Error::InsufficientDepth { residual: f64::INFINITY });
    }
    let x_pinv = pseudoinverse(&x, tol);
    let scale = max_abs(hm).max(f64::MIN_POSITIVE);
    let mut a = Vec::with_capacity(layout.alphabet);
    let mut worst = 0.0_f64;
    for cols in &shifted {
        let y = select_columns(&coords, cols);
        let a_sigma = &y * &x_pinv;
        worst = worst.max(max_abs_diff(&(&a_sigma * &x), &y) / scale);
        a.push(a_sigma);
    }
    if worst > shift_tolerance(tol) {
        return Err(Error::InsufficientDepth { residual: worst });
    }
    RationalRepresentation::new(a, b, c)
}

/// Relative residual allowed for the column-shift equations.
fn shift_tolerance(rank_tol: f64) -> f64 {
    (rank_tol * 1e3).max(1e-6)
}

/// Output of [`realization_algorithm`].
#[derive(Debug, Clone)]
pub struct HankelRealization {
    pub repr: RationalRepresentation,
    pub rank: RankReport,
}

/// Realization from `H_{Ψ,N,N+1}` through the factorization `H = O R̂` with
/// `O = UΣ^{1/2}`, `R̂ = Σ^{1/2}Vᵀ`: `B` is the first `|J|` columns of `R̂`,
/// `C` the first `coef_dim` rows of `O` and `A_σ = R̂_σ R̄⁺`, where `R̄`
/// holds the columns of words shorter than the column depth and `R̂_σ` their
/// σ-shifts.
pub fn realization_algorithm(h: &HankelBlockMatrix, tol: f64) -> Result<HankelRealization> {
    let layout = h.layout();
    let f = rank_factorize(h.matrix(), tol);
    let rank = report_from_singular_values(&DVector::from_vec(f.singular_values.clone()), tol);
    let b = f.right.columns(0, layout.index_count).into_owned();
    let c = f.left.rows(0, layout.coef_dim).into_owned();
    let a = if f.rank == 0 {
        vec![DMatrix::zeros(0, 0); layout.alphabet]
    } else {
        if h.col_depth() == 0 {
            return Err(Error::InsufficientDepth { residual: f64::INFINITY });
        }
        let (base, shifted) = shift_columns(layout, h.col_depth());
        let r_bar_pinv = pseudoinverse(&select_columns(&f.right, &base), tol);
        shifted
            .iter()
            .map(|cols| select_columns(&f.right, cols) * &r_bar_pinv)
            .collect()
    };
    Ok(HankelRealization {
        repr: RationalRepresentation::new(a, b, c)?,
        rank,
    })
}

/// Words whose generator blocks `A_w B` span the reachable space, found by a
/// breadth-first search that only extends words contributing new directions.
fn spanning_words(r: &RationalRepresentation, tol: f64) -> Vec<ModeWord> {
    let n = r.dim();
    let mut kept: Vec<ModeWord> = Vec::new();
    let mut gathered = DMatrix::zeros(n, 0);
    let mut rank = 0;
    let mut frontier = vec![ModeWord::empty()];
    while !frontier.is_empty() && rank < n {
        let mut next = Vec::new();
        for w in frontier {
            let block = word_matrix_product(&r.a, &w).expect("letters in range") * &r.b;
            let candidate = hstack(n, &[gathered.clone(), block]);
            let new_rank = numerical_rank(&svd(&candidate).singular_values, tol);
            if new_rank > rank {
                rank = new_rank;
                gathered = candidate;
                for sigma in 1..=r.alphabet() {
                    next.push(w.push(sigma));
                }
                kept.push(w);
            }
        }
        frontier = next;
    }
    kept
}

fn generator_matrix(r: &RationalRepresentation, words: &[ModeWord]) -> DMatrix<f64> {
    let blocks: Vec<DMatrix<f64>> = words
        .iter()
        .map(|w| word_matrix_product(&r.a, w).expect("letters in range") * &r.b)
        .collect();
    hstack(r.dim(), &blocks)
}

/// Residuals of the representation morphism equations `T B = B'`,
/// `T A_σ = A'_σ T`, `C' T = C`, relative to the larger scale of the two.
pub fn repr_morphism_residual(
    source: &RationalRepresentation,
    target: &RationalRepresentation,
    t: &DMatrix<f64>,
) -> Result<f64> {
    if source.layout() != target.layout() {
        return Err(Error::Shape("representations of different families".into()));
    }
    if t.shape() != (target.dim(), source.dim()) {
        return Err(Error::Shape(format!(
            "morphism is {:?}, expected ({}, {})",
            t.shape(),
            target.dim(),
            source.dim()
        )));
    }
    let mut worst = max_abs_diff(&(t * source.b()), target.b());
    worst = worst.max(max_abs_diff(&(target.c() * t), source.c()));
    for (a, a2) in source.a.iter().zip(&target.a) {
        worst = worst.max(max_abs_diff(&(t * a), &(a2 * t)));
    }
    Ok(worst / source.scale().max(target.scale()).max(1.0))
}

/// The isomorphism `T` with `T B = B'`, `T A_σ = A'_σ T`, `C' T = C` between
/// two minimal representations, computed from their generator matrices by
/// least squares and then verified.
pub fn repr_isomorphism(
    r1: &RationalRepresentation,
    r2: &RationalRepresentation,
    tol: f64,
) -> Result<DMatrix<f64>> {
    if r1.layout() != r2.layout() {
        return Err(Error::Shape("representations of different families".into()));
    }
    if r1.dim() != r2.dim() {
        return Err(Error::NotIsomorphic {
            residual: f64::INFINITY,
            tolerance: tol,
        });
    }
    let n = r1.dim();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let words = spanning_words(r1, DEFAULT_RANK_TOL);
    let g1 = generator_matrix(r1, &words);
    let g2 = generator_matrix(r2, &words);
    let t = &g2 * pseudoinverse(&g1, DEFAULT_RANK_TOL);
    let residual = repr_morphism_residual(r1, r2, &t)?;
    let invertible = numerical_rank(&svd(&t).singular_values, DEFAULT_RANK_TOL) == n;
    let residual = if invertible { residual } else { f64::INFINITY };
    if residual > tol {
        return Err(Error::NotIsomorphic { residual, tolerance: tol });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::DEFAULT_ENTRY_CAP;
    use crate::numerics::same_span;

    fn m(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    fn shift3() -> DMatrix<f64> {
        m(3, 3, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0])
    }

    #[test]
    fn nilpotent_shift_reaches_everything() {
        let r = RationalRepresentation::new(vec![shift3()], m(3, 1, &[1.0, 0.0, 0.0]), m(1, 3, &[0.0, 0.0, 1.0])).unwrap();
        let growth = reach_growth(&r, DEFAULT_RANK_TOL);
        assert_eq!(growth.space.dim(), 3);
        assert_eq!(growth.levels, [1, 2, 3]);
        assert!(growth.saturation_level() <= 2);
        assert!(is_observable(&r, DEFAULT_RANK_TOL));
    }

    #[test]
    fn trivial_spaces() {
        let full = RationalRepresentation::new(vec![shift3()], DMatrix::identity(3, 3), DMatrix::identity(3, 3)).unwrap();
        assert_eq!(reach_space(&full, DEFAULT_RANK_TOL).dim(), 3);
        assert_eq!(obs_space(&full, DEFAULT_RANK_TOL).dim(), 0);
        let blind = RationalRepresentation::new(vec![shift3()], DMatrix::identity(3, 1), DMatrix::zeros(2, 3)).unwrap();
        assert_eq!(obs_space(&blind, DEFAULT_RANK_TOL).dim(), 3);
        assert_eq!(obs_reduce(&blind, DEFAULT_RANK_TOL).0.dim(), 0);
        let silent = RationalRepresentation::new(vec![shift3()], DMatrix::zeros(3, 2), DMatrix::identity(3, 3)).unwrap();
        assert_eq!(reach_reduce(&silent, DEFAULT_RANK_TOL).0.dim(), 0);
    }

    #[test]
    fn reductions_preserve_series() {
        // reachable part is span{e1, e2}; e3 is unreachable
        let a1 = m(3, 3, &[0.0, 1.0, 0.5, 1.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
        let a2 = m(3, 3, &[1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let r = RationalRepresentation::new(vec![a1, a2], m(3, 1, &[1.0, 0.0, 0.0]), m(1, 3, &[1.0, 1.0, 1.0])).unwrap();
        let (rr, v) = reach_reduce(&r, DEFAULT_RANK_TOL);
        assert_eq!(rr.dim(), 2);
        assert_eq!(v.shape(), (3, 2));
        assert!(series_difference(&r, &rr, 5).unwrap() < 1e-12);
        assert!(repr_morphism_residual(&rr, &r, &v).unwrap() < 1e-12);
        let min = minimize_repr(&r, DEFAULT_RANK_TOL);
        assert!(series_difference(&r, &min.repr, 5).unwrap() < 1e-12);
        assert!(is_reachable(&min.repr, DEFAULT_RANK_TOL) && is_observable(&min.repr, DEFAULT_RANK_TOL));
    }

    #[test]
    fn hankel_rank_equals_minimal_dimension() {
        let a1 = m(2, 2, &[0.5, 1.0, 0.0, 0.3]);
        let a2 = m(2, 2, &[0.0, -1.0, 1.0, 0.2]);
        let r = RationalRepresentation::new(vec![a1, a2], m(2, 2, &[1.0, 0.0, 0.0, 0.0]), m(1, 2, &[1.0, 0.0])).unwrap();
        let doubled = RationalRepresentation::new(
            r.a.iter()
                .map(|a| {
                    let mut d = DMatrix::zeros(4, 4);
                    d.view_mut((0, 0), (2, 2)).copy_from(a);
                    d.view_mut((2, 2), (2, 2)).copy_from(a);
                    d
                })
                .collect(),
            crate::numerics::vstack(2, &[r.b.clone(), r.b.clone()]),
            hstack(1, &[r.c.clone() * 0.5, r.c.clone() * 0.5]),
        )
        .unwrap();
        assert!(series_difference(&r, &doubled, 4).unwrap() < 1e-12);
        let min = minimize_repr(&doubled, DEFAULT_RANK_TOL);
        assert_eq!(min.repr.dim(), minimize_repr(&r, DEFAULT_RANK_TOL).repr.dim());
        let h = series_hankel(&doubled, 3, 3, DEFAULT_ENTRY_CAP).unwrap();
        assert_eq!(crate::hankel::hankel_rank(&h, DEFAULT_RANK_TOL).rank, min.repr.dim());
    }

    #[test]
    fn realization_from_hankel_recovers_series() {
        let a1 = m(2, 2, &[0.5, 1.0, 0.0, 0.3]);
        let a2 = m(2, 2, &[0.0, -1.0, 1.0, 0.2]);
        let r = RationalRepresentation::new(vec![a1, a2], m(2, 2, &[1.0, 0.2, 0.0, 1.0]), m(1, 2, &[1.0, 0.0])).unwrap();
        let h = series_hankel(&r, 1, 2, DEFAULT_ENTRY_CAP).unwrap();
        let out = realization_algorithm(&h, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(out.rank.rank, 2);
        assert!(series_difference(&r, &out.repr, 5).unwrap() < 1e-10);
        let shifted = repr_from_hankel(&h, DEFAULT_RANK_TOL).unwrap();
        assert!(series_difference(&r, &shifted, 5).unwrap() < 1e-10);
        let t = repr_isomorphism(&out.repr, &shifted, 1e-9).unwrap();
        assert_eq!(t.shape(), (2, 2));
    }

    #[test]
    fn zero_hankel_gives_zero_dimension() {
        let layout = HankelLayout { alphabet: 2, coef_dim: 2, index_count: 3 };
        let h = HankelBlockMatrix::from_matrix(layout, 1, 2, DMatrix::zeros(layout.rows(1), layout.cols(2))).unwrap();
        assert_eq!(realization_algorithm(&h, DEFAULT_RANK_TOL).unwrap().repr.dim(), 0);
        assert_eq!(repr_from_hankel(&h, DEFAULT_RANK_TOL).unwrap().dim(), 0);
    }

    #[test]
    fn conjugate_representation_is_recovered() {
        let a1 = m(2, 2, &[0.5, 1.0, 0.0, 0.3]);
        let a2 = m(2, 2, &[0.0, -1.0, 1.0, 0.2]);
        let r = RationalRepresentation::new(vec![a1, a2], m(2, 1, &[1.0, 0.0]), m(1, 2, &[1.0, 0.5])).unwrap();
        let s = m(2, 2, &[2.0, 1.0, 0.5, 1.0]);
        let s_inv = s.clone().try_inverse().unwrap();
        let r2 = r.transformed(&s, &s_inv);
        let t = repr_isomorphism(&r, &r2, 1e-9).unwrap();
        assert!(max_abs_diff(&t, &s) < 1e-9);
        let same = repr_isomorphism(&r, &r, 1e-9).unwrap();
        assert!(max_abs_diff(&same, &DMatrix::identity(2, 2)) < 1e-12);
        let mut other = r2.clone();
        other.c[(0, 0)] += 1.0;
        assert!(matches!(repr_isomorphism(&r, &other, 1e-9), Err(Error::NotIsomorphic { .. })));
    }

    #[test]
    fn shallow_hankel_is_detected() {
        // a 3-state nilpotent shift needs words of length 2 before the columns stabilize
        let r = RationalRepresentation::new(vec![shift3()], m(3, 1, &[1.0, 0.0, 0.0]), m(1, 3, &[0.0, 0.0, 1.0])).unwrap();
        let h = series_hankel(&r, 1, 1, DEFAULT_ENTRY_CAP).unwrap();
        assert!(matches!(repr_from_hankel(&h, DEFAULT_RANK_TOL), Err(Error::InsufficientDepth { .. })));
        let deep = series_hankel(&r, 3, 3, DEFAULT_ENTRY_CAP).unwrap();
        let rep = repr_from_hankel(&deep, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(rep.dim(), 3);
        assert!(series_difference(&r, &rep, 6).unwrap() < 1e-10);
    }

    #[test]
    fn obs_reduction_keeps_reachability() {
        let a1 = m(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.5]);
        let b = m(3, 1, &[1.0, 0.0, 1.0]);
        let c = m(1, 3, &[1.0, 0.0, 0.0]);
        let r = RationalRepresentation::new(vec![a1], b, c).unwrap();
        assert!(is_reachable(&r, DEFAULT_RANK_TOL));
        let (ro, _) = obs_reduce(&r, DEFAULT_RANK_TOL);
        assert_eq!(ro.dim(), 2);
        assert!(is_reachable(&ro, DEFAULT_RANK_TOL));
        let expected = Subspace::from_orthonormal(m(3, 1, &[0.0, 0.0, 1.0]));
        assert!(same_span(&obs_space(&r, DEFAULT_RANK_TOL), &expected, 1e-12));
    }
}
