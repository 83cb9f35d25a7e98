//! Rank tests, reductions, minimization and realization for switched
//! systems.
//!
//! The reductions run on the associated rational representation and are
//! translated back through [`crate::bridge`].

use nalgebra::DMatrix;

use crate::bridge::{lss_of_repr, repr_of_lss};
use crate::error::{Error, Result};
use crate::hankel::{build_hankel, enumerate_words, word_count, HankelBlockMatrix, DEFAULT_ENTRY_CAP};
use crate::lss_core::{check_morphism, LssDims, LssMorphism, SwitchedLinearSystem};
use crate::markov::MarkovFamily;
use crate::numerics::{hstack, max_abs, rank_report, vstack, RankReport};
use crate::rational_repr::{
    minimize_repr, obs_reduce, reach_reduce, realization_algorithm, repr_from_hankel, repr_isomorphism,
};

/// Default relative tolerance for the post-hoc Markov validation of a
/// realization.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-8;

/// Default tolerance for isomorphism and morphism residuals.
pub const DEFAULT_MORPHISM_TOL: f64 = 1e-9;

/// `B̃ = [x0, B_1, …, B_D]`.
fn stacked_inputs(sys: &SwitchedLinearSystem) -> DMatrix<f64> {
    repr_of_lss(sys).b().clone()
}

/// `C̃ = [C_1; …; C_D]`.
fn stacked_outputs(sys: &SwitchedLinearSystem) -> DMatrix<f64> {
    vstack(sys.state_dim(), sys.c_family())
}

/// `R(Σ) = [A_{v_1}B̃, …, A_{v_k}B̃]` over all words shorter than `n`.
pub fn reach_matrix(sys: &SwitchedLinearSystem) -> Result<DMatrix<f64>> {
    let n = sys.state_dim();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let b = stacked_inputs(sys);
    let words = word_count(sys.modes(), n - 1);
    let entries = words.saturating_mul(b.ncols()).saturating_mul(n);
    if entries > DEFAULT_ENTRY_CAP {
        return Err(Error::TooLarge { entries, cap: DEFAULT_ENTRY_CAP });
    }
    let blocks: Vec<DMatrix<f64>> = enumerate_words(sys.modes(), n - 1)
        .iter()
        .map(|w| sys.a_word(w).map(|a| a * &b))
        .collect::<Result<_>>()?;
    Ok(hstack(n, &blocks))
}

/// `O(Σ)`: the blocks `C̃ A_v` stacked over all words shorter than `n`.
pub fn obs_matrix(sys: &SwitchedLinearSystem) -> Result<DMatrix<f64>> {
    let n = sys.state_dim();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let c = stacked_outputs(sys);
    let words = word_count(sys.modes(), n - 1);
    let entries = words.saturating_mul(c.nrows()).saturating_mul(n);
    if entries > DEFAULT_ENTRY_CAP {
        return Err(Error::TooLarge { entries, cap: DEFAULT_ENTRY_CAP });
    }
    let blocks: Vec<DMatrix<f64>> = enumerate_words(sys.modes(), n - 1)
        .iter()
        .map(|w| sys.a_word(w).map(|a| &c * a))
        .collect::<Result<_>>()?;
    Ok(vstack(n, &blocks))
}

/// Outcome of a rank test against the state dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTest {
    pub holds: bool,
    pub rank: usize,
    pub state_dim: usize,
    pub report: RankReport,
}

fn rank_test(m: &DMatrix<f64>, n: usize, tol: f64) -> RankTest {
    let report = rank_report(m, tol);
    RankTest {
        holds: report.rank == n,
        rank: report.rank,
        state_dim: n,
        report,
    }
}

pub fn is_span_reachable(sys: &SwitchedLinearSystem, tol: f64) -> Result<RankTest> {
    Ok(rank_test(&reach_matrix(sys)?, sys.state_dim(), tol))
}

pub fn is_observable(sys: &SwitchedLinearSystem, tol: f64) -> Result<RankTest> {
    Ok(rank_test(&obs_matrix(sys)?, sys.state_dim(), tol))
}

/// A reduced system and the morphism relating it to the original one.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub system: SwitchedLinearSystem,
    pub morphism: LssMorphism,
}

/// Restriction to the span of the reachable states; the morphism maps the
/// reduced system into the original one.
pub fn reach_reduce_lss(sys: &SwitchedLinearSystem, tol: f64) -> Result<Reduction> {
    let (r, basis) = reach_reduce(&repr_of_lss(sys), tol);
    Ok(Reduction {
        system: lss_of_repr(&r, sys.dims())?,
        morphism: LssMorphism { t: basis },
    })
}

/// Quotient by the unobservable subspace; the morphism maps the original
/// system onto the reduced one.
pub fn obs_reduce_lss(sys: &SwitchedLinearSystem, tol: f64) -> Result<Reduction> {
    let (r, projection) = obs_reduce(&repr_of_lss(sys), tol);
    Ok(Reduction {
        system: lss_of_repr(&r, sys.dims())?,
        morphism: LssMorphism { t: projection },
    })
}

/// A minimal realization of a system's input-output map. Writing `Σ_r` for
/// the reachable part of the input `Σ`, `embedding` is a morphism `Σ_r → Σ`
/// and `quotient` a morphism `Σ_r → Σ_min`.
#[derive(Debug, Clone)]
pub struct Minimization {
    pub system: SwitchedLinearSystem,
    pub reachable: SwitchedLinearSystem,
    pub embedding: LssMorphism,
    pub quotient: LssMorphism,
}

pub fn minimize_lss(sys: &SwitchedLinearSystem, tol: f64) -> Result<Minimization> {
    let min = minimize_repr(&repr_of_lss(sys), tol);
    let (reachable, _) = reach_reduce(&repr_of_lss(sys), tol);
    Ok(Minimization {
        system: lss_of_repr(&min.repr, sys.dims())?,
        reachable: lss_of_repr(&reachable, sys.dims())?,
        embedding: LssMorphism { t: min.embedding },
        quotient: LssMorphism { t: min.quotient },
    })
}

fn hankel_dims(h: &HankelBlockMatrix) -> Result<LssDims> {
    h.lss_dims()
        .ok_or_else(|| Error::Shape("the Hankel matrix carries no switched-system labels".into()))
}

/// Minimal system on the column space of a Hankel matrix: `x0` from column
/// `(ε, 0)`, `B_q` from columns `(ε, (q, ·))`, `C_q` from rows `(ε, ·)` and
/// `A_q` shifting column `(w, j)` to `(wq, j)`.
pub fn lss_from_hankel(h: &HankelBlockMatrix, tol: f64) -> Result<SwitchedLinearSystem> {
    let dims = hankel_dims(h)?;
    lss_of_repr(&repr_from_hankel(h, tol)?, dims)
}

/// Largest difference between the combined Markov parameters
/// `M(v) = C̃ A_v B̃` of two systems over all `|v| ≤ max_len`, that is between
/// all Markov parameters on words of length up to `max_len + 2`. Zero means
/// equal input-output maps on every hybrid word of that length.
pub fn io_residual(a: &SwitchedLinearSystem, b: &SwitchedLinearSystem, max_len: usize) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::Shape(format!("systems have dimensions {:?} and {:?}", a.dims(), b.dims())));
    }
    let (ca, cb) = (stacked_outputs(a), stacked_outputs(b));
    let mut worst = 0.0_f64;
    let mut level = vec![(stacked_inputs(a), stacked_inputs(b))];
    for len in 0..=max_len {
        let mut next = Vec::new();
        for (xa, xb) in &level {
            let diff = &ca * xa - &cb * xb;
            worst = worst.max(max_abs(&diff));
            if len < max_len {
                for q in 1..=a.modes() {
                    next.push((a.a(q) * xa, b.a(q) * xb));
                }
            }
        }
        level = next;
    }
    Ok(worst)
}

/// Largest difference between the Markov parameters of `sys` and the table
/// `markov` over all words up to the table depth (or `depth` if smaller).
pub fn markov_residual(sys: &SwitchedLinearSystem, markov: &MarkovFamily, depth: usize) -> Result<f64> {
    if sys.dims() != markov.dims() {
        return Err(Error::Shape(format!(
            "system has dimensions {:?} but the Markov data has {:?}",
            sys.dims(),
            markov.dims()
        )));
    }
    let depth = markov.depth().map_or(depth, |d| d.min(depth));
    let c = stacked_outputs(sys);
    let b = stacked_inputs(sys);
    let LssDims { modes, m, p } = sys.dims();
    let mut worst = 0.0_f64;
    // x_v = A_v B̃ for all v with |v| + 1 ≤ depth
    let mut level = vec![(crate::lss_core::ModeWord::empty(), b)];
    for len in 0..depth {
        let mut next = Vec::new();
        for (v, x) in &level {
            let block = &c * x;
            for q in 1..=modes {
                let vq = v.push(q);
                let rows = block.rows((q - 1) * p, p);
                worst = worst.max((rows.column(0) - markov.s0(&vq)?).amax());
                if len + 2 <= depth {
                    for q0 in 1..=modes {
                        let s = markov.s(&vq.prepend(q0))?;
                        let ours = rows.columns(1 + (q0 - 1) * m, m);
                        worst = worst.max((ours - s).amax());
                    }
                }
            }
            if len + 1 < depth {
                for q in 1..=modes {
                    next.push((v.push(q), sys.a(q) * x));
                }
            }
        }
        level = next;
    }
    Ok(worst)
}

/// Output of [`algorithm_1`].
#[derive(Debug, Clone)]
pub struct Algorithm1Output {
    pub system: SwitchedLinearSystem,
    pub rank: RankReport,
    /// Markov residual of the result against the data, relative to the
    /// largest data entry (or absolute when the data are below 1).
    pub residual: f64,
    pub validation_tolerance: f64,
    /// Longest word length covered by the validation.
    pub validation_depth: usize,
}

fn relative(residual: f64, scale: f64) -> f64 {
    residual / scale.max(1.0)
}

/// Realization from `H_{f,N,N+1}` by the SVD factorization `H = O R̂`, with
/// `[x0, B_1, …, B_D]` the first `mD+1` columns of `R̂`, `[C_1; …; C_D]` the
/// first `pD` rows of `O` and `A_q = R̂_q R̄⁺`. The result is validated by
/// rebuilding the Hankel matrix from its own Markov parameters.
pub fn algorithm_1(h: &HankelBlockMatrix, tol: f64, validation_tol: f64) -> Result<Algorithm1Output> {
    let dims = hankel_dims(h)?;
    let out = realization_algorithm(h, tol)?;
    let system = lss_of_repr(&out.repr, dims)?;
    let rebuilt = build_hankel(
        &MarkovFamily::lazy(std::sync::Arc::new(system.clone())),
        h.row_depth(),
        h.col_depth(),
        DEFAULT_ENTRY_CAP,
    )?;
    let residual = relative(
        crate::numerics::max_abs_diff(rebuilt.matrix(), h.matrix()),
        max_abs(h.matrix()),
    );
    finish(system, out.rank, residual, validation_tol, h.row_depth() + h.col_depth() + 2)
}

/// Builds `H_{f,N,N+1}` from a Markov table, runs [`algorithm_1`] and
/// validates the result against every parameter in the table.
pub fn algorithm_1_from_markov(
    markov: &MarkovFamily,
    n: usize,
    tol: f64,
    validation_tol: f64,
) -> Result<Algorithm1Output> {
    let h = build_hankel(markov, n, n + 1, DEFAULT_ENTRY_CAP)?;
    let out = realization_algorithm(&h, tol)?;
    let system = lss_of_repr(&out.repr, markov.dims())?;
    let depth = markov.depth().unwrap_or(2 * n + 3);
    let scale = max_abs(h.matrix());
    let residual = relative(markov_residual(&system, markov, depth)?, scale);
    finish(system, out.rank, residual, validation_tol, depth)
}

fn finish(
    system: SwitchedLinearSystem,
    rank: RankReport,
    residual: f64,
    validation_tol: f64,
    validation_depth: usize,
) -> Result<Algorithm1Output> {
    if residual.is_nan() || residual > validation_tol {
        return Err(Error::HypothesisViolated {
            residual,
            tolerance: validation_tol,
        });
    }
    Ok(Algorithm1Output {
        system,
        rank,
        residual,
        validation_tolerance: validation_tol,
        validation_depth,
    })
}

/// The isomorphism between two minimal systems, verified with
/// [`check_morphism`] at relative tolerance `tol`.
pub fn lss_isomorphism(a: &SwitchedLinearSystem, b: &SwitchedLinearSystem, tol: f64) -> Result<LssMorphism> {
    if a.dims() != b.dims() {
        return Err(Error::Shape(format!("systems have dimensions {:?} and {:?}", a.dims(), b.dims())));
    }
    let (ra, rb) = (repr_of_lss(a), repr_of_lss(b));
    let t = repr_isomorphism(&ra, &rb, tol)?;
    let scale = ra.scale().max(rb.scale()).max(1.0);
    let report = check_morphism(a, b, &t, tol * scale)?;
    if !report.holds {
        return Err(Error::NotIsomorphic {
            residual: report.max_residual() / scale,
            tolerance: tol,
        });
    }
    Ok(LssMorphism { t })
}
