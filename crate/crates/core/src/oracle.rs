//! Brute-force reference computations and random instance generators for the
//! test suites. Compiled only for tests or with the `testing` feature.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::hankel::{enumerate_words, enumerate_words_of_length};
use crate::lss_core::{word_matrix_product, HybridWord, ModeWord, SwitchedLinearSystem};
use crate::markov::MarkovFamily;
use crate::numerics::{hstack, image_basis, orth_complement, pseudoinverse, svd, numerical_rank, Subspace};

/// Default budget of enumerated experiments.
pub const DEFAULT_BRUTE_CAP: usize = 2_000_000;

/// `{0, e_1, …, e_m}`.
pub fn unit_inputs(m: usize) -> Vec<DVector<f64>> {
    let mut out = vec![DVector::zeros(m)];
    for j in 0..m {
        let mut e = DVector::zeros(m);
        e[j] = 1.0;
        out.push(e);
    }
    out
}

/// Span of every state reached from `x0` by hybrid words of length at most
/// `depth` whose inputs are drawn from `{0, e_1, …, e_m}` at each step.
pub fn brute_reach_span(sys: &SwitchedLinearSystem, depth: usize, tol: f64, cap: usize) -> Result<Subspace> {
    let n = sys.state_dim();
    let inputs = unit_inputs(sys.input_dim());
    let branching = sys.modes() * inputs.len();
    let mut count = 1usize;
    let mut level_size = 1usize;
    for _ in 0..depth {
        level_size = level_size.saturating_mul(branching);
        count = count.saturating_add(level_size);
    }
    if count > cap {
        return Err(Error::CombinatorialCap { count, cap });
    }
    let mut states = vec![sys.x0().clone()];
    let mut level = vec![sys.x0().clone()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * branching);
        for x in &level {
            for q in 1..=sys.modes() {
                let ax = sys.a(q) * x;
                for u in &inputs {
                    next.push(&ax + sys.b(q) * u);
                }
            }
        }
        states.extend(next.iter().cloned());
        level = next;
    }
    let columns: Vec<DMatrix<f64>> = states
        .into_iter()
        .map(|x| DMatrix::from_column_slice(n, 1, x.as_slice()))
        .collect();
    Ok(image_basis(&hstack(n, &columns), tol))
}

/// Whether some mode word of length at most `depth + 1` (zero inputs)
/// separates the outputs from `x1` and `x2` by more than `tol`.
pub fn brute_distinguish(sys: &SwitchedLinearSystem, x1: &DVector<f64>, x2: &DVector<f64>, depth: usize, tol: f64) -> Result<bool> {
    for len in 1..=depth + 1 {
        for w in enumerate_words_of_length(sys.modes(), len) {
            let hw = HybridWord::zero_input(w, sys.input_dim())?;
            let diff = sys.simulate_output(x1, &hw)? - sys.simulate_output(x2, &hw)?;
            if diff.amax() > tol {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Largest output difference over all mode words of length `1..=depth` and
/// all per-step choices from `inputs`.
pub fn io_equiv(
    a: &SwitchedLinearSystem,
    b: &SwitchedLinearSystem,
    depth: usize,
    inputs: &[DVector<f64>],
    tol: f64,
) -> Result<(bool, f64)> {
    if a.dims() != b.dims() {
        return Err(Error::Shape("systems differ in modes, inputs or outputs".into()));
    }
    let mut worst = 0.0_f64;
    for len in 1..=depth {
        let choices = inputs.len().pow(len as u32);
        for w in enumerate_words_of_length(a.modes(), len) {
            for mut code in 0..choices {
                let mut us = Vec::with_capacity(len);
                for _ in 0..len {
                    us.push(inputs[code % inputs.len()].clone());
                    code /= inputs.len();
                }
                let hw = HybridWord::new(w.clone(), us)?;
                let ya = a.simulate_output(a.x0(), &hw)?;
                let yb = b.simulate_output(b.x0(), &hw)?;
                worst = worst.max((ya - yb).amax());
            }
        }
    }
    Ok((worst <= tol, worst))
}

/// Explicit expansion `y = C_{q_t} A_{q_0⋯q_{t-1}} x0 + Σ_k C_{q_t} A_{q_{k+1}⋯q_{t-1}} B_{q_k} u_k`.
pub fn closed_form_output(sys: &SwitchedLinearSystem, w: &HybridWord) -> Result<DVector<f64>> {
    let letters = w.modes();
    let t = w.len() - 1;
    let q_t = letters.letters()[t];
    let prefix = if t == 0 { ModeWord::empty() } else { letters.sub_word(0, t - 1) };
    let mut y = sys.c(q_t) * word_matrix_product(sys.a_family(), &prefix)? * sys.x0();
    for k in 0..t {
        let q_k = letters.letters()[k];
        let between = letters.sub_word(k + 1, t - 1);
        y += sys.c(q_t) * word_matrix_product(sys.a_family(), &between)? * sys.b(q_k) * &w.inputs()[k];
    }
    Ok(y)
}

/// Markov parameters from the matrix products `C_q A_v x0` and
/// `C_q A_v B_{q0}`.
pub fn markov_by_products(sys: &SwitchedLinearSystem, depth: usize) -> MarkovFamily {
    let s = sys.clone();
    let s2 = sys.clone();
    MarkovFamily::from_fn(
        sys.modes(),
        sys.input_dim(),
        sys.output_dim(),
        depth,
        move |w| {
            let (v, q) = w.split_last().expect("non-empty");
            s.c(q) * s.a_word(&v).expect("valid word") * s.x0()
        },
        move |w| {
            let (v, q) = w.split_last().expect("non-empty");
            let (q0, mid) = v.split_first().expect("length at least 2");
            s2.c(q) * s2.a_word(&mid).expect("valid word") * s2.b(q0)
        },
    )
}

/// Restriction to a given invariant subspace with orthonormal basis `v`.
fn restrict(sys: &SwitchedLinearSystem, v: &DMatrix<f64>) -> Result<SwitchedLinearSystem> {
    let vt = v.transpose();
    SwitchedLinearSystem::new(
        sys.a_family().iter().map(|a| &vt * a * v).collect(),
        sys.b_family().iter().map(|b| &vt * b).collect(),
        sys.c_family().iter().map(|c| c * v).collect(),
        &vt * sys.x0(),
        sys.input_dim(),
        sys.output_dim(),
    )
}

/// Reachability reduction by a change of basis whose leading vectors span the
/// enumerated reachable states.
pub fn direct_reach_reduce(sys: &SwitchedLinearSystem, tol: f64) -> Result<SwitchedLinearSystem> {
    let n = sys.state_dim();
    let span = brute_reach_span(sys, n.saturating_sub(1), tol, DEFAULT_BRUTE_CAP)?;
    restrict(sys, span.basis())
}

/// Observability reduction by a change of basis that splits off the common
/// kernel of all `C_q A_w` with `|w| < n`, enumerated word by word.
pub fn direct_obs_reduce(sys: &SwitchedLinearSystem, tol: f64) -> Result<SwitchedLinearSystem> {
    let n = sys.state_dim();
    if n == 0 {
        return Ok(sys.clone());
    }
    let mut rows = Vec::new();
    for w in enumerate_words(sys.modes(), n - 1) {
        let aw = sys.a_word(&w)?;
        for q in 1..=sys.modes() {
            rows.push((sys.c(q) * &aw).transpose());
        }
    }
    let row_space = image_basis(&hstack(n, &rows), tol);
    let kernel = orth_complement(&row_space);
    let keep = orth_complement(&kernel);
    restrict(sys, keep.basis())
}

/// A linear system `(A, B, C, x0)` recovered by the classical construction,
/// returned as a one-mode switched system.
///
/// `sequence[t] = [K_t  H_t] = C A^t [x0  B]` for `t = 0, 1, …`. The block
/// Hankel matrix `[M_{i+j}]` with `n_bound + 1` block rows and columns is
/// factored by an SVD; `[x0 B]` comes from its first block column, `C` from
/// its first block row and `A` from the one-block row shift of the
/// observability factor.
pub fn linear_ho_kalman(sequence: &[DMatrix<f64>], m: usize, p: usize, n_bound: usize, tol: f64) -> Result<SwitchedLinearSystem> {
    let blocks = n_bound + 1;
    if sequence.len() < 2 * n_bound + 1 {
        return Err(Error::OutOfDepth {
            length: 2 * n_bound + 1,
            depth: sequence.len(),
        });
    }
    let width = m + 1;
    let hankel = |k: usize| {
        let mut h = DMatrix::zeros(p * k, width * k);
        for i in 0..k {
            for j in 0..k {
                h.view_mut((i * p, j * width), (p, width)).copy_from(&sequence[i + j]);
            }
        }
        h
    };
    let h = hankel(blocks);
    let decomposition = svd(&h);
    let rank = numerical_rank(&decomposition.singular_values, tol);
    if n_bound > 0 {
        let smaller = numerical_rank(&svd(&hankel(blocks - 1)).singular_values, tol);
        if smaller != rank {
            return Err(Error::InsufficientDepth { residual: (rank - smaller) as f64 });
        }
    }
    let mut o = decomposition.u.columns(0, rank).into_owned();
    let mut r = decomposition.v_t.rows(0, rank).into_owned();
    for k in 0..rank {
        let root = decomposition.singular_values[k].sqrt();
        o.column_mut(k).scale_mut(root);
        r.row_mut(k).scale_mut(root);
    }
    let a = if rank == 0 {
        DMatrix::zeros(0, 0)
    } else {
        let up = o.rows(0, p * n_bound).into_owned();
        let down = o.rows(p, p * n_bound).into_owned();
        pseudoinverse(&up, tol) * down
    };
    let x0 = r.column(0).into_owned();
    let b = r.columns(1, m).into_owned();
    let c = o.rows(0, p).into_owned();
    SwitchedLinearSystem::new(vec![a], vec![b], vec![c], x0, m, p)
}

/// `[C A^t x0, C A^t B]` for `t < len` of a one-mode system.
pub fn linear_markov_sequence(sys: &SwitchedLinearSystem, len: usize) -> Vec<DMatrix<f64>> {
    let n = sys.state_dim();
    let mut x = hstack(n, &[DMatrix::from_column_slice(n, 1, sys.x0().as_slice()), sys.b(1).clone()]);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(sys.c(1) * &x);
        x = sys.a(1) * x;
    }
    out
}

/// Matrix with entries uniform in `[-1, 1]`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random system whose transition matrices have spectral norm in
/// `[0.5, 1]`, which keeps long Markov sequences well scaled.
pub fn random_system(rng: &mut impl Rng, n: usize, modes: usize, m: usize, p: usize) -> SwitchedLinearSystem {
    let a = (0..modes)
        .map(|_| {
            let a = random_matrix(rng, n, n);
            let norm = svd(&a).singular_values.iter().cloned().fold(0.0, f64::max);
            if norm > 0.0 {
                a * (rng.gen_range(0.5..1.0) / norm)
            } else {
                a
            }
        })
        .collect();
    let b = (0..modes).map(|_| random_matrix(rng, n, m)).collect();
    let c = (0..modes).map(|_| random_matrix(rng, p, n)).collect();
    let x0 = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    SwitchedLinearSystem::new(a, b, c, x0, m, p).expect("consistent dimensions")
}

/// Smallest relative singular value of a matrix (0 when rank deficient).
fn conditioning(m: &DMatrix<f64>, n: usize) -> f64 {
    let sv = svd(m).singular_values;
    if sv.len() < n || n == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    sv[n - 1] / sv[0]
}

/// Random system that is span-reachable and observable with a comfortable
/// margin (smallest relative singular value above `1e-4`).
pub fn random_minimal_system(rng: &mut impl Rng, n: usize, modes: usize, m: usize, p: usize) -> SwitchedLinearSystem {
    loop {
        let sys = random_system(rng, n, modes, m, p);
        let r = crate::lss_realization::reach_matrix(&sys).expect("small system");
        let o = crate::lss_realization::obs_matrix(&sys).expect("small system");
        if conditioning(&r, n) > 1e-4 && conditioning(&o, n) > 1e-4 {
            return sys;
        }
    }
}

/// Well-conditioned random invertible matrix.
pub fn random_invertible(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    loop {
        let s = random_matrix(rng, n, n) + DMatrix::identity(n, n) * 2.0;
        if conditioning(&s, n) > 0.05 {
            return s;
        }
    }
}

/// Applies the state change `x' = s x`.
pub fn conjugate(sys: &SwitchedLinearSystem, s: &DMatrix<f64>) -> SwitchedLinearSystem {
    let s_inv = s.clone().try_inverse().expect("invertible state change");
    sys.transformed(s, &s_inv).expect("same dimensions")
}

/// Appends `k` states that start at zero and receive no input, so they are
/// never reached, although they feed the original states and the outputs.
/// A random state change hides the block structure.
pub fn pad_unreachable(rng: &mut impl Rng, sys: &SwitchedLinearSystem, k: usize) -> SwitchedLinearSystem {
    let (n, m, p) = (sys.state_dim(), sys.input_dim(), sys.output_dim());
    let total = n + k;
    let a = sys
        .a_family()
        .iter()
        .map(|a| {
            let mut big = DMatrix::zeros(total, total);
            big.view_mut((0, 0), (n, n)).copy_from(a);
            big.view_mut((0, n), (n, k)).copy_from(&(random_matrix(rng, n, k) * 0.5));
            big.view_mut((n, n), (k, k)).copy_from(&(random_matrix(rng, k, k) * 0.5));
            big
        })
        .collect();
    let b = sys
        .b_family()
        .iter()
        .map(|b| {
            let mut big = DMatrix::zeros(total, m);
            big.view_mut((0, 0), (n, m)).copy_from(b);
            big
        })
        .collect();
    let c = sys
        .c_family()
        .iter()
        .map(|c| {
            let mut big = DMatrix::zeros(p, total);
            big.view_mut((0, 0), (p, n)).copy_from(c);
            big.view_mut((0, n), (p, k)).copy_from(&random_matrix(rng, p, k));
            big
        })
        .collect();
    let mut x0 = DVector::zeros(total);
    x0.rows_mut(0, n).copy_from(sys.x0());
    let padded = SwitchedLinearSystem::new(a, b, c, x0, m, p).expect("consistent dimensions");
    let s = random_invertible(rng, total);
    conjugate(&padded, &s)
}

/// Appends `k` states driven by the original ones and by the inputs that
/// never reach the outputs. A random state change hides the block structure.
pub fn pad_unobservable(rng: &mut impl Rng, sys: &SwitchedLinearSystem, k: usize) -> SwitchedLinearSystem {
    let (n, m, p) = (sys.state_dim(), sys.input_dim(), sys.output_dim());
    let total = n + k;
    let a = sys
        .a_family()
        .iter()
        .map(|a| {
            let mut big = DMatrix::zeros(total, total);
            big.view_mut((0, 0), (n, n)).copy_from(a);
            big.view_mut((n, 0), (k, n)).copy_from(&(random_matrix(rng, k, n) * 0.5));
            big.view_mut((n, n), (k, k)).copy_from(&(random_matrix(rng, k, k) * 0.5));
            big
        })
        .collect();
    let b = sys
        .b_family()
        .iter()
        .map(|b| {
            let mut big = DMatrix::zeros(total, m);
            big.view_mut((0, 0), (n, m)).copy_from(b);
            big.view_mut((n, 0), (k, m)).copy_from(&random_matrix(rng, k, m));
            big
        })
        .collect();
    let c = sys
        .c_family()
        .iter()
        .map(|c| {
            let mut big = DMatrix::zeros(p, total);
            big.view_mut((0, 0), (p, n)).copy_from(c);
            big
        })
        .collect();
    let mut x0 = DVector::zeros(total);
    x0.rows_mut(0, n).copy_from(sys.x0());
    for i in n..total {
        x0[i] = rng.gen_range(-1.0..1.0);
    }
    let padded = SwitchedLinearSystem::new(a, b, c, x0, m, p).expect("consistent dimensions");
    let s = random_invertible(rng, total);
    conjugate(&padded, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::example1_system;
    use crate::numerics::DEFAULT_RANK_TOL;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn example1_brute_span_is_two_dimensional() {
        let span = brute_reach_span(&example1_system(), 4, DEFAULT_RANK_TOL, DEFAULT_BRUTE_CAP).unwrap();
        assert_eq!(span.dim(), 2);
        let zero = SwitchedLinearSystem::new(
            example1_system().a_family().to_vec(),
            vec![DMatrix::zeros(3, 1); 2],
            example1_system().c_family().to_vec(),
            DVector::zeros(3),
            1,
            1,
        )
        .unwrap();
        assert_eq!(brute_reach_span(&zero, 3, DEFAULT_RANK_TOL, DEFAULT_BRUTE_CAP).unwrap().dim(), 0);
        assert!(brute_reach_span(&zero, 30, DEFAULT_RANK_TOL, 1000).is_err());
    }

    #[test]
    fn distinguishing() {
        let sys = example1_system();
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(!brute_distinguish(&sys, &x, &x, 3, 1e-12).unwrap());
        let y = DVector::from_vec(vec![1.0, 2.0, 3.5]);
        assert!(brute_distinguish(&sys, &x, &y, 2, 1e-12).unwrap());
    }

    #[test]
    fn scalar_geometric_sequence() {
        let seq: Vec<DMatrix<f64>> = (0..7).map(|t| DMatrix::from_row_slice(1, 2, &[0.0, 0.5f64.powi(t)])).collect();
        let sys = linear_ho_kalman(&seq, 1, 1, 3, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(sys.state_dim(), 1);
        assert!((sys.a(1)[(0, 0)] - 0.5).abs() < 1e-12);
        let back = linear_markov_sequence(&sys, 7);
        for (x, y) in back.iter().zip(&seq) {
            assert!((x - y).amax() < 1e-12);
        }
        let zero = vec![DMatrix::zeros(1, 2); 5];
        assert_eq!(linear_ho_kalman(&zero, 1, 1, 2, DEFAULT_RANK_TOL).unwrap().state_dim(), 0);
    }

    #[test]
    fn padding_adds_exactly_k_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sys = random_minimal_system(&mut rng, 3, 2, 1, 1);
        let ur = pad_unreachable(&mut rng, &sys, 2);
        assert_eq!(ur.state_dim(), 5);
        assert_eq!(direct_reach_reduce(&ur, 1e-9).unwrap().state_dim(), 3);
        let uo = pad_unobservable(&mut rng, &sys, 2);
        assert_eq!(direct_obs_reduce(&uo, 1e-9).unwrap().state_dim(), 3);
        let inputs = unit_inputs(1);
        assert!(io_equiv(&sys, &ur, 4, &inputs, 1e-9).unwrap().0);
        assert!(io_equiv(&sys, &uo, 4, &inputs, 1e-9).unwrap().0);
    }
}
