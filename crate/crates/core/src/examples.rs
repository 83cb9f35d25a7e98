//! Small worked instances used by the tests, the acceptance suite and the
//! `examples` CLI command.

use nalgebra::{DMatrix, DVector};

use crate::lss_core::{ModeWord, SwitchedLinearSystem};
use crate::markov::MarkovFamily;

/// Two-mode SISO system of dimension 3 that is observable but not
/// span-reachable.
pub fn example1_system() -> SwitchedLinearSystem {
    let a1 = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    let a2 = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
    let b1 = DMatrix::zeros(3, 1);
    let b2 = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 0.0]);
    let c1 = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
    let c2 = DMatrix::from_row_slice(1, 3, &[0.0, 0.0, 1.0]);
    let x0 = DVector::from_vec(vec![0.0, 1.0, 0.0]);
    SwitchedLinearSystem::new(vec![a1, a2], vec![b1, b2], vec![c1, c2], x0, 1, 1)
        .expect("consistent dimensions")
}

/// The 2-dimensional minimal realization of [`example1_system`]'s
/// input-output map.
pub fn example1_minimal() -> SwitchedLinearSystem {
    let a1 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
    let a2 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
    let b1 = DMatrix::zeros(2, 1);
    let b2 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
    let c1 = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
    let c2 = DMatrix::from_row_slice(1, 2, &[0.0, 0.0]);
    let x0 = DVector::from_vec(vec![1.0, 0.0]);
    SwitchedLinearSystem::new(vec![a1, a2], vec![b1, b2], vec![c1, c2], x0, 1, 1)
        .expect("consistent dimensions")
}

/// `true` when `v = 2^{t-1} 1` or `v = 2^{t-2} 1 1` with `t = |v|`.
fn is_example2_pattern(v: &[usize]) -> bool {
    let t = v.len();
    if t < 2 || v[t - 1] != 1 {
        return false;
    }
    let twos = |s: &[usize]| s.iter().all(|&q| q == 2);
    twos(&v[..t - 1]) || (v[t - 2] == 1 && twos(&v[..t - 2]))
}

/// Closed-form initial-state response of the two-mode SISO map whose Hankel
/// matrix has rank 2.
pub fn example2_s0(v: &ModeWord) -> f64 {
    if v.len() > 1 && is_example2_pattern(v.letters()) {
        1.0
    } else {
        0.0
    }
}

/// Closed-form input response (single input channel) of the same map.
pub fn example2_s1(v: &ModeWord) -> f64 {
    if v.len() > 2 && is_example2_pattern(v.letters()) {
        1.0
    } else {
        0.0
    }
}

/// Markov table of the rank-2 map, filled from the closed form.
pub fn example2_markov(depth: usize) -> MarkovFamily {
    MarkovFamily::from_fn(
        2,
        1,
        1,
        depth,
        |w| DVector::from_element(1, example2_s0(w)),
        |w| DMatrix::from_element(1, 1, example2_s1(w)),
    )
}
