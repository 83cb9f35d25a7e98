mod common;

use common::rng;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use switched_lss::bridge::{lss_of_repr, psi_from_markov, repr_of_lss};
use switched_lss::examples::{example1_minimal, example1_system};
use switched_lss::hankel::{build_hankel, hankel_rank, DEFAULT_ENTRY_CAP};
use switched_lss::lss_core::{check_morphism, io_map};
use switched_lss::lss_realization::{
    algorithm_1_from_markov, io_residual, is_observable, is_span_reachable, lss_from_hankel, lss_isomorphism,
    minimize_lss, obs_reduce_lss, reach_reduce_lss, DEFAULT_VALIDATION_TOL,
};
use switched_lss::markov::extract_markov;
use switched_lss::numerics::{same_span, DEFAULT_RANK_TOL};
use switched_lss::oracle::{
    brute_distinguish, brute_reach_span, conjugate, direct_obs_reduce, direct_reach_reduce, io_equiv, linear_ho_kalman,
    linear_markov_sequence, pad_unobservable, pad_unreachable, random_invertible, random_minimal_system,
    random_system, unit_inputs, DEFAULT_BRUTE_CAP,
};
use switched_lss::{Error, SwitchedLinearSystem};

fn padded(r: &mut impl Rng, n: usize, modes: usize, m: usize, p: usize) -> SwitchedLinearSystem {
    let base = random_minimal_system(r, n, modes, m, p);
    let with_unreachable = if r.gen_bool(0.5) { pad_unreachable(r, &base, 1) } else { base };
    if r.gen_bool(0.5) {
        pad_unobservable(r, &with_unreachable, 1)
    } else {
        with_unreachable
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rank_tests_agree_with_brute_force(seed in any::<u64>(), n in 1usize..4, modes in 1usize..3) {
        let mut r = rng(seed);
        let sys = padded(&mut r, n, modes, 1, 1);
        let total = sys.state_dim();
        let reach = is_span_reachable(&sys, DEFAULT_RANK_TOL).unwrap();
        let brute = brute_reach_span(&sys, total, 1e-9, DEFAULT_BRUTE_CAP).unwrap();
        prop_assert_eq!(reach.rank, brute.dim());
        // an unobservable direction yields equal outputs from x and x + d
        let obs = is_observable(&sys, DEFAULT_RANK_TOL).unwrap();
        let kernel = switched_lss::numerics::kernel_basis(&switched_lss::lss_realization::obs_matrix(&sys).unwrap(), DEFAULT_RANK_TOL);
        prop_assert_eq!(obs.rank + kernel.dim(), total);
        let x = DVector::from_fn(total, |_, _| r.gen_range(-1.0..1.0));
        for k in 0..kernel.dim() {
            let shifted = &x + kernel.basis().column(k);
            prop_assert!(!brute_distinguish(&sys, &x, &shifted, total - 1, 1e-8).unwrap());
        }
        if obs.holds {
            let e = DVector::from_fn(total, |_, _| r.gen_range(-1.0..1.0));
            prop_assert!(brute_distinguish(&sys, &x, &(&x + e), total - 1, 1e-10).unwrap());
        }
    }

    #[test]
    fn minimization_is_reachable_observable_and_equivalent(seed in any::<u64>(), n in 1usize..4, modes in 1usize..3, m in 1usize..3) {
        let mut r = rng(seed);
        let sys = padded(&mut r, n, modes, m, 1);
        let min = minimize_lss(&sys, DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(min.system.state_dim(), n);
        prop_assert!(is_span_reachable(&min.system, DEFAULT_RANK_TOL).unwrap().holds);
        prop_assert!(is_observable(&min.system, DEFAULT_RANK_TOL).unwrap().holds);
        prop_assert!(io_residual(&sys, &min.system, 5).unwrap() < 1e-9);
        let (equal, _) = io_equiv(&sys, &min.system, 4, &unit_inputs(m), 1e-9).unwrap();
        prop_assert!(equal);
        prop_assert!(check_morphism(&min.reachable, &sys, &min.embedding.t, 1e-9).unwrap().holds);
        prop_assert!(check_morphism(&min.reachable, &min.system, &min.quotient.t, 1e-9).unwrap().holds);
        let markov = extract_markov(&io_map(&sys), 2 * n + 2).unwrap();
        let h = build_hankel(&markov, n, n, DEFAULT_ENTRY_CAP).unwrap();
        prop_assert_eq!(hankel_rank(&h, DEFAULT_RANK_TOL).rank, n);
    }

    #[test]
    fn reductions_match_direct_computation(seed in any::<u64>(), n in 1usize..4, modes in 1usize..3) {
        let mut r = rng(seed);
        let sys = padded(&mut r, n, modes, 1, 2);
        let reach = reach_reduce_lss(&sys, DEFAULT_RANK_TOL).unwrap();
        let direct = direct_reach_reduce(&sys, DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(reach.system.state_dim(), direct.state_dim());
        prop_assert!(check_morphism(&reach.system, &sys, &reach.morphism.t, 1e-9).unwrap().holds);
        prop_assert!(io_residual(&reach.system, &direct, 5).unwrap() < 1e-9);
        let brute = brute_reach_span(&sys, sys.state_dim(), 1e-9, DEFAULT_BRUTE_CAP).unwrap();
        let image = switched_lss::numerics::image_basis(&reach.morphism.t, DEFAULT_RANK_TOL);
        prop_assert!(same_span(&image, &brute, 1e-7));
        let obs = obs_reduce_lss(&sys, DEFAULT_RANK_TOL).unwrap();
        let direct = direct_obs_reduce(&sys, DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(obs.system.state_dim(), direct.state_dim());
        prop_assert!(check_morphism(&sys, &obs.system, &obs.morphism.t, 1e-9).unwrap().holds);
        prop_assert!(io_residual(&obs.system, &direct, 5).unwrap() < 1e-9);
    }

    #[test]
    fn conjugate_minimal_systems_are_isomorphic(seed in any::<u64>(), n in 1usize..5, modes in 1usize..4) {
        let mut r = rng(seed);
        let sys = random_minimal_system(&mut r, n, modes, 1, 1);
        let s = random_invertible(&mut r, n);
        let other = conjugate(&sys, &s);
        let t = lss_isomorphism(&sys, &other, 1e-7).unwrap();
        prop_assert!(check_morphism(&sys, &other, &t.t, 1e-7 * (1.0 + s.amax())).unwrap().holds);
        let mut perturbed_c: Vec<DMatrix<f64>> = other.c_family().to_vec();
        perturbed_c[0][(0, 0)] += 0.1;
        let perturbed = SwitchedLinearSystem::new(
            other.a_family().to_vec(),
            other.b_family().to_vec(),
            perturbed_c,
            other.x0().clone(),
            1,
            1,
        ).unwrap();
        prop_assert!(lss_isomorphism(&sys, &perturbed, 1e-9).is_err());
    }

    #[test]
    fn algorithm_1_recovers_random_systems(seed in any::<u64>(), n in 1usize..4, modes in 1usize..3, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let sys = random_minimal_system(&mut r, n, modes, m, p);
        let big_n = n + 1;
        let markov = extract_markov(&io_map(&sys), 2 * big_n + 3).unwrap();
        let out = algorithm_1_from_markov(&markov, big_n, DEFAULT_RANK_TOL, DEFAULT_VALIDATION_TOL).unwrap();
        prop_assert_eq!(out.system.state_dim(), n);
        prop_assert!(io_residual(&sys, &out.system, 2 * big_n + 1).unwrap() < 1e-8);
        prop_assert!(lss_isomorphism(&sys, &out.system, 1e-6).is_ok());
        let h = build_hankel(&markov, n, n, DEFAULT_ENTRY_CAP).unwrap();
        let from_h = lss_from_hankel(&h, DEFAULT_RANK_TOL).unwrap();
        prop_assert!(io_residual(&sys, &from_h, 2 * n + 1).unwrap() < 1e-8);
    }

    #[test]
    fn bridge_round_trip(seed in any::<u64>(), n in 0usize..4, modes in 1usize..4, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, n, modes, m, p);
        let back = lss_of_repr(&repr_of_lss(&sys), sys.dims()).unwrap();
        prop_assert_eq!(&back, &sys);
        let markov = extract_markov(&io_map(&sys), 6).unwrap();
        let psi = psi_from_markov(&markov);
        let diff = switched_lss::rational_repr::series_difference(&psi, &repr_of_lss(&sys), 4).unwrap();
        prop_assert!(diff < 1e-12);
    }
}

#[test]
fn one_mode_realization_matches_ho_kalman() {
    let mut r = rng(21);
    for n in 1..=4 {
        let sys = random_minimal_system(&mut r, n, 1, 2, 2);
        let big_n = n;
        let markov = extract_markov(&io_map(&sys), 2 * big_n + 3).unwrap();
        let out = algorithm_1_from_markov(&markov, big_n, DEFAULT_RANK_TOL, DEFAULT_VALIDATION_TOL).unwrap();
        let seq = linear_markov_sequence(&sys, 2 * n + 2);
        let hk = linear_ho_kalman(&seq, 2, 2, n, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(out.system.state_dim(), hk.state_dim());
        assert!(io_residual(&out.system, &hk, 2 * n).unwrap() < 1e-8);
        assert!(lss_isomorphism(&out.system, &hk, 1e-6).is_ok());
    }
}

#[test]
fn example1_linear_subsystems_are_not_minimal() {
    // classical notion: (A_q, B_q) controllable and (C_q, A_q) observable, zero initial state
    let min = example1_minimal();
    for q in 1..=2 {
        let sub = SwitchedLinearSystem::new(
            vec![min.a(q).clone()],
            vec![min.b(q).clone()],
            vec![min.c(q).clone()],
            DVector::zeros(2),
            1,
            1,
        )
        .unwrap();
        let reachable = is_span_reachable(&sub, DEFAULT_RANK_TOL).unwrap().holds;
        let observable = is_observable(&sub, DEFAULT_RANK_TOL).unwrap().holds;
        assert!(!(reachable && observable), "mode {q}");
        assert!(minimize_lss(&sub, DEFAULT_RANK_TOL).unwrap().system.state_dim() < 2);
    }
    assert!(is_span_reachable(&min, DEFAULT_RANK_TOL).unwrap().holds);
    assert!(is_observable(&min, DEFAULT_RANK_TOL).unwrap().holds);
}

#[test]
fn example1_minimization_is_isomorphic_to_the_stated_minimal_system() {
    let min = minimize_lss(&example1_system(), DEFAULT_RANK_TOL).unwrap();
    assert_eq!(min.system.state_dim(), 2);
    assert!(lss_isomorphism(&min.system, &example1_minimal(), 1e-9).is_ok());
    assert!(io_residual(&example1_system(), &example1_minimal(), 8).unwrap() < 1e-12);
}

#[test]
fn too_shallow_data_violates_the_hypothesis() {
    // three-step shift register: data up to depth 2·1+3 cannot see the third state
    let a = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let sys = SwitchedLinearSystem::new(
        vec![a],
        vec![DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0])],
        vec![DMatrix::from_row_slice(1, 3, &[0.0, 0.0, 1.0])],
        DVector::zeros(3),
        1,
        1,
    )
    .unwrap();
    let markov = extract_markov(&io_map(&sys), 9).unwrap();
    let shallow = algorithm_1_from_markov(&markov, 0, DEFAULT_RANK_TOL, DEFAULT_VALIDATION_TOL);
    assert!(matches!(shallow, Err(Error::HypothesisViolated { .. })), "{shallow:?}");
    let deep = algorithm_1_from_markov(&markov, 3, DEFAULT_RANK_TOL, DEFAULT_VALIDATION_TOL).unwrap();
    assert_eq!(deep.system.state_dim(), 3);
}
