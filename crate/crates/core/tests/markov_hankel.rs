mod common;

use std::sync::Arc;

use common::{random_hybrid, rng};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use switched_lss::hankel::{build_hankel, enumerate_words, hankel_rank, DEFAULT_ENTRY_CAP};
use switched_lss::lss_core::{io_map, FnIoMap, HybridWord, LssDims};
use switched_lss::markov::{
    check_gcr, default_gcr_samples, extract_markov, gcr_evaluate, MarkovFamily, DEFAULT_GCR_CAP, DEFAULT_GCR_TOL,
};
use switched_lss::numerics::DEFAULT_RANK_TOL;
use switched_lss::oracle::{conjugate, markov_by_products, pad_unreachable, random_invertible, random_minimal_system, random_system};
use switched_lss::ModeWord;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extraction_matches_matrix_products(seed in any::<u64>(), n in 1usize..6, modes in 1usize..4, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, n, modes, m, p);
        let extracted = extract_markov(&io_map(&sys), 5).unwrap();
        let products = markov_by_products(&sys, 5);
        prop_assert!(extracted.max_difference(&products, 5).unwrap() < 1e-12);
    }

    #[test]
    fn gcr_slope_is_the_markov_parameter(seed in any::<u64>(), n in 1usize..5, modes in 1usize..4, m in 1usize..3, len in 2usize..6) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, n, modes, m, 2);
        let markov = extract_markov(&io_map(&sys), len).unwrap();
        let w = random_hybrid(&mut r, modes, m, len);
        let k = r.gen_range(0..len - 1);
        let j = r.gen_range(0..m);
        let mut inputs = w.inputs().to_vec();
        inputs[k][j] += 1.0;
        let bumped = HybridWord::new(w.modes().clone(), inputs).unwrap();
        let slope = gcr_evaluate(&markov, &bumped).unwrap() - gcr_evaluate(&markov, &w).unwrap();
        let expected = markov.s(&w.modes().sub_word(k, len - 1)).unwrap().column(j).into_owned();
        prop_assert!((slope - expected).amax() < 1e-12);
        let y = sys.simulate_output(sys.x0(), &w).unwrap();
        prop_assert!((gcr_evaluate(&markov, &w).unwrap() - y).amax() < 1e-12);
    }

    #[test]
    fn doubled_impulse_doubles_the_estimate(seed in any::<u64>(), n in 1usize..5, modes in 1usize..4) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, n, modes, 2, 1);
        let markov = extract_markov(&io_map(&sys), 4).unwrap();
        for w in enumerate_words(modes, 4).into_iter().filter(|w| w.len() >= 2) {
            let zero = sys.simulate_output(sys.x0(), &HybridWord::zero_input(w.clone(), 2).unwrap()).unwrap();
            for j in 0..2 {
                let mut inputs = vec![DVector::zeros(2); w.len()];
                inputs[0][j] = 2.0;
                let y = sys.simulate_output(sys.x0(), &HybridWord::new(w.clone(), inputs).unwrap()).unwrap();
                let estimate = markov.s(&w).unwrap().column(j).into_owned();
                prop_assert!(((y - &zero) - estimate * 2.0).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn equivalent_systems_share_markov_parameters(seed in any::<u64>(), n in 1usize..4, modes in 1usize..3) {
        let mut r = rng(seed);
        let sys = random_minimal_system(&mut r, n, modes, 1, 1);
        let s = random_invertible(&mut r, n);
        let other = pad_unreachable(&mut r, &conjugate(&sys, &s), 1);
        let a = extract_markov(&io_map(&sys), 5).unwrap();
        let b = extract_markov(&io_map(&other), 5).unwrap();
        prop_assert!(a.max_difference(&b, 5).unwrap() < 1e-10);
        for _ in 0..10 {
            let len = r.gen_range(1..=5);
            let w = random_hybrid(&mut r, modes, 1, len);
            prop_assert!((gcr_evaluate(&a, &w).unwrap() - gcr_evaluate(&b, &w).unwrap()).amax() < 1e-10);
        }
    }

    #[test]
    fn block_and_entry_addressing_agree(seed in any::<u64>(), modes in 1usize..4, m in 1usize..3, p in 1usize..3) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, 3, modes, m, p);
        let markov = extract_markov(&io_map(&sys), 5).unwrap();
        let h = build_hankel(&markov, 1, 2, DEFAULT_ENTRY_CAP).unwrap();
        let layout = h.layout();
        let rows = enumerate_words(modes, 1);
        let cols = enumerate_words(modes, 2);
        for (ri, v) in rows.iter().enumerate() {
            for (ci, w) in cols.iter().enumerate() {
                prop_assert_eq!(h.block(ri, ci), markov.combined(&w.concat(v)).unwrap().block);
                for i in 1..=p * modes {
                    let (k, l) = ((i - 1) / p, (i - 1) % p);
                    let alpha = k + 1;
                    let s0 = markov.s0(&w.concat(v).push(alpha)).unwrap()[l];
                    prop_assert_eq!(h.entry(v, i, w, 0), s0);
                    prop_assert_eq!(h.matrix()[(layout.row_index(v, i), layout.col_index(w, 0))], s0);
                    for q in 1..=modes {
                        for z in 1..=m {
                            let label = switched_lss::bridge::LssIndex::Input { mode: q, channel: z };
                            let expected = markov.sj(q, &w.concat(v), alpha, z).unwrap()[l];
                            prop_assert_eq!(h.lss_entry(v, i, w, label).unwrap(), expected);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hankel_nesting_and_rank_bounds(seed in any::<u64>(), n in 1usize..4, modes in 1usize..3) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, n, modes, 1, 1);
        let markov = extract_markov(&io_map(&sys), 2 * n + 4).unwrap();
        let big = build_hankel(&markov, n + 1, n + 1, DEFAULT_ENTRY_CAP).unwrap();
        let mut last = 0;
        for l in 0..=n + 1 {
            let small = build_hankel(&markov, l, l, DEFAULT_ENTRY_CAP).unwrap();
            prop_assert_eq!(&small, &big.truncated(l, l).unwrap());
            let rank = hankel_rank(&small, DEFAULT_RANK_TOL).rank;
            prop_assert!(rank >= last && rank <= n);
            if l >= n {
                prop_assert_eq!(rank, last);
            }
            last = rank;
        }
    }
}

#[test]
fn minimal_system_hankel_rank_equals_dimension() {
    let mut r = rng(11);
    for _ in 0..5 {
        let sys = random_minimal_system(&mut r, 3, 2, 1, 1);
        let markov = extract_markov(&io_map(&sys), 8).unwrap();
        let h = build_hankel(&markov, 3, 3, DEFAULT_ENTRY_CAP).unwrap();
        assert_eq!(hankel_rank(&h, DEFAULT_RANK_TOL).rank, 3);
    }
}

#[test]
fn one_mode_hankel_is_the_classical_block_hankel() {
    let mut r = rng(5);
    let sys = random_system(&mut r, 3, 1, 2, 2);
    let markov = extract_markov(&io_map(&sys), 8).unwrap();
    let h = build_hankel(&markov, 3, 3, DEFAULT_ENTRY_CAP).unwrap();
    // M_t = C A^t [x0 B], block (i, j) = M_{i+j}
    let mut x = nalgebra::DMatrix::zeros(3, 3);
    x.set_column(0, sys.x0());
    x.columns_mut(1, 2).copy_from(sys.b(1));
    let mut seq = Vec::new();
    for _ in 0..7 {
        seq.push(sys.c(1) * &x);
        x = sys.a(1) * x;
    }
    for i in 0..4 {
        for j in 0..4 {
            assert!((h.block(i, j) - &seq[i + j]).amax() < 1e-12);
        }
    }
}

#[test]
fn gcr_check_on_system_and_quadratic_maps() {
    let mut r = rng(3);
    for modes in 1..=3 {
        let sys = random_system(&mut r, 3, modes, 2, 1);
        let markov = extract_markov(&io_map(&sys), 4).unwrap();
        let report = check_gcr(&io_map(&sys), &markov, 4, &default_gcr_samples(2), DEFAULT_GCR_TOL, DEFAULT_GCR_CAP).unwrap();
        assert!(report.passed, "{report:?}");
    }
    let quad = FnIoMap::new(2, 1, 1, |w| {
        let s: f64 = w.inputs().iter().map(|u| u[0]).sum();
        DVector::from_element(1, s * s)
    });
    let markov = extract_markov(&quad, 4).unwrap();
    let report = check_gcr(&quad, &markov, 4, &default_gcr_samples(1), DEFAULT_GCR_TOL, DEFAULT_GCR_CAP).unwrap();
    assert!(!report.passed);
}

#[test]
fn lazy_and_table_families_build_the_same_hankel() {
    let mut r = rng(9);
    let sys = random_system(&mut r, 2, 2, 1, 2);
    let lazy = MarkovFamily::lazy(Arc::new(sys.clone()));
    let table = extract_markov(&io_map(&sys), 5).unwrap();
    assert_eq!(
        build_hankel(&lazy, 1, 2, DEFAULT_ENTRY_CAP).unwrap().matrix(),
        build_hankel(&table, 1, 2, DEFAULT_ENTRY_CAP).unwrap().matrix()
    );
    let zero = MarkovFamily::zero(LssDims::new(2, 1, 1), 4);
    assert_eq!(zero.combined(&ModeWord::letter(1)).unwrap().block, DMatrix::zeros(2, 3));
}
