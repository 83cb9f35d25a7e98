mod common;

use common::rng;
use nalgebra::DMatrix;
use proptest::prelude::*;
use switched_lss::numerics::{numerical_rank, pseudoinverse, svd, DEFAULT_RANK_TOL};
use switched_lss::oracle::random_matrix;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn svd_reconstructs_low_rank_products(seed in any::<u64>(), rows in 1usize..18, cols in 1usize..18, r in 1usize..5) {
        let mut g = rng(seed);
        let m = random_matrix(&mut g, rows, r) * random_matrix(&mut g, r, cols);
        let d = svd(&m);
        let back = &d.u * DMatrix::from_diagonal(&d.singular_values) * &d.v_t;
        prop_assert!((back - &m).amax() < 1e-12 * m.amax().max(1.0));
        prop_assert!(d.singular_values.as_slice().windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(numerical_rank(&d.singular_values, DEFAULT_RANK_TOL), r.min(rows).min(cols));
        let p = pseudoinverse(&m, DEFAULT_RANK_TOL);
        prop_assert!((&m * &p * &m - &m).amax() < 1e-9 * m.amax().max(1.0));
    }
}
