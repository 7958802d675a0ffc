use poisson_lab::linalg::{det, max_abs};
use poisson_lab::matgroup::{bruhat_cell, gauss_decompose, sample_borel, sample_borel_minus, sample_sl};
use poisson_lab::rng::rng_for;
use poisson_lab::rootdata::{representative, WeylElement};
use proptest::prelude::*;

fn perm_strategy() -> impl Strategy<Value = Vec<usize>> {
    (2usize..=5).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn length_counts_inversions(perm in perm_strategy()) {
        let w = WeylElement::from_perm(perm.clone()).unwrap();
        let inv = (0..perm.len()).flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        prop_assert_eq!(w.length, inv);
        prop_assert_eq!(w.word.len(), inv);
        prop_assert_eq!(WeylElement::from_word(perm.len(), &w.word).unwrap().perm, perm);
    }

    #[test]
    fn inverse_composes_to_identity(perm in perm_strategy()) {
        let w = WeylElement::from_perm(perm).unwrap();
        prop_assert!(w.compose(&w.inverse()).is_identity());
        prop_assert_eq!(w.inverse().length, w.length);
    }

    #[test]
    fn representatives_lie_in_sl(perm in perm_strategy()) {
        let r = representative(&WeylElement::from_perm(perm).unwrap());
        prop_assert!((det(&r) - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bruhat_cell_of_constructed_element(perm in perm_strategy(), seed in any::<u64>()) {
        let n = perm.len();
        let w = WeylElement::from_perm(perm).unwrap();
        let mut r = rng_for(seed, &[]);
        let g = sample_borel(n, &mut r) * representative(&w) * sample_borel_minus(n, &mut r);
        prop_assert_eq!(bruhat_cell(&g).unwrap().perm, w.perm);
    }

    #[test]
    fn gauss_factors_multiply_back(n in 2usize..=5, seed in any::<u64>()) {
        let g = sample_sl(n, &mut rng_for(seed, &[]));
        let f = gauss_decompose(&g).unwrap();
        let back = &f.lower * &f.diag * &f.upper;
        prop_assert!(max_abs(&(back - &g)) < 1e-10 * max_abs(&g).max(1.0));
    }
}
