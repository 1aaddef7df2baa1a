mod common;

use chp_core::inner_product;
use chp_core::oracle::state_of_tableau;
use common::{random_gates, random_tableau};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn symmetric_invariant_and_in_range(n in 1usize..=20, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ca, cb) = (rng.gen_range(0..6 * n), rng.gen_range(0..6 * n));
        let a = random_tableau(&mut rng, n, ca);
        let b = random_tableau(&mut rng, n, cb);
        let r = inner_product(&a, &b).unwrap();
        prop_assert_eq!(inner_product(&b, &a).unwrap(), r);
        if r.is_zero {
            prop_assert_eq!(r.value, 0.0);
        } else {
            prop_assert!(r.s <= n);
            prop_assert_eq!(r.value, 2f64.powf(-(r.s as f64) / 2.0));
        }
        let u = random_gates(&mut rng, n, 30);
        let (mut a2, mut b2) = (a.clone(), b.clone());
        a2.apply_all(&u).unwrap();
        b2.apply_all(&u).unwrap();
        prop_assert_eq!(inner_product(&a2, &b2).unwrap(), r);
    }

    #[test]
    fn matches_dense_overlap(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_tableau(&mut rng, n, 40);
        let b = random_tableau(&mut rng, n, 40);
        let want = state_of_tableau(&a).unwrap().inner_product(&state_of_tableau(&b).unwrap()).unwrap().norm();
        prop_assert!((inner_product(&a, &b).unwrap().value - want).abs() <= 1e-12);
    }
}
