mod common;

use chp_core::oracle::{state_of_tableau, DenseState};
use chp_core::{MixedTableau, Tableau};
use common::random_gate;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_hold_through_random_steps(n in 1usize..=16, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tableau::new(n).unwrap();
        for _ in 0..300 {
            if rng.gen_bool(0.2) {
                let a = rng.gen_range(0..n);
                let before = t.clone();
                let rec = t.measure(a, &mut rng).unwrap();
                if rec.deterministic {
                    prop_assert_eq!(&t, &before);
                }
            } else {
                t.apply(&random_gate(&mut rng, n)).unwrap();
            }
            prop_assert!(t.check_invariants().is_ok());
        }
    }

    #[test]
    fn determinism_matches_oracle(n in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tableau::new(n).unwrap();
        let mut psi = DenseState::zero(n).unwrap();
        for _ in 0..100 {
            let g = random_gate(&mut rng, n);
            t.apply(&g).unwrap();
            psi.apply_gate(&g).unwrap();
        }
        for a in 0..n {
            let p0 = psi.probability_zero(a).unwrap();
            let det = t.is_deterministic(a).unwrap();
            prop_assert_eq!(det, !(1e-12..=1.0 - 1e-12).contains(&p0));
            if !det {
                prop_assert!((p0 - 0.5).abs() < 1e-12);
            }
        }
        for g in t.stabilizer_generators() {
            prop_assert!(psi.is_stabilized_by(&g).unwrap());
        }
    }

    #[test]
    fn snapshot_round_trip(n in 1usize..=70, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tableau::new(n).unwrap();
        for _ in 0..5 * n {
            t.apply(&random_gate(&mut rng, n)).unwrap();
        }
        let back = Tableau::from_bytes(&t.to_bytes()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn full_rank_mixed_matches_pure(n in 1usize..=12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tableau::new(n).unwrap();
        let mut m = MixedTableau::new(n, n).unwrap();
        let (mut r1, mut r2) = (ChaCha8Rng::seed_from_u64(seed ^ 1), ChaCha8Rng::seed_from_u64(seed ^ 1));
        for _ in 0..200 {
            if rng.gen_bool(0.2) {
                let a = rng.gen_range(0..n);
                prop_assert_eq!(t.measure(a, &mut r1).unwrap(), m.measure(a, &mut r2).unwrap());
            } else {
                let g = random_gate(&mut rng, n);
                t.apply(&g).unwrap();
                m.apply(&g).unwrap();
            }
        }
        prop_assert_eq!(m.tableau(), &t);
    }
}

#[test]
fn tableau_state_matches_circuit_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let mut t = Tableau::new(n).unwrap();
        let mut psi = DenseState::zero(n).unwrap();
        for _ in 0..60 {
            let g = random_gate(&mut rng, n);
            t.apply(&g).unwrap();
            psi.apply_gate(&g).unwrap();
        }
        let overlap = state_of_tableau(&t).unwrap().inner_product(&psi).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn measurement_is_seed_reproducible() {
    let run = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tableau::new(10).unwrap();
        for a in 0..10 {
            t.apply_hadamard(a).unwrap();
        }
        (0..10).map(|a| t.measure(a, &mut rng).unwrap().outcome).collect::<Vec<_>>()
    };
    assert_eq!(run(3), run(3));
    assert_ne!(run(3), run(4));
}
