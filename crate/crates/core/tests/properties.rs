use microlax::coeffring::{rat, Cap, TruncSeries};
use microlax::laxmat::DegreeVector;
use microlax::properties;
use microlax::random::rng;
use microlax::scenario::{chi_formula, degrees_from_hilbert, hilbert_from_degrees};
use proptest::prelude::*;

fn holds(check: properties::Check, seed: u64) -> bool {
    check(&mut rng(seed)).expect("check runs")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn associativity(seed in any::<u64>()) {
        prop_assert!(holds(properties::associativity, seed));
    }

    #[test]
    fn commutation_rules(seed in any::<u64>()) {
        prop_assert!(holds(properties::commutation_rules, seed));
    }

    #[test]
    fn order_subadditive(seed in any::<u64>()) {
        prop_assert!(holds(properties::order_subadditive, seed));
    }

    #[test]
    fn filtration_bound(seed in any::<u64>()) {
        prop_assert!(holds(properties::filtration_bound, seed));
    }

    #[test]
    fn split_identities(seed in any::<u64>()) {
        prop_assert!(holds(properties::split_identities, seed));
    }

    #[test]
    fn inverse_round_trip(seed in any::<u64>()) {
        prop_assert!(holds(properties::inverse_round_trip, seed));
    }

    #[test]
    fn root_round_trip(seed in any::<u64>()) {
        prop_assert!(holds(properties::root_round_trip, seed));
    }

    #[test]
    fn leibniz(seed in any::<u64>()) {
        prop_assert!(holds(properties::leibniz, seed));
    }

    #[test]
    fn signed_linear_inverse(seed in any::<u64>()) {
        prop_assert!(holds(properties::signed_linear_inverse, seed));
    }

    #[test]
    fn hilbert_round_trip(mut c in prop::collection::vec(0i64..5, 1..6), n in 1usize..4) {
        c.sort_unstable();
        let degrees = DegreeVector::new(c).unwrap();
        let h = hilbert_from_degrees(&degrees, n, 0..=6);
        prop_assert_eq!(degrees_from_hilbert(&h, n).unwrap(), degrees);
    }

    #[test]
    fn chi_second_difference(kappa in -5i64..5, b in -20i64..20) {
        prop_assert_eq!(chi_formula(kappa, b + 1) - 2 * chi_formula(kappa, b) + chi_formula(kappa, b - 1), 2);
        prop_assert_eq!(chi_formula(kappa, 0), kappa);
    }

    #[test]
    fn series_inverse_round_trip(c in 1i64..50, a in -9i64..9, b in -9i64..9, cap in 1i64..8) {
        let f = TruncSeries::from_terms(2, Cap::Degree(cap), [(vec![0, 0], rat(c, 3)), (vec![1, 0], rat(a, 1)), (vec![1, 1], rat(b, 2))]);
        let g = f.invert().unwrap();
        prop_assert!(f.mul(&g).unwrap().agrees_with(&TruncSeries::one(2, Cap::Exact)));
    }
}
