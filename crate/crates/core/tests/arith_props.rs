use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use quadstab::arith::{
    classes_to_vectors, f2_solve_affine, factor, is_square_integer, legendre_u64, primes_up_to,
    square_class, FactorBudget, Integer,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn squares_and_their_neighbours() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let top = BigInt::from(10).pow(50);
    for _ in 0..1000 {
        let x = rng.gen_bigint_range(&BigInt::one(), &top);
        let sq = &x * &x;
        assert!(is_square_integer(&sq));
        // everything strictly between x² and (x+1)² is a non-square
        let k = rng.gen_bigint_range(&BigInt::one(), &(&x * 2 + 1));
        assert!(!is_square_integer(&(sq + k)));
    }
}

#[test]
fn legendre_is_multiplicative() {
    let primes: Vec<u64> = primes_up_to(20_000).skip(1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let (a, b) = (rng.gen_range(0..p), rng.gen_range(0..p));
        assert_eq!(
            legendre_u64(a * b % p, p),
            legendre_u64(a, p) * legendre_u64(b, p),
            "a={a} b={b} p={p}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factor_round_trip(x in any::<i64>().prop_filter("nonzero", |x| *x != 0), y in 1u64..1_000_000) {
        let v = Integer::from(x) * Integer::from(y);
        let fz = factor(&v, &FactorBudget::default());
        prop_assert!(fz.is_complete());
        prop_assert_eq!(fz.value(), v);
    }

    #[test]
    fn square_class_ignores_square_factors(x in -1_000_000_000i64..1_000_000_000, y in 1i64..100_000) {
        prop_assume!(x != 0);
        let b = FactorBudget::default();
        let x = Integer::from(x);
        let y2 = Integer::from(y) * Integer::from(y);
        prop_assert_eq!(square_class(&(&x * y2), &b).unwrap(), square_class(&x, &b).unwrap());
    }

    #[test]
    fn affine_witness_multiplies_to_a_square(values in prop::collection::vec(-60i64..60, 1..8)) {
        prop_assume!(values.iter().all(|v| *v != 0));
        let b = FactorBudget::default();
        let classes: Vec<_> = values.iter().map(|v| square_class(&(*v).into(), &b).unwrap()).collect();
        let (vectors, _) = classes_to_vectors(&classes).unwrap();
        let sol = f2_solve_affine(&vectors);
        if let Some(w) = sol.witness {
            prop_assert!(sol.origin_in_affine_span);
            prop_assert_eq!(w.len() % 2, 1);
            let prod: Integer = w.iter().map(|&i| Integer::from(values[i])).product();
            prop_assert!(!prod.is_negative() && is_square_integer(&prod));
        } else {
            prop_assert!(!sol.origin_in_affine_span);
        }
    }
}

#[test]
fn zero_and_one_square_classes() {
    let b = FactorBudget::default();
    assert!(square_class(&Integer::one(), &b).unwrap().is_identity());
    assert!(square_class(&Integer::zero(), &b).is_err());
}
