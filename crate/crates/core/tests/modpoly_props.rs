use proptest::prelude::*;
use quadstab::arith::primes_up_to;
use quadstab::field::{FiniteField, PrimeField};
use quadstab::modpoly::{
    factor_mod, frobenius_cycle_type, is_irreducible_mod, ModPoly, DEFAULT_SEED,
};
use quadstab::poly::Poly;
use quadstab::quadmap::{check_deddom_reducibility, QuadMapZ};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn monic(fp: PrimeField, digits: u64, degree: usize) -> ModPoly {
    let p = fp.p();
    let mut c = Vec::with_capacity(degree + 1);
    let mut d = digits;
    for _ in 0..degree {
        c.push(d % p);
        d /= p;
    }
    c.push(1);
    Poly::from_coeffs(fp, c)
}

#[test]
fn irreducibility_matches_divisor_enumeration() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let fp = PrimeField::new(p).unwrap();
        let small: Vec<ModPoly> = (1..=2)
            .flat_map(|d| (0..p.pow(d as u32)).map(move |i| monic(fp, i, d)))
            .collect();
        for degree in 1..=4usize {
            for i in 0..p.pow(degree as u32) {
                let g = monic(fp, i, degree);
                let brute = !small.iter().any(|h| {
                    let dh = h.degree().unwrap();
                    2 * dh <= degree && g.rem(h).is_zero()
                });
                assert_eq!(is_irreducible_mod(&g), brute, "p = {p}, g = {g:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn factors_multiply_back(p_index in 0usize..20, coeffs in prop::collection::vec(0u64..1000, 1..40)) {
        let p = primes_up_to(100).nth(p_index).unwrap();
        let fp = PrimeField::new(p).unwrap();
        let mut c: Vec<u64> = coeffs.iter().map(|x| x % p).collect();
        c.push(1);
        let g = Poly::from_coeffs(fp, c);
        let fs = factor_mod(&g, 1 << 10, DEFAULT_SEED).unwrap();
        let mut prod = Poly::one(fp);
        for (h, e) in &fs {
            prop_assert!(is_irreducible_mod(h));
            for _ in 0..*e {
                prod = prod.mul(h);
            }
        }
        prop_assert_eq!(prod, g);
    }
}

#[test]
fn deddom_iff_not_a_full_cycle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let primes: Vec<u64> = primes_up_to(200).skip(1).collect();
    for _ in 0..50 {
        let f = QuadMapZ::from_i64(rng.gen_range(-1000..1000), rng.gen_range(-1000..1000));
        let p = primes[rng.gen_range(0..primes.len())];
        let n = rng.gen_range(1..=4);
        let ct = frobenius_cycle_type(&f, n, p, 64).unwrap();
        assert_eq!(
            check_deddom_reducibility(&f, n, p).unwrap(),
            !ct.is_full_cycle(n),
            "f = {f:?}, p = {p}, n = {n}"
        );
    }
}

#[test]
fn prime_field_arithmetic_sanity() {
    let f = PrimeField::new(13).unwrap();
    for a in 1..13 {
        let x = f.from_i64(a);
        assert_eq!(f.mul(&x, &f.inv(&x).unwrap()), f.one());
    }
}
