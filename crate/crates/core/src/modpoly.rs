//! Direct computation with f̄ⁿ over F_p. This is the oracle that every
//! criterion-based claim about reduction mod p is checked against.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::mod_u64;
use crate::error::{Error, Result};
use crate::field::{FiniteField, PrimeField};
use crate::poly::Poly;
use crate::quadmap::{check_deddom_reducibility, QuadMapZ};

pub type ModPoly = Poly<PrimeField>;

/// Largest degree [`iterate_mod`] will build by default.
pub const DEFAULT_ITERATE_CAP: usize = 1 << 14;
/// Largest degree [`factor_mod`] will factor by default.
pub const DEFAULT_FACTOR_CAP: usize = 1 << 10;
/// Seed for the equal-degree splitting PRNG unless a caller supplies one.
pub const DEFAULT_SEED: u64 = 0x5eed_0f_f1e1d;

/// `x² − 2γ̄x + (γ² + γ + m mod p)`.
pub fn reduce(f: &QuadMapZ, p: u64) -> Result<ModPoly> {
    if p == 2 {
        return Err(Error::InvalidInput(
            "characteristic 2: f̄ is always reducible, no polynomial is built".into(),
        ));
    }
    let fp = PrimeField::new(p)?;
    let c = f.coefficients();
    Ok(Poly::from_coeffs(fp, c.iter().map(|a| mod_u64(a, p)).collect()))
}

/// n-fold composition of a quadratic with itself.
pub fn iterate_mod(g: &ModPoly, n: u32, cap: usize) -> Result<ModPoly> {
    iterate_quadratic(g, n, cap)
}

/// [`iterate_mod`] over any finite field.
pub fn iterate_quadratic<F: FiniteField>(g: &Poly<F>, n: u32, cap: usize) -> Result<Poly<F>> {
    if g.degree() != Some(2) || !g.is_monic() {
        return Err(Error::InvalidInput("expected a monic quadratic".into()));
    }
    if n >= usize::BITS || 1usize << n > cap {
        let degree = 1usize.checked_shl(n).unwrap_or(usize::MAX);
        return Err(Error::DegreeCap { degree, cap });
    }
    let field = g.field().clone();
    let (b, c) = (g.coeff(1), g.coeff(0));
    let constant = Poly::constant(field.clone(), c);
    let mut h = Poly::x(field);
    for _ in 0..n {
        // g(h) = h² + b·h + c
        h = h.square().add(&h.scale(&b)).add(&constant);
    }
    Ok(h)
}

pub fn is_irreducible_mod(g: &ModPoly) -> bool {
    g.is_irreducible()
}

pub fn factor_mod(g: &ModPoly, cap: usize, seed: u64) -> Result<Vec<(ModPoly, u32)>> {
    let d = g.degree().unwrap_or(0);
    if d > cap {
        return Err(Error::DegreeCap { degree: d, cap });
    }
    if !g.is_monic() {
        return Err(Error::InvalidInput("factor_mod expects a monic polynomial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(g.factor(&mut rng))
}

/// Factor degrees of f̄ⁿ over F_p, i.e. the cycle type of Frobenius on
/// the n-th level of the preimage tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CycleType {
    Separable { degrees: Vec<usize> },
    /// f̄ⁿ has a repeated factor; the degrees still describe it but the
    /// prime is left out of density statistics.
    Inseparable { degrees: Vec<usize> },
}

impl CycleType {
    pub fn degrees(&self) -> &[usize] {
        match self {
            CycleType::Separable { degrees } | CycleType::Inseparable { degrees } => degrees,
        }
    }

    pub fn is_full_cycle(&self, n: u32) -> bool {
        self.degrees() == [1usize << n]
    }
}

pub fn frobenius_cycle_type(f: &QuadMapZ, n: u32, p: u64, cap: usize) -> Result<CycleType> {
    let g = iterate_mod(&reduce(f, p)?, n, cap)?;
    let mut degrees = g.factor_degrees();
    degrees.sort_unstable();
    Ok(if g.is_squarefree() {
        CycleType::Separable { degrees }
    } else {
        CycleType::Inseparable { degrees }
    })
}

/// Oracle verdict on reducibility of f̄ⁿ. Characteristic 2 is answered by
/// the shortcut that f̄ itself is reducible there.
pub fn is_reducible_mod(f: &QuadMapZ, n: u32, p: u64, cap: usize) -> Result<bool> {
    if p == 2 {
        return Ok(true);
    }
    let g = iterate_mod(&reduce(f, p)?, n, cap)?;
    Ok(!g.is_irreducible())
}

/// Reducibility of f̄ⁿ at one prime, by the residue criterion and (when the
/// degree allows) by the polynomial oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub p: u64,
    pub criterion_reducible: bool,
    pub oracle_reducible: Option<bool>,
}

impl SpotCheck {
    /// Both sources say reducible (a missing oracle verdict does not veto).
    pub fn reducible(&self) -> bool {
        self.criterion_reducible && self.oracle_reducible != Some(false)
    }

    pub fn agrees(&self) -> bool {
        self.oracle_reducible.map_or(true, |o| o == self.criterion_reducible)
    }
}

/// Spot checks over the odd primes up to `bound`.
pub fn reducibility_spot_checks(
    f: &QuadMapZ,
    n: u32,
    bound: u64,
    oracle_cap: usize,
) -> Result<Vec<SpotCheck>> {
    let use_oracle = n < usize::BITS && 1usize << n <= oracle_cap;
    crate::arith::primes_up_to(bound)
        .skip(1)
        .map(|p| {
            Ok(SpotCheck {
                p,
                criterion_reducible: check_deddom_reducibility(f, n, p)?,
                oracle_reducible: if use_oracle {
                    Some(is_reducible_mod(f, n, p, oracle_cap)?)
                } else {
                    None
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(p: u64, c: &[i64]) -> ModPoly {
        let fp = PrimeField::new(p).unwrap();
        Poly::from_coeffs(fp, c.iter().map(|&v| fp.from_i64(v)).collect())
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&QuadMapZ::from_i64(1, 0), 5).unwrap(), poly(5, &[2, 3, 1]));
        assert_eq!(reduce(&QuadMapZ::from_i64(2, 1), 7).unwrap(), poly(7, &[0, 3, 1]));
        assert_eq!(reduce(&QuadMapZ::from_i64(6, 9), 3).unwrap(), poly(3, &[0, 0, 1]));
        assert!(reduce(&QuadMapZ::from_i64(0, 1), 2).is_err());
    }

    #[test]
    fn iterate_examples() {
        let g = poly(3, &[1, 0, 1]);
        assert_eq!(iterate_mod(&g, 2, 64).unwrap(), poly(3, &[2, 0, 2, 0, 1]));
        let sq = poly(11, &[0, 0, 1]);
        let mut x8 = vec![0; 9];
        x8[8] = 1;
        assert_eq!(iterate_mod(&sq, 3, 64).unwrap(), poly(11, &x8));
        assert!(matches!(iterate_mod(&g, 15, DEFAULT_ITERATE_CAP), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn iterate_matches_integer_expansion() {
        let f = QuadMapZ::from_i64(1, 0);
        let h = iterate_mod(&reduce(&f, 5).unwrap(), 2, 64).unwrap();
        for x in -6i64..6 {
            let v = f.eval(&f.eval(&x.into()));
            assert_eq!(h.eval(&x.rem_euclid(5).try_into().unwrap()), mod_u64(&v, 5));
        }
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible_mod(&poly(3, &[1, 0, 1])));
        assert!(!is_irreducible_mod(&poly(5, &[1, 0, 1])));
        let f = QuadMapZ::from_i64(1, 0);
        for p in crate::arith::primes_up_to(1000).skip(1) {
            assert!(is_reducible_mod(&f, 2, p, 64).unwrap(), "p = {p}");
        }
    }

    #[test]
    fn factor_examples() {
        let fs = factor_mod(&poly(7, &[-2, 0, 1]), 64, DEFAULT_SEED).unwrap();
        assert_eq!(fs, vec![(poly(7, &[-4, 1]), 1), (poly(7, &[-3, 1]), 1)]);
        let g = poly(3, &[1, 0, 1]);
        assert_eq!(factor_mod(&g, 64, DEFAULT_SEED).unwrap(), vec![(g, 1)]);
        assert!(factor_mod(&poly(3, &[1, 0, 1]), 1, DEFAULT_SEED).is_err());
        // Over F₂ a pure fourth power needs no splitting at all.
        let fs = factor_mod(&poly(2, &[1, 0, 0, 0, 1]), 64, DEFAULT_SEED).unwrap();
        assert_eq!(fs, vec![(poly(2, &[1, 1]), 4)]);
    }

    #[test]
    fn cycle_types() {
        let f = QuadMapZ::from_i64(1, 0);
        for p in [3, 5, 7, 11, 13, 17, 19, 23] {
            let ct = frobenius_cycle_type(&f, 2, p, 64).unwrap();
            assert!(!ct.is_full_cycle(2));
            assert_eq!(ct.degrees().iter().sum::<usize>(), 4);
        }
        // x² + 1 over F₃ is irreducible: full cycle at level 1.
        let g = QuadMapZ::from_i64(0, 1);
        assert!(frobenius_cycle_type(&g, 1, 3, 64).unwrap().is_full_cycle(1));
        // x² over F_p is inseparable.
        let z = QuadMapZ::from_i64(0, 0);
        assert!(matches!(
            frobenius_cycle_type(&z, 2, 5, 64).unwrap(),
            CycleType::Inseparable { .. }
        ));
    }
}
