use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{factor, integer_sqrt_exact, FactorBudget, Integer};
use crate::error::{Error, Result};

/// Image of a nonzero integer in ℚ*/ℚ*²: a sign and the primes of odd
/// exponent. When factoring stalls, the unsplit remainder is kept in
/// `cofactor` and `cofactor_known` is false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareClass {
    pub sign: i8,
    #[serde(with = "crate::serde_int::vec")]
    pub support: Vec<Integer>,
    pub cofactor_known: bool,
    #[serde(with = "crate::serde_int")]
    pub cofactor: Integer,
}

impl SquareClass {
    pub fn is_identity(&self) -> bool {
        self.cofactor_known && self.sign > 0 && self.support.is_empty()
    }

    /// Squarefree representative `sign · ∏ support · cofactor`.
    pub fn representative(&self) -> Integer {
        let v = self
            .support
            .iter()
            .fold(self.cofactor.clone(), |acc, p| acc * p);
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }
}

pub fn square_class(x: &Integer, budget: &FactorBudget) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::InvalidInput("square class of 0".into()));
    }
    let f = factor(x, budget);
    let support = f
        .factors
        .iter()
        .filter(|(_, e)| e % 2 == 1)
        .map(|(p, _)| p.clone())
        .collect();
    // A square cofactor contributes nothing to the class.
    let known = f.is_complete() || integer_sqrt_exact(&f.cofactor).is_some();
    Ok(SquareClass {
        sign: f.sign,
        support,
        cofactor_known: known,
        cofactor: if known { Integer::one() } else { f.cofactor },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(x: i64) -> SquareClass {
        square_class(&x.into(), &FactorBudget::default()).unwrap()
    }

    #[test]
    fn examples() {
        let c = sc(2);
        assert_eq!((c.sign, c.support.clone()), (1, vec![2.into()]));
        let c = sc(-8);
        assert_eq!((c.sign, c.support.clone()), (-1, vec![2.into()]));
        let c = sc(45);
        assert_eq!((c.sign, c.support.clone()), (1, vec![5.into()]));
        assert!(sc(49).is_identity());
        assert_eq!(sc(-12).representative(), Integer::from(-3));
        assert!(square_class(&0.into(), &FactorBudget::default()).is_err());
    }

    #[test]
    fn unknown_cofactor_flagged() {
        let budget = FactorBudget {
            trial_bound: 10,
            rho_iterations: 8,
            time_cap_ms: 100,
        };
        let p: Integer = "1000000000000000003".parse().unwrap();
        let q: Integer = "1000000000000000009".parse().unwrap();
        let c = square_class(&(&p * &q * 3), &budget).unwrap();
        assert!(!c.cofactor_known);
        assert_eq!(c.cofactor, &p * &q);
        // Square remainders are still classified.
        let c = square_class(&(&p * &p * 3), &budget).unwrap();
        assert!(c.cofactor_known);
        assert_eq!(c.support, vec![Integer::from(3)]);
    }
}
