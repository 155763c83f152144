//! Exact integer arithmetic: square tests, quadratic residue symbols,
//! primality, bounded factorization, prime sieving, square classes and
//! F₂ linear algebra over square-class vectors.

mod f2;
mod factor;
mod primality;
mod residue;
mod sieve;
mod square_class;

pub use f2::{
    classes_to_vectors, f2_solve_affine, f2_solve_all_ones, AffineSolution, Coordinate, F2Vector,
};
pub use factor::{factor, FactorBudget, Factorization};
pub use primality::{is_prime, is_prime_u64};
pub use residue::{jacobi_u64, legendre, legendre_u64, mod_u64};
pub use sieve::{primes_up_to, PrimeSieve, Segment};
pub use square_class::{square_class, SquareClass};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Arbitrary-precision signed integer used for every orbit value.
pub type Integer = BigInt;
/// Canonical rational number (positive denominator, lowest terms).
pub type Rational = BigRational;

/// Exact perfect-square test via integer Newton square root.
pub fn is_square_integer(x: &Integer) -> bool {
    match x.sign() {
        Sign::Minus => false,
        Sign::NoSign => true,
        Sign::Plus => {
            // Squares mod 64 occupy 12 residues; cheap rejection first.
            let low = (x.iter_u64_digits().next().unwrap_or(0) & 63) as u32;
            if (0x0202_0212_0203_0213_u64 >> low) & 1 == 0 {
                return false;
            }
            let r = x.sqrt();
            &r * &r == *x
        }
    }
}

/// Exact integer square root of a perfect square, `None` otherwise.
pub fn integer_sqrt_exact(x: &Integer) -> Option<Integer> {
    if x.is_negative() {
        return None;
    }
    let r = x.sqrt();
    (&r * &r == *x).then_some(r)
}

/// A rational is a square iff it is non-negative and numerator and
/// denominator (in lowest terms) are both integer squares.
pub fn is_square_rational(x: &Rational) -> bool {
    if x.is_zero() {
        return true;
    }
    !x.is_negative() && is_square_integer(x.numer()) && is_square_integer(x.denom())
}

/// p-adic valuation of a nonzero integer; `None` for zero (valuation +∞).
pub fn valuation(x: &Integer, p: &Integer) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&y, p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}
