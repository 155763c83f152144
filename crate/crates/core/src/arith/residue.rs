use num_bigint::Sign;
use num_integer::Integer as _;

use super::{is_prime_u64, Integer};
use crate::error::{Error, Result};

/// Least non-negative residue of `a` modulo `n` (n ≥ 1).
pub fn mod_u64(a: &Integer, n: u64) -> u64 {
    let (sign, mag) = (a.sign(), a.magnitude());
    let r = (mag % n).iter_u64_digits().next().unwrap_or(0);
    if sign == Sign::Minus && r != 0 {
        n - r
    } else {
        r
    }
}

/// Jacobi symbol (a/n) for odd n ≥ 1, by the binary reciprocity algorithm.
pub fn jacobi_u64(a: u64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a % n;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Legendre symbol for a residue and an odd prime the caller vouches for.
#[inline]
pub fn legendre_u64(a: u64, p: u64) -> i8 {
    jacobi_u64(a, p)
}

/// Legendre symbol (a/p); `p` must be an odd prime (checked).
pub fn legendre(a: &Integer, p: u64) -> Result<i8> {
    if p.is_even() || !is_prime_u64(p) {
        return Err(Error::InvalidInput(format!(
            "Legendre symbol needs an odd prime, got {p}"
        )));
    }
    Ok(jacobi_u64(mod_u64(a, p), p))
}
