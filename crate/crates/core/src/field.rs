//! Finite fields F_p and F_{p^k} (polynomial basis over a fixed modulus).

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};
use crate::poly::Poly;

pub trait FiniteField: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn characteristic(&self) -> u64;
    /// Extension degree over the prime field.
    fn degree(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// The `index`-th element in a fixed enumeration, `index < order()`.
    fn element(&self, index: u128) -> Self::Elem;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn order(&self) -> u128 {
        (self.characteristic() as u128).pow(self.degree())
    }

    fn pow(&self, a: &Self::Elem, mut e: u128) -> Self::Elem {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        (!self.is_zero(a)).then(|| self.pow(a, self.order() - 2))
    }

    /// Zero counts as a square.
    fn is_square(&self, a: &Self::Elem) -> bool {
        self.is_zero(a) || self.pow(a, (self.order() - 1) / 2) == self.one()
    }

    /// Tonelli–Shanks square root (odd characteristic).
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a) {
            return None;
        }
        let q = self.order();
        let s = (q - 1).trailing_zeros();
        let t = (q - 1) >> s;
        let z = (1..q)
            .map(|i| self.element(i))
            .find(|z| !self.is_square(z))
            .expect("odd field has a non-residue");
        let mut c = self.pow(&z, t);
        let mut x = self.pow(a, t.div_ceil(2));
        let mut b = self.pow(a, t);
        let mut m = s;
        while b != self.one() {
            let mut i = 0;
            let mut bb = b.clone();
            while bb != self.one() {
                bb = self.mul(&bb, &bb);
                i += 1;
            }
            let mut gs = c.clone();
            for _ in 0..(m - i - 1) {
                gs = self.mul(&gs, &gs);
            }
            x = self.mul(&x, &gs);
            c = self.mul(&gs, &gs);
            b = self.mul(&b, &c);
            m = i;
        }
        Some(x)
    }

    /// Inverse Frobenius: the unique p-th root.
    fn pth_root(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.order() / self.characteristic() as u128)
    }
}

/// The prime field F_p, `p < 2⁶³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime_u64(p) || p >= 1 << 63 {
            return Err(Error::InvalidInput(format!("{p} is not a prime below 2^63")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }
}

impl FiniteField for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        1
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i128(v as i128)
    }
    fn element(&self, index: u128) -> u64 {
        index as u64
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
}

/// F_{p^k} = F_p[θ]/(modulus θ); elements are coefficient vectors of length k.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FqField {
    p: u64,
    k: u32,
    /// Monic irreducible modulus over F_p, ascending, length k + 1.
    modulus: Arc<[u64]>,
}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.k, self.modulus)
    }
}

impl FqField {
    /// F_{p^k} with the least irreducible modulus in the enumeration order
    /// `Σ cᵢ pⁱ` of its non-leading coefficients.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        let fp = PrimeField::new(p)?;
        if p == 2 {
            return Err(Error::InvalidInput("odd characteristic required".into()));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be ≥ 1".into()));
        }
        let count = (p as u128).checked_pow(k).filter(|&c| c < 1 << 62).ok_or_else(|| {
            Error::InvalidInput(format!("field of order {p}^{k} too large"))
        })?;
        for idx in 0..count {
            let mut coeffs = digits(idx, p, k as usize);
            coeffs.push(1);
            let poly = Poly::from_coeffs(fp, coeffs.clone());
            if poly.is_irreducible() {
                return Ok(FqField {
                    p,
                    k,
                    modulus: coeffs.into(),
                });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// F_{p^k} for an explicit monic modulus (ascending coefficients).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let fp = PrimeField::new(p)?;
        if p == 2 {
            return Err(Error::InvalidInput("odd characteristic required".into()));
        }
        let poly = Poly::from_coeffs(fp, modulus.iter().map(|c| c % p).collect());
        if poly.degree().unwrap_or(0) == 0 || !poly.is_monic() || !poly.is_irreducible() {
            return Err(Error::InvalidInput("modulus must be monic irreducible".into()));
        }
        Ok(FqField {
            p,
            k: poly.degree().unwrap() as u32,
            modulus: poly.coeffs().to_vec().into(),
        })
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Embed an F_p residue.
    pub fn from_u64(&self, v: u64) -> Vec<u64> {
        let mut e = vec![0; self.k as usize];
        e[0] = v % self.p;
        e
    }

    /// Element from its basis coordinates (reduced mod p, padded).
    pub fn from_coords(&self, coords: &[u64]) -> Result<Vec<u64>> {
        if coords.len() > self.k as usize {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates, field degree is {}",
                coords.len(),
                self.k
            )));
        }
        let mut e: Vec<u64> = coords.iter().map(|c| c % self.p).collect();
        e.resize(self.k as usize, 0);
        Ok(e)
    }

    /// The generator θ of the polynomial basis.
    pub fn generator(&self) -> Vec<u64> {
        let mut e = vec![0; self.k as usize];
        if self.k == 1 {
            e[0] = (self.p - self.modulus[0]) % self.p;
        } else {
            e[1] = 1;
        }
        e
    }

    pub fn prime_field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }
}

fn digits(mut idx: u128, p: u64, k: usize) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = (idx % p as u128) as u64;
            idx /= p as u128;
            d
        })
        .collect()
}

impl FiniteField for FqField {
    type Elem = Vec<u64>;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        self.k
    }
    fn zero(&self) -> Vec<u64> {
        vec![0; self.k as usize]
    }
    fn one(&self) -> Vec<u64> {
        self.from_u64(1)
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&c| c == 0)
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let k = self.k as usize;
        let p = self.p as u128;
        let mut prod = vec![0u128; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        // reduce by the monic modulus from the top
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &mi) in self.modulus[..k].iter().enumerate() {
                let idx = d - k + i;
                prod[idx] = (prod[idx] + (p - c) * mi as u128) % p;
            }
        }
        prod[..k].iter().map(|&c| c as u64).collect()
    }
    fn from_i64(&self, v: i64) -> Vec<u64> {
        self.from_u64((v as i128).rem_euclid(self.p as i128) as u64)
    }
    fn element(&self, index: u128) -> Vec<u64> {
        digits(index, self.p, self.k as usize)
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.k).map(|_| rng.gen_range(0..self.p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.inv(&3), Some(5));
        assert!(f.is_square(&2));
        assert!(!f.is_square(&3));
        let r = f.sqrt(&2).unwrap();
        assert_eq!(f.mul(&r, &r), 2);
        assert!(PrimeField::new(9).is_err());
        let big = PrimeField::new(1_000_000_007).unwrap();
        for a in 1..200u64 {
            if let Some(r) = big.sqrt(&a) {
                assert_eq!(big.mul(&r, &r), a);
            }
        }
    }

    #[test]
    fn f9_uses_least_modulus() {
        let f9 = FqField::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let i = f9.generator();
        assert_eq!(f9.mul(&i, &i), f9.from_i64(-1));
        // squares in F_9* form a subgroup of order 4
        let squares = (1..9).map(|k| f9.element(k)).filter(|e| f9.is_square(e)).count();
        assert_eq!(squares, 4);
        for k in 1..9 {
            let e = f9.element(k);
            let inv = f9.inv(&e).unwrap();
            assert_eq!(f9.mul(&e, &inv), f9.one());
            if let Some(r) = f9.sqrt(&e) {
                assert_eq!(f9.mul(&r, &r), e);
            }
        }
    }

    #[test]
    fn pth_root_inverts_frobenius() {
        let f = FqField::new(5, 3).unwrap();
        for k in 0..125 {
            let e = f.element(k);
            let fr = f.pow(&e, 5);
            assert_eq!(f.pth_root(&fr), e);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(FqField::new(2, 3).is_err());
        assert!(FqField::new(3, 0).is_err());
        assert!(FqField::with_modulus(3, vec![2, 0, 1]).is_err()); // x²+2 = (x+1)(x+2)
        assert!(FqField::with_modulus(3, vec![1, 0, 1]).is_ok());
    }
}
