//! Dense univariate polynomials over a finite field: arithmetic, modular
//! powering, a Frobenius map, Rabin's irreducibility test and
//! squarefree / distinct-degree / Cantor–Zassenhaus factorization.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;

use crate::field::FiniteField;

const KARATSUBA_THRESHOLD: usize = 32;

/// Coefficients ascending, no trailing zeros (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq)]
pub struct Poly<F: FiniteField> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: FiniteField> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

fn trim<F: FiniteField>(field: &F, v: &mut Vec<F::Elem>) {
    while v.last().is_some_and(|c| field.is_zero(c)) {
        v.pop();
    }
}

fn add_into<F: FiniteField>(field: &F, acc: &mut [F::Elem], src: &[F::Elem]) {
    for (a, b) in acc.iter_mut().zip(src) {
        *a = field.add(a, b);
    }
}

fn schoolbook<F: FiniteField>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if field.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = field.add(&out[i + j], &field.mul(x, y));
        }
    }
    out
}

fn karatsuba<F: FiniteField>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.len() < KARATSUBA_THRESHOLD || b.len() < KARATSUBA_THRESHOLD {
        return schoolbook(field, a, b);
    }
    let half = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(half.min(a.len()));
    let (b0, b1) = b.split_at(half.min(b.len()));
    let z0 = karatsuba(field, a0, b0);
    let z2 = karatsuba(field, a1, b1);
    let sum = |x: &[F::Elem], y: &[F::Elem]| {
        let mut s = vec![field.zero(); x.len().max(y.len())];
        add_into(field, &mut s, x);
        add_into(field, &mut s, y);
        s
    };
    let mut z1 = karatsuba(field, &sum(a0, a1), &sum(b0, b1));
    for (i, c) in z0.iter().enumerate() {
        z1[i] = field.sub(&z1[i], c);
    }
    for (i, c) in z2.iter().enumerate() {
        z1[i] = field.sub(&z1[i], c);
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    add_into(field, &mut out, &z0);
    add_into(field, &mut out[half..], &z1);
    add_into(field, &mut out[2 * half..], &z2);
    out
}

impl<F: FiniteField> Poly<F> {
    pub fn from_coeffs(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        trim(&field, &mut coeffs);
        Poly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        Poly {
            field,
            coeffs: vec![one],
        }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    /// The monomial `x`.
    pub fn x(field: F) -> Self {
        let (z, o) = (field.zero(), field.one());
        Poly {
            field,
            coeffs: vec![z, o],
        }
    }

    pub fn monomial(field: F, c: F::Elem, degree: usize) -> Self {
        let mut v = vec![field.zero(); degree + 1];
        v[degree] = c;
        Self::from_coeffs(field, v)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn into_coeffs(self) -> Vec<F::Elem> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == self.field.one())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lc) => {
                let inv = self.field.inv(lc).expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let v = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Self::from_coeffs(self.field.clone(), v)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| self.field.add(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::from_coeffs(self.field.clone(), v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| self.field.sub(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::from_coeffs(self.field.clone(), v)
    }

    pub fn neg(&self) -> Self {
        let v = self.coeffs.iter().map(|a| self.field.neg(a)).collect();
        Self::from_coeffs(self.field.clone(), v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let v = karatsuba(&self.field, &self.coeffs, &other.coeffs);
        Self::from_coeffs(self.field.clone(), v)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Long division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let f = &self.field;
        let Some(nd) = self.degree().filter(|&n| n >= dd) else {
            return (Self::zero(f.clone()), self.clone());
        };
        let inv = f.inv(d.leading().unwrap()).unwrap();
        let monic_divisor = *d.leading().unwrap() == f.one();
        let mut r = self.coeffs.clone();
        let mut q = vec![f.zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let top = &r[i + dd];
            if f.is_zero(top) {
                continue;
            }
            let c = if monic_divisor {
                top.clone()
            } else {
                f.mul(top, &inv)
            };
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[i + j] = f.sub(&r[i + j], &f.mul(&c, dj));
            }
            q[i] = c;
        }
        r.truncate(dd);
        (
            Self::from_coeffs(f.clone(), q),
            Self::from_coeffs(f.clone(), r),
        )
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Exact quotient; panics (debug) if the division leaves a remainder.
    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(c, &f.from_i64((i as u64 % f.characteristic()) as i64)))
            .collect();
        Self::from_coeffs(f.clone(), v)
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| {
                self.field.add(&self.field.mul(&acc, x), c)
            })
    }

    /// `self(inner)` by Horner's rule.
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(self.field.clone()), |acc, c| {
                acc.mul(inner).add(&Self::constant(self.field.clone(), c.clone()))
            })
    }

    pub fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        self.mul(other).rem(m)
    }

    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut r = Self::one(self.field.clone()).rem(m);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_mod(&b, m);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul_mod(&b, m);
            }
        }
        r
    }

    /// Polynomial p-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self) -> Self {
        let p = self.field.characteristic() as usize;
        let v = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|c| self.field.pth_root(c))
            .collect();
        Self::from_coeffs(self.field.clone(), v)
    }

    /// Squarefree decomposition of a monic polynomial: pairs
    /// `(squarefree factor, multiplicity)` with pairwise coprime factors.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let p = f.field.characteristic() as u32;
        let mut c = f.gcd(&f.derivative());
        let mut w = f.div_exact(&c);
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let z = w.div_exact(&y);
            if !z.is_one() {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = c.div_exact(&w);
        }
        if !c.is_one() {
            for (g, m) in c.pth_root().squarefree_decomposition() {
                out.push((g, m * p));
            }
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Rabin's test: `x^{q^d} ≡ x` and `gcd(x^{q^{d/ℓ}} − x, g) = 1` for
    /// every prime ℓ | d.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else {
            return false;
        };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let g = self.monic();
        let frob = FrobeniusMap::new(&g);
        let x = Self::x(g.field.clone());
        let divisors: Vec<usize> = prime_divisors(d).into_iter().map(|l| d / l).collect();
        let mut h = x.clone();
        for i in 1..=d {
            h = frob.apply(&h);
            if divisors.contains(&i) && !h.sub(&x).gcd(&g).is_one() {
                return false;
            }
        }
        h == x
    }

    /// Distinct-degree factorization of a monic squarefree polynomial:
    /// pairs `(product of all degree-i factors, i)`.
    pub fn distinct_degree(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        let mut g = self.monic();
        if g.degree().unwrap_or(0) == 0 {
            return out;
        }
        let frob = FrobeniusMap::new(&g);
        let x = Self::x(g.field.clone());
        let mut h = x.clone();
        let mut i = 0;
        while let Some(dg) = g.degree().filter(|&d| d >= 2 * (i + 1)) {
            let _ = dg;
            i += 1;
            h = frob.apply(&h).rem(&g);
            let part = h.sub(&x).gcd(&g);
            if !part.is_one() {
                g = g.div_exact(&part);
                h = h.rem(&g);
                out.push((part, i));
            }
        }
        if let Some(d) = g.degree().filter(|&d| d > 0) {
            out.push((g, d));
        }
        out
    }

    /// Cantor–Zassenhaus split of a monic squarefree product of
    /// degree-`d` irreducibles (odd characteristic).
    pub fn equal_degree<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Vec<Self> {
        let g = self.monic();
        let n = g.degree().unwrap_or(0);
        if n == d {
            return vec![g];
        }
        assert!(n > d && n % d == 0, "degree {n} is not a multiple of {d}");
        let f = g.field.clone();
        let frob = FrobeniusMap::new(&g);
        let half = (f.order() - 1) / 2;
        loop {
            let a = Self::from_coeffs(f.clone(), (0..n).map(|_| f.random(rng)).collect());
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let direct = a.gcd(&g);
            let b = if !direct.is_one() {
                direct
            } else {
                // a^{(q^d−1)/2} = (a · a^q ⋯ a^{q^{d−1}})^{(q−1)/2}
                let mut t = a.clone();
                let mut norm = a.clone();
                for _ in 1..d {
                    t = frob.apply(&t);
                    norm = norm.mul_mod(&t, &g);
                }
                let s = norm.pow_mod(half, &g);
                s.sub(&Self::one(f.clone())).gcd(&g)
            };
            let db = b.degree().unwrap_or(0);
            if db > 0 && db < n {
                let mut out = b.equal_degree(d, rng);
                out.extend(g.div_exact(&b).equal_degree(d, rng));
                return out;
            }
        }
    }

    /// Complete factorization of a nonzero polynomial into monic
    /// irreducibles with multiplicities, sorted by degree then coefficients.
    /// The leading coefficient is dropped.
    pub fn factor<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<(Self, u32)> {
        let mut out = Vec::new();
        for (sf, mult) in self.monic().squarefree_decomposition() {
            for (part, d) in sf.distinct_degree() {
                for irr in part.equal_degree(d, rng) {
                    out.push((irr, mult));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp_canonical(&b.0).then(a.1.cmp(&b.1)));
        out
    }

    /// Degrees of the irreducible factors, with multiplicity, ascending.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (sf, mult) in self.monic().squarefree_decomposition() {
            for (part, d) in sf.distinct_degree() {
                let count = part.degree().unwrap() / d * mult as usize;
                out.extend(std::iter::repeat(d).take(count));
            }
        }
        out.sort_unstable();
        out
    }

    /// Roots in the coefficient field, ascending.
    pub fn roots<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<F::Elem> {
        let mut out: Vec<F::Elem> = Vec::new();
        for (sf, _) in self.monic().squarefree_decomposition() {
            for (part, d) in sf.distinct_degree() {
                if d == 1 {
                    for lin in part.equal_degree(1, rng) {
                        out.push(self.field.neg(&lin.coeffs[0]));
                    }
                }
            }
        }
        out.sort();
        out
    }

    fn cmp_canonical(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The F_q-linear map `h ↦ h^q mod g`, stored as the images of `x^j`.
pub struct FrobeniusMap<F: FiniteField> {
    modulus: Poly<F>,
    images: Vec<Poly<F>>,
}

impl<F: FiniteField> FrobeniusMap<F> {
    pub fn new(modulus: &Poly<F>) -> Self {
        let d = modulus.degree().expect("nonzero modulus");
        let f = modulus.field.clone();
        let xq = Poly::x(f.clone()).pow_mod(f.order(), modulus);
        let mut images = Vec::with_capacity(d);
        let mut cur = Poly::one(f).rem(modulus);
        for _ in 0..d {
            images.push(cur.clone());
            cur = cur.mul_mod(&xq, modulus);
        }
        FrobeniusMap {
            modulus: modulus.clone(),
            images,
        }
    }

    /// `h^q mod g`; coefficients of h are fixed by the q-power map.
    pub fn apply(&self, h: &Poly<F>) -> Poly<F> {
        let f = &self.modulus.field;
        let h = if h.degree().unwrap_or(0) >= self.images.len() {
            h.rem(&self.modulus)
        } else {
            h.clone()
        };
        let d = self.images.len();
        let mut acc = vec![f.zero(); d];
        for (c, img) in h.coeffs.iter().zip(&self.images) {
            if f.is_zero(c) {
                continue;
            }
            for (a, b) in acc.iter_mut().zip(&img.coeffs) {
                *a = f.add(a, &f.mul(c, b));
            }
        }
        Poly::from_coeffs(f.clone(), acc)
    }
}
