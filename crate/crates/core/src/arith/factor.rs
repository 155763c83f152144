//! Bounded factorization: trial division, then Brent's variant of Pollard
//! rho. Budget exhaustion leaves an explicit unfactored cofactor.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::{BigUint, Sign};
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::primality::{is_prime_biguint, is_prime_u64, mul_mod};
use super::sieve::{PrimeSieve, Segment};
use super::Integer;

const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

/// Limits on how hard `factor` tries before reporting a cofactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FactorBudget {
    pub trial_bound: u64,
    /// Pollard rho iterations allowed per composite.
    pub rho_iterations: u64,
    pub time_cap_ms: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_bound: DEFAULT_TRIAL_BOUND,
            rho_iterations: 10_000_000,
            time_cap_ms: 60_000,
        }
    }
}

impl FactorBudget {
    pub fn validate(&self) -> crate::Result<()> {
        if self.trial_bound < 2 || self.rho_iterations == 0 || self.time_cap_ms == 0 {
            return Err(crate::Error::InvalidInput(
                "factor budget fields must be positive (trial bound ≥ 2)".into(),
            ));
        }
        Ok(())
    }
}

/// `value = sign · ∏ pᵉ · cofactor`, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(Integer, u32)>,
    /// 1 when the factorization is complete; otherwise the composite
    /// remainder the budget could not split.
    pub cofactor: Integer,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn multiplicity(&self, p: &Integer) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map_or(0, |(_, e)| *e)
    }

    /// Re-multiplies the factorization.
    pub fn value(&self) -> Integer {
        let mut v = self.cofactor.clone();
        for (p, e) in &self.factors {
            v *= num_traits::pow(p.clone(), *e as usize);
        }
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }
}

fn trial_primes(bound: u64) -> std::borrow::Cow<'static, [u64]> {
    static DEFAULT: OnceLock<Vec<u64>> = OnceLock::new();
    let base = DEFAULT.get_or_init(|| {
        let s = PrimeSieve::new(DEFAULT_TRIAL_BOUND);
        s.primes_in(Segment {
            lo: 0,
            hi: DEFAULT_TRIAL_BOUND + 1,
        })
    });
    if bound <= DEFAULT_TRIAL_BOUND {
        let end = base.partition_point(|&p| p <= bound);
        std::borrow::Cow::Borrowed(&base[..end])
    } else {
        let s = PrimeSieve::new(bound);
        std::borrow::Cow::Owned(s.primes_in(Segment { lo: 0, hi: bound + 1 }))
    }
}

struct Clock {
    deadline: Instant,
}

impl Clock {
    fn expired(&self) -> bool {
        Instant::now() >= self.deadline
    }
}

fn rho_u64(n: u64, c: u64, max_iter: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let m = 128u64;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let (mut x, mut ys) = (0u64, 0u64);
    let mut iters = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = num_integer::gcd(q, n);
            k += m;
        }
        iters += 2 * r;
        if iters > max_iter {
            return None;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = num_integer::gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn rho_big(n: &BigUint, c: u64, max_iter: u64, clock: &Clock) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let m = 128u64;
    let (mut y, mut r, mut q, mut g) = (BigUint::from(2u32), 1u64, BigUint::one(), BigUint::one());
    let (mut x, mut ys) = (BigUint::zero(), BigUint::zero());
    let mut iters = 0u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let d = if x > y { &x - &y } else { &y - &x };
                q = q * d % n;
            }
            g = q.gcd(n);
            k += m;
        }
        iters += 2 * r;
        if iters > max_iter || clock.expired() {
            return None;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let d = if x > ys { &x - &ys } else { &ys - &x };
            g = d.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

fn is_prime_any(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(s) => is_prime_u64(s),
        None => is_prime_biguint(n),
    }
}

/// Split composite `n` into primes (pushed to `primes`) and unsplit
/// composites (pushed to `stuck`).
fn split(
    n: BigUint,
    budget: &FactorBudget,
    clock: &Clock,
    primes: &mut Vec<BigUint>,
    stuck: &mut Vec<BigUint>,
) {
    if n.is_one() {
        return;
    }
    if is_prime_any(&n) {
        primes.push(n);
        return;
    }
    let mut found = None;
    for c in 1..=8u64 {
        if clock.expired() {
            break;
        }
        let d = match n.to_u64() {
            Some(s) => rho_u64(s, c, budget.rho_iterations).map(BigUint::from),
            None => rho_big(&n, c, budget.rho_iterations, clock),
        };
        if d.is_some() {
            found = d;
            break;
        }
    }
    match found {
        Some(d) => {
            let other = &n / &d;
            split(d, budget, clock, primes, stuck);
            split(other, budget, clock, primes, stuck);
        }
        None => stuck.push(n),
    }
}

/// Factor a nonzero integer within `budget`. Every listed factor is prime
/// (exactly below 2⁶⁴, strong probable prime with 40 bases above).
pub fn factor(x: &Integer, budget: &FactorBudget) -> Factorization {
    assert!(!x.is_zero(), "factor(0) is undefined");
    let sign = if x.sign() == Sign::Minus { -1 } else { 1 };
    let clock = Clock {
        deadline: Instant::now() + Duration::from_millis(budget.time_cap_ms),
    };
    let mut rem = x.magnitude().clone();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();

    let primes = trial_primes(budget.trial_bound);
    for &p in primes.iter() {
        if rem.is_one() {
            break;
        }
        if let Some(r) = rem.to_u64() {
            if p.saturating_mul(p) > r {
                break;
            }
        }
        if (&rem % p).is_zero() {
            let mut e = 0;
            while (&rem % p).is_zero() {
                rem /= p;
                e += 1;
            }
            factors.push((BigUint::from(p), e));
        }
    }

    if !rem.is_one() {
        let tb = BigUint::from(budget.trial_bound);
        if rem <= &tb * &tb {
            factors.push((rem.clone(), 1));
        } else {
            let mut ps = Vec::new();
            let mut stuck = Vec::new();
            split(rem.clone(), budget, &clock, &mut ps, &mut stuck);
            ps.sort();
            for p in ps {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
            rem = stuck.into_iter().fold(BigUint::one(), |a, b| a * b);
            // Pull any known prime back out of the cofactor.
            for (p, e) in factors.iter_mut() {
                while !rem.is_one() && (&rem % &*p).is_zero() {
                    rem /= &*p;
                    *e += 1;
                }
            }
        }
        if factors.iter().any(|(p, _)| *p == rem) {
            rem = BigUint::one();
        }
    }
    factors.sort();
    let complete = rem.is_one() || factors.last().is_some_and(|(p, _)| *p == rem);
    Factorization {
        sign,
        factors: factors
            .into_iter()
            .map(|(p, e)| (Integer::from(p), e))
            .collect(),
        cofactor: if complete {
            Integer::one()
        } else {
            Integer::from(rem)
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn as_u64(f: &Factorization) -> Vec<(u64, u32)> {
        f.factors.iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect()
    }

    #[test]
    fn examples() {
        let b = FactorBudget::default();
        let f = factor(&677.into(), &b);
        assert_eq!(as_u64(&f), vec![(677, 1)]);
        assert!(f.is_complete());
        let f = factor(&(-360).into(), &b);
        assert_eq!(f.sign, -1);
        assert_eq!(as_u64(&f), vec![(2, 3), (3, 2), (5, 1)]);
        let f = factor(&458330.into(), &b);
        assert_eq!(as_u64(&f), brute(458330));
        assert_eq!(f.value(), Integer::from(458330));
    }

    #[test]
    fn rho_path() {
        // Two primes above the trial bound.
        let b = FactorBudget::default();
        let p: Integer = 1_000_003.into();
        let q: Integer = 1_000_033.into();
        let f = factor(&(&p * &q * &p), &b);
        assert!(f.is_complete());
        assert_eq!(f.factors, vec![(p.clone(), 2), (q.clone(), 1)]);
        // Beyond 64 bits.
        let r: Integer = "1000000000000000003".parse().unwrap();
        let s: Integer = "10000000019".parse().unwrap();
        let f = factor(&(&r * &s * 12), &b);
        assert!(f.is_complete());
        assert_eq!(f.value(), &r * &s * 12);
        assert_eq!(f.multiplicity(&r), 1);
    }

    #[test]
    fn exhausted_budget_leaves_cofactor() {
        let budget = FactorBudget {
            trial_bound: 100,
            rho_iterations: 16,
            time_cap_ms: 1000,
        };
        let p: Integer = "1000000000000000003".parse().unwrap();
        let q: Integer = "1000000000000000009".parse().unwrap();
        let n = &p * &q * 4;
        let f = factor(&n, &budget);
        assert!(!f.is_complete());
        assert_eq!(f.factors, vec![(Integer::from(2), 2)]);
        assert_eq!(f.cofactor, &p * &q);
        assert_eq!(f.value(), n);
    }

    #[test]
    fn matches_brute_force_on_small_values() {
        let b = FactorBudget::default();
        for n in (2u64..5000).chain([999_983 * 999_979, 4_294_967_297]) {
            let f = factor(&Integer::from(n), &b);
            assert_eq!(as_u64(&f), brute(n), "{n}");
        }
    }
}
