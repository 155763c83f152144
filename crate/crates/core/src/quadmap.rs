//! Quadratic maps over ℤ written around their critical point,
//! `f(x) = (x − γ)² + γ + m`, with the irreducibility and stability tests
//! that only need the critical orbit.

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    factor, is_prime_u64, is_square_integer, is_square_rational, integer_sqrt_exact, legendre_u64,
    mod_u64, valuation, FactorBudget, Integer, Rational,
};
use crate::error::{Error, Result};

/// Default limit on orbit depth; entries roughly double in length per step.
pub const DEFAULT_ORBIT_DEPTH_CAP: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadMapZ {
    #[serde(with = "crate::serde_int")]
    pub gamma: Integer,
    #[serde(with = "crate::serde_int")]
    pub m: Integer,
}

impl QuadMapZ {
    pub fn new(gamma: Integer, m: Integer) -> Self {
        QuadMapZ { gamma, m }
    }

    pub fn from_i64(gamma: i64, m: i64) -> Self {
        QuadMapZ::new(gamma.into(), m.into())
    }

    /// Ascending coefficients `[γ² + γ + m, −2γ, 1]`.
    pub fn coefficients(&self) -> [Integer; 3] {
        let g = &self.gamma;
        [g * g + g + &self.m, -(g * Integer::from(2)), Integer::one()]
    }

    pub fn eval(&self, x: &Integer) -> Integer {
        let d = x - &self.gamma;
        &d * &d + &self.gamma + &self.m
    }

    /// f(γ) = γ + m.
    pub fn critical_value(&self) -> Integer {
        &self.gamma + &self.m
    }

    /// γ = −m, so f = (x − γ)² and every iterate is a square.
    pub fn is_degenerate(&self) -> bool {
        self.critical_value().is_zero()
    }
}

/// `[f₀(0), f₀²(0), …, f₀ᴺ(0)]` for `f₀ = x² + m`.
pub fn base_orbit(m: &Integer, depth: u32) -> Vec<Integer> {
    let mut out = Vec::with_capacity(depth as usize);
    let mut a = Integer::zero();
    for _ in 0..depth {
        a = &a * &a + m;
        out.push(a.clone());
    }
    out
}

/// The critical orbit, stored through the γ-free base orbit:
/// `fⁱ(γ) = f₀ⁱ(0) + γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalOrbit {
    pub map: QuadMapZ,
    #[serde(with = "crate::serde_int::vec")]
    pub base: Vec<Integer>,
}

impl CriticalOrbit {
    pub fn depth(&self) -> u32 {
        self.base.len() as u32
    }

    /// f₀ⁱ(0), 1-indexed.
    pub fn base_at(&self, i: u32) -> &Integer {
        &self.base[i as usize - 1]
    }

    /// fⁱ(γ), 1-indexed.
    pub fn value(&self, i: u32) -> Integer {
        self.base_at(i) + &self.map.gamma
    }

    /// `[−f(γ), f²(γ), …, fᴺ(γ)]`.
    pub fn adjusted(&self) -> Vec<Integer> {
        (1..=self.depth())
            .map(|i| if i == 1 { -self.value(1) } else { self.value(i) })
            .collect()
    }
}

pub fn orbit(f: &QuadMapZ, depth: u32) -> CriticalOrbit {
    CriticalOrbit {
        map: f.clone(),
        base: base_orbit(&f.m, depth),
    }
}

pub fn adjusted_sequence(f: &QuadMapZ, n: u32) -> Vec<Integer> {
    orbit(f, n).adjusted()
}

/// Outcome of a one-directional irreducibility criterion over ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Criterion {
    IrreducibleCertified,
    /// The criterion gives no information; `index` is the first level
    /// whose test failed.
    Inconclusive { index: u32 },
}

impl Criterion {
    pub fn is_certified(&self) -> bool {
        matches!(self, Criterion::IrreducibleCertified)
    }
}

/// fⁿ is irreducible over ℚ if no entry of the adjusted sequence through
/// index n is a square.
pub fn check_fund(f: &QuadMapZ, n: u32) -> Criterion {
    for (i, a) in adjusted_sequence(f, n).iter().enumerate() {
        if is_square_integer(a) {
            return Criterion::Inconclusive { index: i as u32 + 1 };
        }
    }
    Criterion::IrreducibleCertified
}

/// The two elements `(t ± √fⁱ(γ))/2` that replace fⁱ(γ) when it is a
/// square, with `t = −f(γ) + γ` at level 2 and `t = fⁱ⁻¹(γ) − γ` above.
/// `None` when fⁱ(γ) is not a square.
pub fn altfund_elements(orb: &CriticalOrbit, i: u32) -> Option<[Rational; 2]> {
    assert!(i >= 2 && i <= orb.depth());
    let root = integer_sqrt_exact(&orb.value(i))?;
    let t = if i == 2 {
        &orb.map.gamma - orb.value(1)
    } else {
        orb.value(i - 1) - &orb.map.gamma
    };
    let two = Integer::from(2);
    Some([
        Rational::new(&t + &root, two.clone()),
        Rational::new(t - root, two),
    ])
}

/// Refinement of [`check_fund`]: a square fⁱ(γ) is tolerated when both
/// [`altfund_elements`] at that level are non-squares. For n = 1 this is
/// the plain test on −f(γ).
pub fn check_altfund(f: &QuadMapZ, n: u32) -> Criterion {
    let orb = orbit(f, n.max(1));
    if is_square_integer(&-orb.value(1)) {
        return Criterion::Inconclusive { index: 1 };
    }
    for i in 2..=n {
        if !is_square_integer(&orb.value(i)) {
            continue;
        }
        let pair = altfund_elements(&orb, i).expect("square value has a root");
        if pair.iter().any(is_square_rational) {
            return Criterion::Inconclusive { index: i };
        }
    }
    Criterion::IrreducibleCertified
}

/// Evidence that f is stable over ℚ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StabilityCertificate {
    /// γ + m is odd and −(γ + m) is not a square.
    NumfieldQ {
        #[serde(with = "crate::serde_int")]
        gamma_plus_m: Integer,
    },
    /// v_p(m) odd and positive, v_p(γ) > v_p(m); `v_gamma` is `None` for γ = 0.
    DeddomStab {
        #[serde(with = "crate::serde_int")]
        p: Integer,
        v_m: u32,
        v_gamma: Option<u32>,
    },
    None {
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
}

impl StabilityCertificate {
    pub fn is_none(&self) -> bool {
        matches!(self, StabilityCertificate::None { .. })
    }

    /// Recheck the recorded hypotheses against `f` from scratch.
    pub fn verify(&self, f: &QuadMapZ) -> bool {
        match self {
            StabilityCertificate::NumfieldQ { gamma_plus_m } => {
                *gamma_plus_m == f.critical_value()
                    && gamma_plus_m.is_odd()
                    && !is_square_integer(&-gamma_plus_m)
            }
            StabilityCertificate::DeddomStab { p, v_m, v_gamma } => {
                crate::arith::is_prime(p)
                    && valuation(&f.m, p) == Some(*v_m)
                    && valuation(&f.gamma, p) == *v_gamma
                    && v_m % 2 == 1
                    && v_gamma.map_or(true, |g| g > *v_m)
            }
            StabilityCertificate::None { .. } => true,
        }
    }
}

pub fn check_numfield_q(f: &QuadMapZ) -> StabilityCertificate {
    let c = f.critical_value();
    if c.is_odd() && !is_square_integer(&-&c) {
        StabilityCertificate::NumfieldQ { gamma_plus_m: c }
    } else {
        StabilityCertificate::None { note: None }
    }
}

pub fn check_deddomstab(f: &QuadMapZ, budget: &FactorBudget) -> StabilityCertificate {
    if f.m.is_zero() {
        return StabilityCertificate::None { note: None };
    }
    let fac = factor(&f.m, budget);
    for (p, e) in &fac.factors {
        if e % 2 == 0 {
            continue;
        }
        let vg = valuation(&f.gamma, p);
        if vg.map_or(true, |g| g > *e) {
            return StabilityCertificate::DeddomStab {
                p: p.clone(),
                v_m: *e,
                v_gamma: vg,
            };
        }
    }
    let note = (!fac.is_complete())
        .then(|| format!("budget: unfactored cofactor {}", fac.cofactor));
    StabilityCertificate::None { note }
}

/// Result of probing the rigid-divisibility property of the base orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidProbe {
    /// First index with `v_p(f₀ᵏ(0)) > 0`.
    pub k: u32,
    pub e: u32,
    /// `v_p(f₀^{kj}(0)) = e` for every multiple `kj ≤ N`.
    pub holds: bool,
}

/// `None` when p divides no nonzero f₀ᵏ(0) with k ≤ N.
pub fn rigid_divisibility_probe(m: &Integer, p: &Integer, depth: u32) -> Option<RigidProbe> {
    let base = base_orbit(m, depth);
    let (k, e) = base
        .iter()
        .enumerate()
        .find_map(|(i, a)| valuation(a, p).filter(|&v| v > 0).map(|v| (i + 1, v)))?;
    let holds = (k..=depth as usize)
        .step_by(k)
        .all(|j| valuation(&base[j - 1], p) == Some(e));
    Some(RigidProbe {
        k: k as u32,
        e,
        holds,
    })
}

/// s must be odd exactly when m is even or n is odd.
pub fn s_must_be_odd(n: u32, m: &Integer) -> bool {
    m.is_even() || n % 2 == 1
}

/// γ = s − f₀ⁿ(0) after checking every hypothesis on (n, m, s).
pub fn construct_qcor(n: u32, m: &Integer, s: &Integer) -> Result<QuadMapZ> {
    if n < 2 {
        return Err(Error::hypothesis(format!("n ≥ 2 (got n = {n})")));
    }
    if !is_square_integer(s) {
        return Err(Error::hypothesis(format!("squareness: s = {s} is not a perfect square")));
    }
    let odd = s_must_be_odd(n, m);
    if s.is_odd() != odd {
        let want = if odd { "odd" } else { "even" };
        return Err(Error::hypothesis(format!(
            "parity: s must be {want} for n = {n}, m = {m}"
        )));
    }
    let base = base_orbit(m, n);
    let prev = &base[n as usize - 2];
    if *s <= prev * prev {
        return Err(Error::hypothesis(format!(
            "size: s must exceed (f₀^{}(0))² = {}",
            n - 1,
            prev * prev
        )));
    }
    Ok(QuadMapZ::new(s - &base[n as usize - 1], m.clone()))
}

/// The `count` smallest s accepted by [`construct_qcor`], ascending.
pub fn suggest_s(n: u32, m: &Integer, count: usize) -> Vec<Integer> {
    if n < 2 {
        return Vec::new();
    }
    let prev = base_orbit(m, n - 1).pop().unwrap().abs();
    let odd = s_must_be_odd(n, m);
    let mut a = prev + 1u32;
    if a.is_odd() != odd {
        a += 1u32;
    }
    (0..count)
        .map(|j| {
            let r = &a + Integer::from(2 * j);
            &r * &r
        })
        .collect()
}

/// Residues mod p of the adjusted sequence through level n, computed
/// without big-integer growth.
pub fn adjusted_residues(f: &QuadMapZ, n: u32, p: u64) -> Vec<u64> {
    let g = mod_u64(&f.gamma, p) as u128;
    let m = mod_u64(&f.m, p) as u128;
    let p128 = p as u128;
    let mut a = 0u128;
    let mut out = Vec::with_capacity(n as usize);
    for i in 1..=n {
        a = (a * a + m) % p128;
        let v = (a + g) % p128;
        out.push(if i == 1 { ((p128 - v) % p128) as u64 } else { v as u64 });
    }
    out
}

/// Over F_p the adjusted-sequence test is an equivalence: f̄ⁿ is reducible
/// iff some entry through level n is a square (zero included).
pub fn check_deddom_reducibility(f: &QuadMapZ, n: u32, p: u64) -> Result<bool> {
    if p % 2 == 0 || !is_prime_u64(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    Ok(adjusted_residues(f, n, p)
        .into_iter()
        .any(|a| legendre_u64(a, p) != -1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(s: &str) -> Integer {
        s.parse().unwrap()
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(&QuadMapZ::from_i64(0, 1), 4);
        assert_eq!(o.base, [1, 2, 5, 26].map(Integer::from));
        let o9 = orbit(&QuadMapZ::from_i64(0, 1), 9);
        assert_eq!(
            o9.base[8],
            int("1947270476915296449559703445493848930452791205")
        );
        assert!(orbit(&QuadMapZ::from_i64(5, 0), 3)
            .base
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn fund_examples() {
        assert_eq!(
            check_fund(&QuadMapZ::from_i64(1, 0), 2),
            Criterion::Inconclusive { index: 2 }
        );
        assert!(check_fund(&QuadMapZ::from_i64(2, 1), 1).is_certified());
        // S = {2, −1, −2} has no square entry, so the one-way test certifies.
        let f = QuadMapZ::from_i64(-1, -1);
        assert_eq!(adjusted_sequence(&f, 3), [2, -1, -2].map(Integer::from));
        assert!(check_fund(&f, 3).is_certified());
    }

    #[test]
    fn altfund_examples() {
        let f = QuadMapZ::from_i64(1, 0);
        let orb = orbit(&f, 2);
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(altfund_elements(&orb, 2).unwrap(), [half.clone(), -half]);
        assert!(check_altfund(&f, 2).is_certified());
        assert!(check_altfund(&f, 5).is_certified());
        assert_eq!(
            check_altfund(&QuadMapZ::from_i64(-3, 3), 2),
            Criterion::Inconclusive { index: 1 }
        );
    }

    #[test]
    fn stability_examples() {
        for (g, m) in [(1, 0), (2, 1)] {
            let f = QuadMapZ::from_i64(g, m);
            let c = check_numfield_q(&f);
            assert!(!c.is_none() && c.verify(&f));
        }
        assert!(check_numfield_q(&QuadMapZ::from_i64(-1, -1)).is_none());
        let b = FactorBudget::default();
        let f = QuadMapZ::from_i64(4, 2);
        let c = check_deddomstab(&f, &b);
        assert_eq!(
            c,
            StabilityCertificate::DeddomStab {
                p: 2.into(),
                v_m: 1,
                v_gamma: Some(2)
            }
        );
        assert!(c.verify(&f));
        assert!(!check_deddomstab(&QuadMapZ::from_i64(9, 3), &b).is_none());
        assert!(check_deddomstab(&QuadMapZ::from_i64(2, 4), &b).is_none());
    }

    #[test]
    fn rigid_examples() {
        let p = rigid_divisibility_probe(&2.into(), &2.into(), 8).unwrap();
        assert_eq!((p.k, p.e, p.holds), (1, 1, true));
        assert!(rigid_divisibility_probe(&3.into(), &3.into(), 8).unwrap().holds);
        let p = rigid_divisibility_probe(&1.into(), &5.into(), 8).unwrap();
        assert_eq!((p.k, p.e, p.holds), (3, 1, true));
        assert!(rigid_divisibility_probe(&1.into(), &7.into(), 3).is_none());
    }

    #[test]
    fn qcor_examples() {
        let g = |n, m: i64, s: &Integer| construct_qcor(n, &m.into(), s).map(|f| f.gamma);
        assert_eq!(g(2, 0, &1.into()).unwrap(), 1.into());
        assert_eq!(g(2, 1, &4.into()).unwrap(), 2.into());
        let a = base_orbit(&1.into(), 8).pop().unwrap();
        let s = (&a + 1) * (&a + 1);
        assert_eq!(g(9, 1, &s).unwrap(), int("88255775491812351975604"));
        assert_eq!(g(9, 1, &s).unwrap(), a * 2);
        for (n, m, s, clause) in [
            (2, 1, 9, "parity"),
            (2, 1, 8, "squareness"),
            (3, 1, 1, "size"),
            (1, 1, 1, "n ≥ 2"),
        ] {
            match construct_qcor(n, &Integer::from(m), &Integer::from(s)) {
                Err(Error::HypothesisViolation { clause: c }) => assert!(c.starts_with(clause), "{c}"),
                other => panic!("expected violation, got {other:?}"),
            }
        }
    }

    #[test]
    fn suggest_examples() {
        assert_eq!(suggest_s(2, &0.into(), 3), [1, 9, 25].map(Integer::from));
        assert_eq!(suggest_s(2, &1.into(), 2), [4, 16].map(Integer::from));
        assert_eq!(suggest_s(3, &1.into(), 1), [Integer::from(9)]);
        let a = base_orbit(&1.into(), 8).pop().unwrap();
        assert_eq!(suggest_s(9, &1.into(), 1)[0], (&a + 1) * (a + 1));
    }

    #[test]
    fn deddom_examples() {
        assert!(check_deddom_reducibility(&QuadMapZ::from_i64(1, 0), 2, 5).unwrap());
        let f = construct_qcor(3, &1.into(), &9.into()).unwrap();
        for p in [3, 5, 7, 11, 13, 101] {
            assert!(check_deddom_reducibility(&f, 3, p).unwrap());
        }
        assert!(check_deddom_reducibility(&QuadMapZ::from_i64(0, -2), 1, 7).unwrap());
        assert!(!check_deddom_reducibility(&QuadMapZ::from_i64(0, -2), 1, 5).unwrap());
        assert!(check_deddom_reducibility(&QuadMapZ::from_i64(0, 1), 1, 9).is_err());
    }

    #[test]
    fn expanded_form_matches() {
        let f = QuadMapZ::from_i64(2, 1);
        assert_eq!(f.coefficients(), [7, -4, 1].map(Integer::from));
        assert_eq!(f.eval(&2.into()), f.critical_value());
    }
}
