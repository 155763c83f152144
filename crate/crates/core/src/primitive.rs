//! Primitive examples: stable maps with f̄ⁿ⁻¹ irreducible for some primes
//! and f̄ⁿ reducible for all of them, plus the witness-prime search.

use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    classes_to_vectors, f2_solve_affine, f2_solve_all_ones, factor, is_prime_u64,
    is_square_integer, legendre_u64, square_class, valuation, Coordinate, FactorBudget, Integer,
    PrimeSieve, Segment,
};
use crate::error::{Error, Result};
use crate::modpoly::{self, SpotCheck};
use crate::quadmap::{
    adjusted_residues, base_orbit, check_deddomstab, check_numfield_q, orbit, QuadMapZ,
    StabilityCertificate,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StarStatus {
    Witness {
        #[serde(with = "crate::serde_int")]
        r: Integer,
        multiplicity: u32,
    },
    Failed,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarEntry {
    pub i: u32,
    #[serde(flatten)]
    pub status: StarStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionStarResult {
    pub entries: Vec<StarEntry>,
}

impl ConditionStarResult {
    pub fn holds(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e.status, StarStatus::Witness { .. }))
    }
}

/// For each 1 ≤ i ≤ n − 1, the smallest odd prime dividing fⁱ(γ) to odd
/// multiplicity and dividing no earlier fᵏ(γ).
pub fn condition_star(f: &QuadMapZ, n: u32, budget: &FactorBudget) -> ConditionStarResult {
    let orb = orbit(f, n.saturating_sub(1));
    let values: Vec<Integer> = (1..n).map(|i| orb.value(i)).collect();
    let entries = values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let i = idx as u32 + 1;
            if v.is_zero() {
                return StarEntry { i, status: StarStatus::Failed };
            }
            let fac = factor(v, budget);
            let hit = fac.factors.iter().find(|(r, e)| {
                e % 2 == 1
                    && r.is_odd()
                    && values[..idx].iter().all(|w| !(w % r).is_zero())
            });
            let status = match hit {
                Some((r, e)) => StarStatus::Witness {
                    r: r.clone(),
                    multiplicity: *e,
                },
                None if fac.is_complete() => StarStatus::Failed,
                None => StarStatus::Unknown,
            };
            StarEntry { i, status }
        })
        .collect();
    ConditionStarResult { entries }
}

/// Recompute a witness entry from scratch by exact division.
pub fn verify_star_witness(f: &QuadMapZ, i: u32, r: &Integer) -> bool {
    let orb = orbit(f, i);
    r.is_odd()
        && valuation(&orb.value(i), r).is_some_and(|v| v % 2 == 1)
        && (1..i).all(|k| !(orb.value(k) % r).is_zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    Scan,
    Crt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSearch {
    pub strategy: Strategy,
    /// Maximum number of primes examined.
    pub cap: u64,
    /// Largest degree 2ᵏ validated directly by the polynomial oracle.
    pub oracle_cap: usize,
    pub budget: FactorBudget,
}

impl Default for WitnessSearch {
    fn default() -> Self {
        WitnessSearch {
            strategy: Strategy::Scan,
            cap: 100_000,
            oracle_cap: 1 << 10,
            budget: FactorBudget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPrime {
    pub p: u64,
    pub k: u32,
    pub strategy: Strategy,
    /// Primes examined before (and including) `p`.
    pub primes_tried: u64,
    /// For the CRT strategy, the progression `p ≡ residue mod modulus`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub progression: Option<(u64, u64)>,
    /// Every adjusted-sequence entry through k is a non-residue mod p.
    pub residue_chain: bool,
    /// Direct irreducibility of f̄ᵏ mod p; `None` above the oracle cap.
    pub oracle_irreducible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn chain_ok(f: &QuadMapZ, k: u32, p: u64) -> bool {
    p > 2
        && adjusted_residues(f, k, p)
            .into_iter()
            .all(|a| legendre_u64(a, p) == -1)
}

fn validate(f: &QuadMapZ, k: u32, mut w: WitnessPrime, oracle_cap: usize) -> Result<WitnessPrime> {
    w.residue_chain = chain_ok(f, k, w.p);
    if 1usize << k <= oracle_cap {
        let g = modpoly::iterate_mod(&modpoly::reduce(f, w.p)?, k, oracle_cap)?;
        w.oracle_irreducible = Some(g.is_irreducible());
    } else {
        w.note.get_or_insert_with(|| format!("degree 2^{k} above oracle cap, criterion only"));
    }
    if !w.residue_chain || w.oracle_irreducible == Some(false) {
        return Err(Error::InternalVerification(format!(
            "witness prime {} fails validation at level {k}",
            w.p
        )));
    }
    Ok(w)
}

const SCAN_WINDOW: u64 = 1 << 15;

fn scan(f: &QuadMapZ, k: u32, cap: u64) -> Option<(u64, u64)> {
    let mut tried = 0u64;
    let mut lo = 3u64;
    while tried < cap {
        let hi = lo + SCAN_WINDOW;
        let mut primes = PrimeSieve::new(hi).primes_in(Segment { lo, hi });
        primes.truncate((cap - tried).min(primes.len() as u64) as usize);
        if let Some(pos) = primes.par_iter().position_first(|&p| chain_ok(f, k, p)) {
            return Some((primes[pos], tried + pos as u64 + 1));
        }
        tried += primes.len() as u64;
        lo = hi;
    }
    None
}

/// Congruence class mod 8·∏ℓ whose primes p realize the prescribed
/// Legendre symbols of −1, 2 and each odd ℓ, via quadratic reciprocity.
/// `want[i]` is true when coordinate i must be a non-residue.
fn reciprocity_progression(coords: &[Coordinate], want: &[bool]) -> Option<(u64, u64)> {
    let mut p_mod4 = 1u64;
    let mut two_nr = None;
    for (c, &nr) in coords.iter().zip(want) {
        match c {
            Coordinate::MinusOne if nr => p_mod4 = 3,
            Coordinate::Prime(l) if *l == Integer::from(2) => two_nr = Some(nr),
            _ => {}
        }
    }
    // (2/p) = 1 iff p ≡ ±1 mod 8.
    let p_mod8 = match (p_mod4, two_nr) {
        (1, Some(true)) => 5,
        (1, _) => 1,
        (_, Some(true)) => 3,
        _ => 7,
    };
    let (mut a, mut modulus) = (p_mod8 as u128, 8u128);
    for (c, &nr) in coords.iter().zip(want) {
        let Coordinate::Prime(l) = c else { continue };
        let l = l.to_u64()?;
        if l == 2 {
            continue;
        }
        // (ℓ/p) = (p/ℓ) unless both are 3 mod 4.
        let flip = l % 4 == 3 && p_mod4 == 3;
        let target: i8 = if nr != flip { -1 } else { 1 };
        let r = (1..l).find(|&r| legendre_u64(r, l) == target)? as u128;
        // Solve a + modulus·t ≡ r mod ℓ.
        let l128 = l as u128;
        let inv = mod_inverse((modulus % l128) as u64, l)? as u128;
        let t = ((r + l128 - a % l128) % l128) * inv % l128;
        a += modulus * t;
        modulus = modulus.checked_mul(l128).filter(|&m| m < 1 << 62)?;
        a %= modulus;
    }
    Some((a as u64, modulus as u64))
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

/// The CRT route: `Some(Ok(..))` on success, `Some(Err(note))` when the
/// construction is impossible and SCAN should take over, and an error when
/// the residue targets are inconsistent (origin in the affine span).
fn crt_search(
    f: &QuadMapZ,
    k: u32,
    search: &WitnessSearch,
) -> Result<std::result::Result<(u64, u64, (u64, u64)), String>> {
    let entries = orbit(f, k).adjusted();
    if entries.iter().any(Zero::is_zero) {
        return Err(Error::NotFound("an adjusted entry is 0, a square everywhere".into()));
    }
    let classes = entries
        .iter()
        .map(|a| square_class(a, &search.budget))
        .collect::<Result<Vec<_>>>()?;
    let (rows, coords) = match classes_to_vectors(&classes) {
        Ok(v) => v,
        Err(Error::UncertainClass { index }) => {
            return Ok(Err(format!(
                "entry {} not fully factored; CRT unavailable",
                index + 1
            )))
        }
        Err(e) => return Err(e),
    };
    let Some(x) = f2_solve_all_ones(&rows) else {
        return Err(Error::NotFound(
            "origin lies in the affine span of the adjusted entries".into(),
        ));
    };
    let want: Vec<bool> = (0..coords.len()).map(|i| x.get(i)).collect();
    let Some((a, modulus)) = reciprocity_progression(&coords, &want) else {
        return Ok(Err("progression modulus exceeds 2^62".into()));
    };
    let mut tried = 0u64;
    let mut p = a;
    while tried < search.cap {
        if is_prime_u64(p) {
            tried += 1;
            if chain_ok(f, k, p) {
                return Ok(Ok((p, tried, (a, modulus))));
            }
        }
        p = match p.checked_add(modulus) {
            Some(q) if q < 1 << 62 => q,
            _ => break,
        };
    }
    Ok(Err(format!("no prime in progression {a} mod {modulus} within cap")))
}

/// A prime p for which f̄ᵏ is irreducible, validated by the residue chain
/// and, when 2ᵏ is within the oracle cap, by direct irreducibility testing.
pub fn find_witness_prime(f: &QuadMapZ, k: u32, search: &WitnessSearch) -> Result<WitnessPrime> {
    if k == 0 || k > 16 {
        return Err(Error::InvalidInput(format!("witness level k = {k} out of range")));
    }
    let mut note = None;
    if search.strategy == Strategy::Crt {
        match crt_search(f, k, search)? {
            Ok((p, tried, prog)) => {
                let w = WitnessPrime {
                    p,
                    k,
                    strategy: Strategy::Crt,
                    primes_tried: tried,
                    progression: Some(prog),
                    residue_chain: false,
                    oracle_irreducible: None,
                    note: None,
                };
                return validate(f, k, w, search.oracle_cap);
            }
            Err(why) => note = Some(format!("CRT fell back to SCAN: {why}")),
        }
    }
    match scan(f, k, search.cap) {
        Some((p, tried)) => {
            let w = WitnessPrime {
                p,
                k,
                strategy: Strategy::Scan,
                primes_tried: tried,
                progression: None,
                residue_chain: false,
                oracle_irreducible: None,
                note,
            };
            validate(f, k, w, search.oracle_cap)
        }
        None => {
            let mut why = format!("no witness among the first {} odd primes", search.cap);
            if let Some(obstruction) = affine_obstruction(f, k, &search.budget) {
                why.push_str(&format!("; {obstruction}"));
            }
            Err(Error::NotFound(why))
        }
    }
}

fn affine_obstruction(f: &QuadMapZ, k: u32, budget: &FactorBudget) -> Option<String> {
    let entries = orbit(f, k).adjusted();
    if let Some(i) = entries.iter().position(Zero::is_zero) {
        return Some(format!("entry {} is 0", i + 1));
    }
    let classes: Vec<_> = entries
        .iter()
        .map(|a| square_class(a, budget).ok())
        .collect::<Option<_>>()?;
    let (rows, _) = classes_to_vectors(&classes).ok()?;
    let sol = f2_solve_affine(&rows);
    sol.witness.map(|w| {
        let idx: Vec<String> = w.iter().map(|i| (i + 1).to_string()).collect();
        format!("entries {{{}}} multiply to a square", idx.join(", "))
    })
}

/// (m, q) for which q divides −f(γ) exactly once and no later fⁱ(γ).
pub fn reallast_parameters(n: u32) -> Result<(i64, u64)> {
    match n {
        0 | 1 => Err(Error::InvalidInput(format!("n = {n}: need n ≥ 2"))),
        2 => Ok((3, 5)),
        _ if n % 3 == 1 => Ok((4, 3)),
        _ => Ok((1, 3)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveExample {
    pub n: u32,
    pub m: i64,
    pub q: u64,
    pub map: QuadMapZ,
    /// fⁿ(γ) = (f₀ⁿ⁻¹(0) − 1)².
    #[serde(with = "crate::serde_int")]
    pub s: Integer,
    pub stability: StabilityCertificate,
    pub witness: Option<WitnessPrime>,
    pub spot_checks: Vec<SpotCheck>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimexOptions {
    /// `None` skips the witness search.
    pub witness: Option<WitnessSearch>,
    /// Odd primes up to this bound are spot-checked for reducibility of f̄ⁿ.
    pub spot_bound: u64,
    /// Largest degree handed to the polynomial oracle in spot checks.
    pub oracle_cap: usize,
}

impl Default for PrimexOptions {
    fn default() -> Self {
        PrimexOptions {
            witness: Some(WitnessSearch {
                strategy: Strategy::Crt,
                ..WitnessSearch::default()
            }),
            spot_bound: 500,
            oracle_cap: 256,
        }
    }
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InternalVerification(what()))
    }
}

/// γ = −2f₀ⁿ⁻¹(0) + 1 − m with (m, q) from [`reallast_parameters`]; every
/// property the construction promises is recomputed before returning.
pub fn construct_primex(n: u32, opts: &PrimexOptions) -> Result<PrimitiveExample> {
    let (m, q) = reallast_parameters(n)?;
    let mi = Integer::from(m);
    let base = base_orbit(&mi, n);
    let prev = &base[n as usize - 2];
    let gamma: Integer = -(prev * Integer::from(2)) + 1 - &mi;
    let f = QuadMapZ::new(gamma, mi);
    let orb = orbit(&f, n);
    let qi = Integer::from(q);

    check(valuation(&orb.value(1), &qi) == Some(1), || {
        format!("{q} does not divide -f(γ) exactly once")
    })?;
    for i in 2..=n {
        check(!(orb.value(i) % &qi).is_zero(), || format!("{q} divides f^{i}(γ)"))?;
    }
    for i in 2..n {
        check(orb.value(i).is_negative(), || format!("f^{i}(γ) is not negative"))?;
    }
    let s = (prev - 1) * (prev - 1);
    check(orb.value(n) == s && is_square_integer(&s), || {
        "f^n(γ) differs from (f₀^(n-1)(0) - 1)²".into()
    })?;
    let stability = check_numfield_q(&f);
    check(!stability.is_none() && stability.verify(&f), || {
        "stability certificate missing".into()
    })?;

    let mut notes = Vec::new();
    let witness = match &opts.witness {
        Some(search) => Some(find_witness_prime(&f, n - 1, search)?),
        None => {
            notes.push("witness search skipped".into());
            None
        }
    };
    let spot_checks = modpoly::reducibility_spot_checks(&f, n, opts.spot_bound, opts.oracle_cap)?;
    check(spot_checks.iter().all(SpotCheck::reducible), || {
        "a spot check found f̄ⁿ irreducible".into()
    })?;
    if spot_checks.iter().any(|c| c.oracle_reducible.is_none()) {
        notes.push(format!(
            "degree 2^{n} above oracle cap {}, spot checks use the criterion only",
            opts.oracle_cap
        ));
    }
    Ok(PrimitiveExample {
        n,
        m,
        q,
        map: f,
        s,
        stability,
        witness,
        spot_checks,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityCandidate {
    pub m: i64,
    #[serde(with = "crate::serde_int")]
    pub gamma: Integer,
    pub stability: StabilityCertificate,
}

/// All (m, γ) with |m| ≤ m_bound, γ = ±2f₀ⁿ⁻¹(0) + 1 − m and optionally
/// |γ| ≤ gamma_bound, keeping those with fⁿ(γ) a square and a stability
/// certificate. Sorted by |γ|, then m, then γ.
pub fn minimality_scan(
    n: u32,
    gamma_bound: Option<&Integer>,
    m_bound: i64,
    budget: &FactorBudget,
) -> Result<Vec<MinimalityCandidate>> {
    if n < 2 {
        return Err(Error::InvalidInput("n ≥ 2 required".into()));
    }
    let mut out = Vec::new();
    for m in -m_bound..=m_bound {
        // With m ∈ {−2, −1, 0} the critical orbit is finite.
        if (-2..=0).contains(&m) {
            continue;
        }
        let mi = Integer::from(m);
        let base = base_orbit(&mi, n);
        let a = &base[n as usize - 2];
        for sign in [1, -1] {
            let gamma: Integer = a * Integer::from(2 * sign) + 1 - &mi;
            if gamma_bound.is_some_and(|b| gamma.abs() > *b) {
                continue;
            }
            let f = QuadMapZ::new(gamma.clone(), mi.clone());
            if !is_square_integer(&(&base[n as usize - 1] + &gamma)) {
                continue;
            }
            let mut cert = check_numfield_q(&f);
            if cert.is_none() {
                cert = check_deddomstab(&f, budget);
            }
            if !cert.is_none() {
                out.push(MinimalityCandidate {
                    m,
                    gamma,
                    stability: cert,
                });
            }
        }
    }
    out.sort_by(|x, y| {
        (x.gamma.abs(), x.m, &x.gamma).cmp(&(y.gamma.abs(), y.m, &y.gamma))
    });
    Ok(out)
}

/// Frequency of f̄ᵏ irreducible over odd primes up to a bound, measured by
/// the polynomial oracle. Inseparable reductions are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensitySample {
    pub k: u32,
    pub bound: u64,
    pub primes: u64,
    pub excluded: u64,
    pub irreducible: u64,
}

impl DensitySample {
    pub fn frequency(&self) -> f64 {
        self.irreducible as f64 / self.primes as f64
    }

    /// Distance from `expected` in binomial standard deviations.
    pub fn sigmas_from(&self, expected: f64) -> f64 {
        let sd = (expected * (1.0 - expected) / self.primes as f64).sqrt();
        (self.frequency() - expected).abs() / sd
    }
}

pub fn irreducible_frequency(f: &QuadMapZ, k: u32, bound: u64, cap: usize) -> Result<DensitySample> {
    let primes: Vec<u64> = crate::arith::primes_up_to(bound).skip(1).collect();
    let types = primes
        .par_iter()
        .map(|&p| modpoly::frobenius_cycle_type(f, k, p, cap))
        .collect::<Result<Vec<_>>>()?;
    let excluded = types
        .iter()
        .filter(|t| matches!(t, modpoly::CycleType::Inseparable { .. }))
        .count() as u64;
    let irreducible = types
        .iter()
        .filter(|t| matches!(t, modpoly::CycleType::Separable { .. }) && t.is_full_cycle(k))
        .count() as u64;
    Ok(DensitySample {
        k,
        bound,
        primes: primes.len() as u64 - excluded,
        excluded,
        irreducible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> PrimexOptions {
        PrimexOptions {
            witness: None,
            spot_bound: 50,
            oracle_cap: 64,
        }
    }

    #[test]
    fn reallast_examples() {
        assert_eq!(reallast_parameters(2).unwrap(), (3, 5));
        assert_eq!(reallast_parameters(9).unwrap(), (1, 3));
        assert_eq!(reallast_parameters(7).unwrap(), (4, 3));
        assert!(reallast_parameters(1).is_err());
    }

    #[test]
    fn primex_small() {
        let e = construct_primex(2, &quick()).unwrap();
        assert_eq!((e.m, e.map.gamma.clone()), (3, Integer::from(-8)));
        assert_eq!(orbit(&e.map, 1).value(1), Integer::from(-5));
        for p in adjusted_residues(&e.map, 6, 5).into_iter().skip(1) {
            assert_eq!(p, 4);
        }
        let e = construct_primex(3, &quick()).unwrap();
        assert_eq!(e.map.gamma, Integer::from(-4));
        let e = construct_primex(7, &quick()).unwrap();
        assert_eq!(e.m, 4);
    }

    #[test]
    fn primex_n9_magnitude() {
        let e = construct_primex(9, &quick()).unwrap();
        assert_eq!(
            e.map.gamma.abs(),
            "88255775491812351975604".parse::<Integer>().unwrap()
        );
    }

    #[test]
    fn star_examples() {
        let b = FactorBudget::default();
        let f = QuadMapZ::from_i64(1, 0);
        let r = condition_star(&f, 3, &b);
        assert_eq!(r.entries[1].status, StarStatus::Failed);
        let f = QuadMapZ::from_i64(-8, 3);
        let r = condition_star(&f, 2, &b);
        assert_eq!(
            r.entries[0].status,
            StarStatus::Witness {
                r: 5.into(),
                multiplicity: 1
            }
        );
        assert!(verify_star_witness(&f, 1, &5.into()));
    }

    #[test]
    fn star_holds_for_the_n9_map() {
        let a = base_orbit(&1.into(), 8).pop().unwrap();
        let f = QuadMapZ::new(a * 2, 1.into());
        let r = condition_star(&f, 9, &FactorBudget::default());
        assert_eq!(r.entries.len(), 8);
        assert!(r.holds(), "{r:?}");
        for e in &r.entries {
            if let StarStatus::Witness { r, .. } = &e.status {
                assert!(verify_star_witness(&f, e.i, r));
            }
        }
    }

    #[test]
    fn witness_examples() {
        let s = WitnessSearch::default();
        let w = find_witness_prime(&QuadMapZ::from_i64(1, 0), 1, &s).unwrap();
        assert_eq!(w.p, 3);
        let f = QuadMapZ::from_i64(0, 1);
        let scan = find_witness_prime(&f, 4, &s).unwrap();
        let crt = find_witness_prime(
            &f,
            4,
            &WitnessSearch {
                strategy: Strategy::Crt,
                ..s
            },
        )
        .unwrap();
        for w in [&scan, &crt] {
            assert!(w.residue_chain && w.oracle_irreducible == Some(true));
        }
        assert_eq!(crt.strategy, Strategy::Crt);
        // f = (x+1)² − 2 is reducible mod every prime at level 3.
        let err = find_witness_prime(
            &QuadMapZ::from_i64(-1, -1),
            3,
            &WitnessSearch { cap: 500, ..s },
        )
        .unwrap_err();
        assert!(err.to_string().contains("square"), "{err}");
    }

    #[test]
    fn minimality_examples() {
        let b = FactorBudget::default();
        let c = minimality_scan(2, None, 5, &b).unwrap();
        assert!(c.iter().any(|c| c.m == 3 && c.gamma == Integer::from(-8)));
        assert!(c.iter().all(|c| !(-2..=0).contains(&c.m)));
        let c = minimality_scan(9, None, 5, &b).unwrap();
        assert_eq!(c[0].m, 1);
        assert_eq!(
            c[0].gamma.abs(),
            "88255775491812351975604".parse::<Integer>().unwrap()
        );
    }

    #[test]
    fn progression_realizes_targets() {
        let coords = vec![
            Coordinate::MinusOne,
            Coordinate::Prime(2.into()),
            Coordinate::Prime(3.into()),
            Coordinate::Prime(7.into()),
        ];
        for mask in 0u32..16 {
            let want: Vec<bool> = (0..4).map(|i| mask >> i & 1 == 1).collect();
            let (a, m) = reciprocity_progression(&coords, &want).unwrap();
            let p = (0..).map(|j| a + j * m).find(|&p| is_prime_u64(p)).unwrap();
            for (c, &nr) in coords.iter().zip(&want) {
                let v = match c {
                    Coordinate::MinusOne => p - 1,
                    Coordinate::Prime(l) => l.to_u64().unwrap(),
                };
                assert_eq!(legendre_u64(v % p, p) == -1, nr, "p = {p}, mask {mask}");
            }
        }
    }

    #[test]
    fn density_sample_counts() {
        let d = irreducible_frequency(&QuadMapZ::from_i64(0, -2), 1, 1000, 64).unwrap();
        assert_eq!(d.primes + d.excluded, 167);
        assert!(d.sigmas_from(0.5) < 3.0);
    }
}
