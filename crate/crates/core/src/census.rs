//! Prime censuses: critical orbits mod p, stability at p, the depth-20
//! prefix scan over all primes up to a bound, and the square-class span of
//! the adjusted sequence that predicts how often stability should occur.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::Sign;
use num_integer::Roots;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    classes_to_vectors, f2_solve_affine, jacobi_u64, mod_u64, square_class, FactorBudget,
    Integer, PrimeSieve, Segment,
};
use crate::error::{Error, Result};
use crate::quadmap::{adjusted_sequence, base_orbit, QuadMapZ};

pub const DEFAULT_PREFIX_DEPTH: u32 = 20;
pub const DEFAULT_KILL_DEPTH: u32 = 25;
pub const DEFAULT_SPAN_DEPTH: u32 = 6;
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;

/// Below this modulus cycle detection indexes every residue directly.
const DIRECT_INDEX_LIMIT: u64 = 1 << 22;

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// f reduced mod n, stepping residues.
#[derive(Debug, Clone, Copy)]
struct ReducedMap {
    n: u64,
    gamma: u64,
    c: u64,
}

impl ReducedMap {
    fn new(f: &QuadMapZ, n: u64) -> Self {
        ReducedMap {
            n,
            gamma: mod_u64(&f.gamma, n),
            c: mod_u64(&(&f.gamma + &f.m), n),
        }
    }

    #[inline]
    fn step(&self, a: u64) -> u64 {
        let d = if a >= self.gamma { a - self.gamma } else { a + self.n - self.gamma };
        let s = mul_mod(d, d, self.n);
        ((s as u128 + self.c as u128) % self.n as u128) as u64
    }
}

/// Orbit of γ̄ under f̄ on ℤ/n: `values[i] = f̄ⁱ(γ̄)` for i < r, where r is
/// minimal with f̄ʳ(γ̄) = f̄ˢ(γ̄) for some s < r.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitModP {
    pub p: u64,
    pub values: Vec<u64>,
    pub tail: usize,
    pub cycle: usize,
}

impl OrbitModP {
    /// r = tail + cycle.
    pub fn r(&self) -> usize {
        self.tail + self.cycle
    }

    /// f̄ⁱ(γ̄) for any i ≥ 0.
    pub fn at(&self, i: usize) -> u64 {
        if i < self.values.len() {
            self.values[i]
        } else {
            self.values[self.tail + (i - self.tail) % self.cycle]
        }
    }
}

/// Works for any modulus n ≥ 2, prime or not.
pub fn orbit_mod_p(f: &QuadMapZ, n: u64) -> OrbitModP {
    assert!(n >= 2, "modulus must be at least 2");
    let g = ReducedMap::new(f, n);
    if n <= DIRECT_INDEX_LIMIT {
        let mut seen = vec![u32::MAX; n as usize];
        let mut values = Vec::new();
        let mut a = g.gamma;
        while seen[a as usize] == u32::MAX {
            seen[a as usize] = values.len() as u32;
            values.push(a);
            a = g.step(a);
        }
        let tail = seen[a as usize] as usize;
        let cycle = values.len() - tail;
        return OrbitModP { p: n, values, tail, cycle };
    }
    // Brent: cycle length first, then the tail by a lagged walk.
    let (mut power, mut lam) = (1usize, 1usize);
    let mut tortoise = g.gamma;
    let mut hare = g.step(g.gamma);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = g.step(hare);
        lam += 1;
    }
    let mut hare = g.gamma;
    for _ in 0..lam {
        hare = g.step(hare);
    }
    let mut tortoise = g.gamma;
    let mut mu = 0;
    while tortoise != hare {
        tortoise = g.step(tortoise);
        hare = g.step(hare);
        mu += 1;
    }
    let mut values = Vec::with_capacity(mu + lam);
    let mut a = g.gamma;
    for _ in 0..mu + lam {
        values.push(a);
        a = g.step(a);
    }
    OrbitModP { p: n, values, tail: mu, cycle: lam }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub p: u64,
    pub stable: bool,
    /// Least i with −f(γ̄) (i = 1) or f̄ⁱ(γ̄) (i ≥ 2) a square mod p, 0
    /// counting as a square.
    pub failing_index: Option<u32>,
    pub tail: usize,
    pub cycle: usize,
}

/// Every level is covered once i runs through 2..=r+1: for i ≥ s the
/// values repeat with period r − s, and the window has length r ≥ r − s.
pub fn is_stable_mod_p(f: &QuadMapZ, p: u64) -> Result<StabilityVerdict> {
    if p == 2 || !crate::arith::is_prime_u64(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    let orbit = orbit_mod_p(f, p);
    let square = |a: u64| jacobi_u64(a, p) != -1;
    let failing_index = if square((p - orbit.at(1)) % p) {
        Some(1)
    } else {
        (2..=orbit.r() + 1)
            .find(|&i| square(orbit.at(i)))
            .map(|i| i as u32)
    };
    Ok(StabilityVerdict {
        p,
        stable: failing_index.is_none(),
        failing_index,
        tail: orbit.tail,
        cycle: orbit.cycle,
    })
}

/// First index ≤ depth at which the adjusted sequence is a square mod p.
fn prefix_kill(g: &ReducedMap, depth: u32) -> Option<u32> {
    let p = g.n;
    let mut a = g.gamma;
    for i in 1..=depth {
        a = g.step(a);
        let v = if i == 1 { (p - a) % p } else { a };
        if jacobi_u64(v, p) != -1 {
            return Some(i);
        }
    }
    None
}

/// A prime whose first `prefix_depth` adjusted entries are all non-squares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub p: u64,
    /// Least failing index from the full orbit, `None` if p is stable.
    pub kill_depth: Option<u32>,
    pub stable: bool,
    pub tail: usize,
    pub cycle: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentReport {
    #[serde(with = "crate::serde_int")]
    pub gamma: Integer,
    #[serde(with = "crate::serde_int")]
    pub m: Integer,
    pub prefix_depth: u32,
    pub segment: Segment,
    pub primes: u64,
    pub candidates: Vec<Candidate>,
    /// `kill_histogram[i−1]` counts primes first failing at index i.
    pub kill_histogram: Vec<u64>,
}

fn scan_segment(f: &QuadMapZ, sieve: &PrimeSieve, seg: Segment, prefix_depth: u32) -> Result<SegmentReport> {
    let mut primes = 0;
    let mut candidates = Vec::new();
    let mut kill_histogram = vec![0; prefix_depth as usize];
    let mut err = None;
    sieve.for_each_in(seg, |p| {
        if p == 2 || err.is_some() {
            return;
        }
        primes += 1;
        match prefix_kill(&ReducedMap::new(f, p), prefix_depth) {
            Some(i) => kill_histogram[i as usize - 1] += 1,
            None => match is_stable_mod_p(f, p) {
                Ok(v) => candidates.push(Candidate {
                    p,
                    kill_depth: v.failing_index,
                    stable: v.stable,
                    tail: v.tail,
                    cycle: v.cycle,
                }),
                Err(e) => err = Some(e),
            },
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(SegmentReport {
        gamma: f.gamma.clone(),
        m: f.m.clone(),
        prefix_depth,
        segment: seg,
        primes,
        candidates,
        kill_histogram,
    })
}

#[derive(Debug, Clone)]
pub struct CensusOptions {
    pub bound: u64,
    pub workers: usize,
    pub prefix_depth: u32,
    pub kill_depth: u32,
    pub span_depth: u32,
    pub segment_size: u64,
    pub checkpoint_dir: Option<PathBuf>,
    pub budget: FactorBudget,
}

impl CensusOptions {
    pub fn new(bound: u64) -> Self {
        CensusOptions {
            bound,
            workers: 1,
            prefix_depth: DEFAULT_PREFIX_DEPTH,
            kill_depth: DEFAULT_KILL_DEPTH,
            span_depth: DEFAULT_SPAN_DEPTH,
            segment_size: DEFAULT_SEGMENT_SIZE,
            checkpoint_dir: None,
            budget: FactorBudget::default(),
        }
    }
}

/// Counters only; wall-clock time would break byte-identical reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub primes_scanned: u64,
    pub segments: u64,
    pub segment_size: u64,
    pub kill_histogram: Vec<u64>,
    /// Candidates not resolved by `kill_depth`, stable ones included.
    pub survivors_past_kill_depth: Vec<u64>,
    pub excluded: Vec<u64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub f: QuadMapZ,
    pub bound: u64,
    pub prefix_depth: u32,
    pub kill_depth: u32,
    pub stable_primes: Vec<u64>,
    pub candidates: Vec<Candidate>,
    pub span: SpanReport,
    pub runtime_stats: RuntimeStats,
}

impl CensusReport {
    pub fn stable_density(&self) -> f64 {
        self.stable_primes.len() as f64 / self.runtime_stats.primes_scanned as f64
    }
}

fn checkpoint_path(dir: &Path, seg: Segment) -> PathBuf {
    dir.join(format!("segment-{:013}-{:013}.json", seg.lo, seg.hi))
}

fn load_checkpoint(path: &Path, f: &QuadMapZ, prefix_depth: u32, seg: Segment) -> Result<Option<SegmentReport>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::InvalidInput(format!("{}: {e}", path.display()))),
    };
    let r: SegmentReport = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    if r.gamma != f.gamma || r.m != f.m || r.prefix_depth != prefix_depth || r.segment != seg {
        return Err(Error::InvalidInput(format!(
            "{} was written by a different census",
            path.display()
        )));
    }
    Ok(Some(r))
}

fn store_checkpoint(path: &Path, r: &SegmentReport) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("{}: {e}", path.display()));
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec(r).expect("segment report serializes")).map_err(io)?;
    // rename is atomic, so an interrupted scan never leaves a torn segment
    fs::rename(&tmp, path).map_err(io)
}

fn run_segment(f: &QuadMapZ, sieve: &PrimeSieve, seg: Segment, opts: &CensusOptions) -> Result<SegmentReport> {
    let path = opts.checkpoint_dir.as_deref().map(|d| checkpoint_path(d, seg));
    if let Some(path) = &path {
        if let Some(r) = load_checkpoint(path, f, opts.prefix_depth, seg)? {
            return Ok(r);
        }
    }
    let r = scan_segment(f, sieve, seg, opts.prefix_depth)?;
    if let Some(path) = &path {
        store_checkpoint(path, &r)?;
    }
    Ok(r)
}

/// Number of segment checkpoints already on disk for this census.
pub fn resumable_segments(opts: &CensusOptions) -> usize {
    let Some(dir) = &opts.checkpoint_dir else { return 0 };
    PrimeSieve::new(opts.bound)
        .segments(opts.segment_size)
        .into_iter()
        .filter(|&s| checkpoint_path(dir, s).exists())
        .count()
}

pub fn census_scan(f: &QuadMapZ, opts: &CensusOptions) -> Result<CensusReport> {
    if opts.bound < 3 {
        return Err(Error::InvalidInput("census bound must be at least 3".into()));
    }
    if opts.prefix_depth == 0 || opts.segment_size < 2 || opts.workers == 0 {
        return Err(Error::InvalidInput("census depths, segment size and workers must be positive".into()));
    }
    if let Some(dir) = &opts.checkpoint_dir {
        fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
    }
    let sieve = PrimeSieve::new(opts.bound);
    let segments = sieve.segments(opts.segment_size);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    // collect keeps segment order, so the merge is the same for any pool
    let parts = pool.install(|| {
        segments
            .par_iter()
            .map(|&seg| run_segment(f, &sieve, seg, opts))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut kill_histogram = vec![0; opts.prefix_depth as usize];
    let mut candidates = Vec::new();
    let mut primes_scanned = 0;
    for part in parts {
        primes_scanned += part.primes;
        for (h, k) in kill_histogram.iter_mut().zip(&part.kill_histogram) {
            *h += k;
        }
        candidates.extend(part.candidates);
    }
    candidates.sort_by_key(|c| c.p);
    let stable_primes = candidates.iter().filter(|c| c.stable).map(|c| c.p).collect();
    let survivors_past_kill_depth = candidates
        .iter()
        .filter(|c| c.kill_depth.map_or(true, |k| k > opts.kill_depth))
        .map(|c| c.p)
        .collect();
    Ok(CensusReport {
        f: f.clone(),
        bound: opts.bound,
        prefix_depth: opts.prefix_depth,
        kill_depth: opts.kill_depth,
        stable_primes,
        candidates,
        span: span_analysis(f, opts.span_depth, &opts.budget)?,
        runtime_stats: RuntimeStats {
            primes_scanned,
            segments: segments.len() as u64,
            segment_size: opts.segment_size,
            kill_histogram,
            survivors_past_kill_depth,
            excluded: vec![2],
            note: "p = 2 is excluded: f̄ is never stable in characteristic 2".into(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanReport {
    /// Number of leading entries of the adjusted sequence analysed.
    pub k: u32,
    /// True unless the critical orbit is periodic within the first k
    /// terms, in which case the prefix already is all of S.
    pub prefix_based: bool,
    /// 1-based index of an entry equal to 0.
    pub zero_index: Option<u32>,
    pub rank: usize,
    pub affine_span_size: Option<u64>,
    pub origin_in_affine_span: bool,
    /// Entries of an odd-size subset whose product is a square.
    #[serde(with = "crate::serde_int::vec")]
    pub witness: Vec<Integer>,
    /// 2^(−rank) when the origin is not in the affine span, 0 when it is.
    /// For prefix-based reports this is an upper bound.
    pub predicted_density: f64,
    pub unknown_cofactor_indices: Vec<u32>,
}

fn orbit_is_periodic(m: &Integer, k: u32) -> bool {
    let base = base_orbit(m, k);
    let mut seen = vec![Integer::zero()];
    for b in base {
        if seen.contains(&b) {
            return true;
        }
        seen.push(b);
    }
    false
}

pub fn span_analysis(f: &QuadMapZ, k: u32, budget: &FactorBudget) -> Result<SpanReport> {
    if k == 0 {
        return Err(Error::InvalidInput("span_analysis needs k ≥ 1".into()));
    }
    let s = adjusted_sequence(f, k);
    let prefix_based = !orbit_is_periodic(&f.m, k);
    if let Some(i) = s.iter().position(|x| x.is_zero()) {
        return Ok(SpanReport {
            k,
            prefix_based,
            zero_index: Some(i as u32 + 1),
            rank: 0,
            affine_span_size: None,
            origin_in_affine_span: true,
            witness: vec![Integer::zero()],
            predicted_density: 0.0,
            unknown_cofactor_indices: Vec::new(),
        });
    }
    let mut kept = Vec::new();
    let mut classes = Vec::new();
    let mut unknown = Vec::new();
    for (i, x) in s.iter().enumerate() {
        let c = square_class(x, budget)?;
        if c.cofactor_known {
            kept.push(x.clone());
            classes.push(c);
        } else {
            unknown.push(i as u32 + 1);
        }
    }
    let (vectors, _) = classes_to_vectors(&classes)?;
    let sol = f2_solve_affine(&vectors);
    let affine_log2 = if sol.origin_in_affine_span { sol.rank } else { sol.rank.saturating_sub(1) };
    Ok(SpanReport {
        k,
        prefix_based,
        zero_index: None,
        rank: sol.rank,
        affine_span_size: (affine_log2 < 64).then(|| 1u64 << affine_log2),
        origin_in_affine_span: sol.origin_in_affine_span,
        witness: sol
            .witness
            .unwrap_or_default()
            .into_iter()
            .map(|i| kept[i].clone())
            .collect(),
        predicted_density: if sol.origin_in_affine_span {
            0.0
        } else {
            0.5f64.powi(sol.rank as i32)
        },
        unknown_cofactor_indices: unknown,
    })
}

/// Tail data for x² + 1 at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailCheck {
    pub p: u64,
    pub stable: bool,
    pub tail: usize,
    /// f̄^(r−1)(0), the value just before the orbit closes up.
    pub pre_cycle_value: u64,
    /// Stable primes must have tail 2 and pre-cycle value −1.
    pub holds: bool,
}

pub fn tail_length_property(candidates: &[u64]) -> Result<Vec<TailCheck>> {
    let f = QuadMapZ::from_i64(0, 1);
    candidates
        .iter()
        .map(|&p| {
            let v = is_stable_mod_p(&f, p)?;
            let orbit = orbit_mod_p(&f, p);
            let pre_cycle_value = orbit.at(orbit.r() - 1);
            Ok(TailCheck {
                p,
                stable: v.stable,
                tail: orbit.tail,
                pre_cycle_value,
                holds: !v.stable || (orbit.tail == 2 && pre_cycle_value == p - 1),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrescreenHit {
    pub p: u64,
    /// Least n with fⁿ(0) ≡ −1 mod p.
    pub n: u32,
}

/// Primes p ≤ bound dividing some gⁿ(1) = fⁿ(0) + 1 with n ≤ depth, for
/// f = x² + 1 and g = (x − 1)² + 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrescreenReport {
    pub bound: u64,
    pub depth: u32,
    pub hits: Vec<PrescreenHit>,
    /// Hits with p ≡ 3 mod 4, the only ones where −1 is a non-square.
    pub three_mod_four: Vec<PrescreenHit>,
}

pub fn prescreen_g_orbit(bound: u64, depth: u32) -> PrescreenReport {
    let hits: Vec<PrescreenHit> = crate::arith::primes_up_to(bound)
        .skip(1)
        .filter_map(|p| {
            let mut a = 0u64;
            for n in 1..=depth {
                a = (mul_mod(a, a, p) + 1) % p;
                if a == p - 1 {
                    return Some(PrescreenHit { p, n });
                }
            }
            None
        })
        .collect();
    let three_mod_four = hits.iter().filter(|h| h.p % 4 == 3).cloned().collect();
    PrescreenReport {
        bound,
        depth,
        hits,
        three_mod_four,
    }
}

/// Σ_{p ≤ B} 2^(−√p) to `digits` decimal places, with a bound on the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicReport {
    pub bound: u64,
    pub primes: u64,
    pub digits: u32,
    /// Decimal expansion, truncated.
    pub partial_sum: String,
    /// Σ_{i ≥ I} (2i + 1)/2^i = (2I + 3)/2^(I−1) with I = ⌊√(B + 1)⌋,
    /// which dominates Σ_{n > B} 2^(−√n).
    pub tail_bound: String,
}

impl HeuristicReport {
    pub fn partial_sum_f64(&self) -> f64 {
        self.partial_sum.parse().expect("decimal")
    }

    pub fn tail_bound_f64(&self) -> f64 {
        self.tail_bound.parse().expect("decimal")
    }
}

/// Fixed-point arithmetic at scale 10^digits.
struct Fixed {
    scale: Integer,
    ln2: Integer,
}

impl Fixed {
    fn new(digits: u32) -> Self {
        let scale = Integer::from(10).pow(digits);
        // ln 2 = Σ_{k ≥ 1} 1/(k·2^k)
        let mut ln2 = Integer::zero();
        let mut k = 1u32;
        loop {
            let term = &scale / (Integer::from(k) << k);
            if term.is_zero() {
                break;
            }
            ln2 += term;
            k += 1;
        }
        Fixed { scale, ln2 }
    }

    /// 2^(−x) for 0 ≤ x < 1 given at scale, via exp(−x·ln 2).
    fn exp2_neg_frac(&self, x: &Integer) -> Integer {
        let y = x * &self.ln2 / &self.scale;
        let mut term = self.scale.clone();
        let mut sum = self.scale.clone();
        let mut k = 1u32;
        while !term.is_zero() {
            term = -(term * &y) / (&self.scale * k);
            sum += &term;
            k += 1;
        }
        sum
    }

    /// 2^(−√p) at scale.
    fn exp2_neg_sqrt(&self, p: u64) -> Integer {
        let root = (Integer::from(p) * &self.scale * &self.scale).sqrt();
        let whole = &root / &self.scale;
        let frac = &root - &whole * &self.scale;
        let shift: usize = whole.try_into().expect("√p fits a shift");
        self.exp2_neg_frac(&frac) >> shift
    }

    fn to_decimal(&self, x: &Integer, digits: u32) -> String {
        let (whole, frac) = (x / &self.scale, x % &self.scale);
        format!("{whole}.{:0>width$}", frac.to_string(), width = digits as usize)
    }
}

pub fn heuristic_sum(bound: u64, digits: u32) -> Result<HeuristicReport> {
    if bound < 2 {
        return Err(Error::InvalidInput("heuristic bound must be at least 2".into()));
    }
    const GUARD: u32 = 12;
    let fx = Fixed::new(digits + GUARD);
    let primes: Vec<u64> = crate::arith::primes_up_to(bound).collect();
    let sum: Integer = primes.par_iter().map(|&p| fx.exp2_neg_sqrt(p)).sum();
    let sum = sum / Integer::from(10).pow(GUARD);
    let out = Fixed {
        scale: Integer::from(10).pow(digits),
        ln2: Integer::zero(),
    };
    let i = (bound + 1).sqrt();
    let num = Integer::from(2 * i + 3) * &out.scale;
    // round the bound up so it stays a bound
    let den = Integer::one() << (i as usize - 1);
    let tail = (&num + &den - 1u32) / &den;
    debug_assert!(sum.sign() != Sign::Minus);
    Ok(HeuristicReport {
        bound,
        primes: primes.len() as u64,
        digits,
        partial_sum: out.to_decimal(&sum, digits),
        tail_bound: out.to_decimal(&tail, digits),
    })
}

/// Measured orbit data for a sample of primes, reported without claims.
pub fn orbit_lengths(f: &QuadMapZ, primes: &[u64]) -> HashMap<u64, (usize, usize)> {
    primes
        .iter()
        .map(|&p| {
            let o = orbit_mod_p(f, p);
            (p, (o.tail, o.cycle))
        })
        .collect()
}
