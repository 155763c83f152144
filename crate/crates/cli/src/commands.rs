//! One function per subcommand. Each returns the human table, the JSON
//! report and whether everything it set out to check was certified.

use std::time::Instant;

use anyhow::{anyhow, bail};
use quadstab::arith::{is_square_integer, primes_up_to, Integer};
use quadstab::census::{self, CensusOptions};
use quadstab::field::FqField;
use quadstab::funcfield::{
    check_altfund_fq, construct_n2_remedy, construct_ratffcor, specialization_sweep, FieldId,
    FqPoly, FqRat, ProductFormula, QuadMapFq, SpecializationSweep, ValuationCertificate,
};
use quadstab::modpoly::{self, CycleType, SpotCheck};
use quadstab::poly::Poly;
use quadstab::primitive::{self, PrimexOptions, Strategy, WitnessSearch};
use quadstab::quadmap::{
    adjusted_sequence, check_altfund, check_deddom_reducibility, check_deddomstab, check_fund,
    check_numfield_q, construct_qcor, suggest_s, Criterion, QuadMapZ, StabilityCertificate,
};
use quadstab::Error;
use serde::Serialize;

use crate::report::{envelope_json, format_fqrat, format_quadratic, table};
use crate::{
    CensusArgs, Command, Config, ConstructFq, ConstructQ, ConstructTarget, HeuristicArgs,
    PrimitiveArgs, StrategyArg, VerifyArgs,
};

pub struct Output {
    pub table: String,
    pub json: String,
    pub certified: bool,
}

pub fn dispatch(cmd: &Command, cfg: &Config) -> anyhow::Result<Output> {
    match cmd {
        Command::Construct { target: ConstructTarget::Q(a) } => construct_q(a, cfg),
        Command::Construct { target: ConstructTarget::Fq(a) } => construct_fq(a, cfg),
        Command::Primitive(a) => primitive(a, cfg),
        Command::Census(a) => census(a, cfg),
        Command::Heuristic(a) => heuristic(a, cfg),
        Command::Verify(a) => verify(a, cfg),
    }
}

/// Per-level outcome of the two rational criteria.
#[derive(Debug, Serialize)]
pub struct LevelCheck {
    pub n: u32,
    pub fund: Criterion,
    pub altfund: Criterion,
}

fn levels(f: &QuadMapZ, n: u32) -> Vec<LevelCheck> {
    (1..=n)
        .map(|i| LevelCheck {
            n: i,
            fund: check_fund(f, i),
            altfund: check_altfund(f, i),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct QCertificates {
    pub numfield_q: StabilityCertificate,
    pub deddomstab: StabilityCertificate,
    pub top_is_square: bool,
    pub levels: Vec<LevelCheck>,
}

#[derive(Debug, Serialize)]
pub struct ConstructionReport {
    pub n: u32,
    #[serde(with = "quadstab::serde_int")]
    pub m: Integer,
    #[serde(with = "quadstab::serde_int")]
    pub s: Integer,
    #[serde(with = "quadstab::serde_int")]
    pub gamma: Integer,
    /// Coefficients of f in x, ascending.
    #[serde(with = "quadstab::serde_int::vec")]
    pub coefficients: Vec<Integer>,
    pub certificates: QCertificates,
    #[serde(with = "quadstab::serde_int::vec")]
    pub adjusted_sequence: Vec<Integer>,
    pub deddom_check_sample: Vec<SpotCheck>,
}

fn check_depth(n: u32, cfg: &Config) -> anyhow::Result<()> {
    if n > cfg.orbit_depth_cap {
        return Err(Error::InvalidInput(format!(
            "n = {n} exceeds orbit_depth_cap = {}",
            cfg.orbit_depth_cap
        ))
        .into());
    }
    Ok(())
}

fn oracle_cap(cfg: &Config) -> usize {
    cfg.degree_cap.min(256)
}

pub fn construct_q(a: &ConstructQ, cfg: &Config) -> anyhow::Result<Output> {
    check_depth(a.n, cfg)?;
    let s = match (&a.s, a.auto_s) {
        (Some(s), _) => s.clone(),
        (None, _) => suggest_s(a.n, &a.m, 1).pop().ok_or_else(|| Error::HypothesisViolation {
            clause: format!("n ≥ 2 (got n = {})", a.n),
        })?,
    };
    let f = construct_qcor(a.n, &a.m, &s)?;
    let seq = adjusted_sequence(&f, a.n);
    let certificates = QCertificates {
        numfield_q: check_numfield_q(&f),
        deddomstab: check_deddomstab(&f, &cfg.factor),
        top_is_square: is_square_integer(&seq[a.n as usize - 1]),
        levels: levels(&f, a.n),
    };
    let stable = [&certificates.numfield_q, &certificates.deddomstab]
        .iter()
        .any(|c| !c.is_none() && c.verify(&f));
    let sample = modpoly::reducibility_spot_checks(&f, a.n, a.spot_bound, oracle_cap(cfg))?;
    if !stable {
        return Err(Error::InternalVerification("no stability certificate for the constructed map".into()).into());
    }
    if !certificates.top_is_square {
        return Err(Error::InternalVerification("f^n(γ) is not a square".into()).into());
    }
    if let Some(c) = sample.iter().find(|c| !c.reducible() || !c.agrees()) {
        return Err(Error::InternalVerification(format!("spot check failed at p = {}", c.p)).into());
    }
    let report = ConstructionReport {
        n: a.n,
        m: a.m.clone(),
        s: s.clone(),
        gamma: f.gamma.clone(),
        coefficients: f.coefficients().to_vec(),
        certificates,
        adjusted_sequence: seq,
        deddom_check_sample: sample,
    };
    let [c0, c1, _] = f.coefficients();
    let t = table(&[
        ("map", format!("f(x) = x² + ({c1})x + {c0}")),
        ("n", a.n.to_string()),
        ("m", a.m.to_string()),
        ("s", s.to_string()),
        ("gamma", f.gamma.to_string()),
        ("stability", cert_name(&report.certificates.numfield_q, &report.certificates.deddomstab)),
        ("f^n(gamma)", "square".into()),
        (
            "spot checks",
            format!("f̄^{} reducible at all {} odd primes ≤ {}", a.n, report.deddom_check_sample.len(), a.spot_bound),
        ),
        ("status", "CERTIFIED".into()),
    ]);
    Ok(Output {
        table: t,
        json: envelope_json("construct q", cfg.seed, &report),
        certified: true,
    })
}

fn cert_name(a: &StabilityCertificate, b: &StabilityCertificate) -> String {
    let mut names = Vec::new();
    if !a.is_none() {
        names.push("NUMFIELD_Q");
    }
    if !b.is_none() {
        names.push("DEDDOM_STAB");
    }
    if names.is_empty() {
        "none".into()
    } else {
        names.join(", ")
    }
}

fn parse_elem(field: &FqField, s: &str) -> anyhow::Result<Vec<u64>> {
    let p = field.p() as i64;
    let coords = s
        .split(':')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map(|v| v.rem_euclid(p) as u64)
                .map_err(|e| anyhow!("bad coefficient {c:?}: {e}"))
        })
        .collect::<anyhow::Result<Vec<u64>>>()?;
    Ok(field.from_coords(&coords)?)
}

fn parse_fqpoly(field: &FqField, s: &str) -> anyhow::Result<FqPoly> {
    let coeffs = s
        .split(',')
        .map(|c| parse_elem(field, c))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Poly::from_coeffs(field.clone(), coeffs))
}

#[derive(Debug, Serialize)]
pub struct AltfundLevel {
    pub i: u32,
    pub criterion: Criterion,
}

#[derive(Debug, Serialize)]
pub struct FqConstructionReport {
    pub field: FieldId,
    pub n: u32,
    pub map: QuadMapFq,
    pub coefficients: [FqRat; 3],
    pub polynomial: String,
    pub r: Option<Vec<u64>>,
    pub finite_certificate: Option<ValuationCertificate>,
    pub infinite_certificate: Option<ValuationCertificate>,
    pub product_formula: Option<ProductFormula>,
    /// Status for i ≤ n + 2; only i ≤ n is covered by a theorem.
    pub altfund_levels: Vec<AltfundLevel>,
    pub sweeps: Vec<SpecializationSweep>,
}

pub fn construct_fq(a: &ConstructFq, cfg: &Config) -> anyhow::Result<Output> {
    check_depth(a.n, cfg)?;
    if a.p == 2 {
        return Err(Error::HypothesisViolation { clause: "odd characteristic".into() }.into());
    }
    let field = FqField::new(a.p, a.k)?;
    let num = parse_fqpoly(&field, &a.m)?;
    let den = match &a.den {
        Some(d) => parse_fqpoly(&field, d)?,
        None => Poly::one(field.clone()),
    };
    let m = FqRat::new(num, den)?;
    let (map, r, finite, infinite, pf) = match a.n {
        2 => {
            let r = a.r.as_deref().ok_or_else(|| Error::HypothesisViolation {
                clause: "n = 2 needs --r with r/2 a non-residue".into(),
            })?;
            let r = parse_elem(&field, r)?;
            let map = construct_n2_remedy(&m, &r)?;
            (map, Some(r), None, None, None)
        }
        n => {
            let c = construct_ratffcor(n, &m)?;
            (
                c.map,
                None,
                Some(c.finite_certificate),
                Some(c.infinite_certificate),
                Some(c.product_formula),
            )
        }
    };
    let cap = cfg.degree_cap;
    if a.n >= usize::BITS || 1usize << a.n > cap {
        return Err(Error::DegreeCap { degree: 1usize.checked_shl(a.n).unwrap_or(usize::MAX), cap }.into());
    }
    let max_j = a.sweep_j.unwrap_or_else(|| {
        (1..=4u32)
            .take_while(|&j| (a.p as u128).pow(j) <= 10_000)
            .last()
            .unwrap_or(1)
    });
    let sweeps = (1..=max_j)
        .filter(|j| j % a.k == 0)
        .map(|j| specialization_sweep(&map, a.n, j, cap))
        .collect::<quadstab::Result<Vec<_>>>()?;
    let altfund_levels: Vec<AltfundLevel> = (1..=a.n + 2)
        .map(|i| AltfundLevel {
            i,
            criterion: check_altfund_fq(&map, i),
        })
        .collect();
    let certified_top = altfund_levels[a.n as usize - 1].criterion.is_certified();
    if !certified_top {
        return Err(Error::InternalVerification(format!("f^{} not certified over F_q(t)", a.n)).into());
    }
    if let Some(s) = sweeps.iter().find(|s| s.irreducible_points > 0 || !s.degree_sums_ok) {
        return Err(Error::InternalVerification(format!(
            "a specialization over F_{}^{} has f^{} irreducible",
            s.p, s.j, a.n
        ))
        .into());
    }
    let coefficients = map.coefficients();
    let polynomial = format_quadratic(&coefficients);
    let mut rows = vec![
        ("field", format!("F_{}^{}", a.p, a.k)),
        ("n", a.n.to_string()),
        ("m", format_fqrat(&m)),
        ("gamma", format_fqrat(&map.gamma)),
        ("f(x)", polynomial.clone()),
        ("f^n over F_q(t)", "irreducible (certified)".into()),
    ];
    for s in &sweeps {
        rows.push((
            "specializations",
            format!("F_{}^{}: {} points, {} poles, all reducible", s.p, s.j, s.points, s.poles),
        ));
    }
    rows.push(("status", "CERTIFIED".into()));
    let report = FqConstructionReport {
        field: (&field).into(),
        n: a.n,
        map,
        coefficients,
        polynomial,
        r,
        finite_certificate: finite,
        infinite_certificate: infinite,
        product_formula: pf,
        altfund_levels,
        sweeps,
    };
    Ok(Output {
        table: table(&rows),
        json: envelope_json("construct fq", cfg.seed, &report),
        certified: true,
    })
}

#[derive(Debug, Serialize)]
pub struct PrimitiveReport {
    pub example: primitive::PrimitiveExample,
    pub density: Option<primitive::DensitySample>,
    /// 2^−(n−1), the Chebotarev frequency of full cycles at level n − 1.
    pub expected_density: f64,
}

pub fn primitive(a: &PrimitiveArgs, cfg: &Config) -> anyhow::Result<Output> {
    check_depth(a.n, cfg)?;
    let search = WitnessSearch {
        strategy: match a.strategy {
            StrategyArg::Scan => Strategy::Scan,
            StrategyArg::Crt => Strategy::Crt,
        },
        cap: a.cap,
        oracle_cap: cfg.degree_cap,
        budget: cfg.factor,
    };
    let opts = PrimexOptions {
        witness: Some(search),
        spot_bound: a.spot_bound,
        oracle_cap: oracle_cap(cfg),
    };
    let ex = primitive::construct_primex(a.n, &opts)?;
    let k = a.n - 1;
    let density = a
        .density_bound
        .map(|b| primitive::irreducible_frequency(&ex.map, k, b, cfg.degree_cap))
        .transpose()?;
    let expected = 0.5f64.powi(k as i32);
    let w = ex.witness.as_ref().expect("search requested");
    let mut rows = vec![
        ("n", a.n.to_string()),
        ("m", ex.m.to_string()),
        ("q", ex.q.to_string()),
        ("gamma", ex.map.gamma.to_string()),
        ("witness prime", format!("{} (f̄^{k} irreducible, {:?}, {} primes tried)", w.p, w.strategy, w.primes_tried)),
        ("spot checks", format!("f̄^{} reducible at {} odd primes ≤ {}", a.n, ex.spot_checks.len(), a.spot_bound)),
    ];
    if let Some(d) = &density {
        rows.push((
            "density",
            format!(
                "f̄^{k} irreducible for {}/{} primes ≤ {} ({:.4}, expected {:.4}, {:.2}σ)",
                d.irreducible,
                d.primes,
                d.bound,
                d.frequency(),
                expected,
                d.sigmas_from(expected)
            ),
        ));
    }
    for note in &ex.notes {
        rows.push(("note", note.clone()));
    }
    rows.push(("status", "CERTIFIED".into()));
    let report = PrimitiveReport {
        example: ex,
        density,
        expected_density: expected,
    };
    Ok(Output {
        table: table(&rows),
        json: envelope_json("primitive", cfg.seed, &report),
        certified: true,
    })
}

pub fn census(a: &CensusArgs, cfg: &Config) -> anyhow::Result<Output> {
    let f = QuadMapZ::new(a.gamma.clone(), a.m.clone());
    let mut opts = CensusOptions::new(a.bound);
    opts.workers = cfg.workers;
    opts.prefix_depth = a.depth.unwrap_or(cfg.census.prefix_depth);
    opts.kill_depth = a.kill_depth.unwrap_or(cfg.census.kill_depth);
    opts.span_depth = a.span_depth.unwrap_or(cfg.census.span_depth);
    opts.segment_size = cfg.census.segment_size;
    opts.checkpoint_dir = a.resume.clone();
    opts.budget = cfg.factor;
    let resumed = census::resumable_segments(&opts);
    let start = Instant::now();
    let r = census::census_scan(&f, &opts)?;
    let elapsed = start.elapsed();
    let killed_late = r
        .candidates
        .iter()
        .filter(|c| !c.stable && c.kill_depth.map_or(false, |k| k > r.kill_depth))
        .count();
    let span = &r.span;
    let mut rows = vec![
        ("map", format!("(x − {})² + {} + {}", f.gamma, f.gamma, f.m)),
        ("bound", r.bound.to_string()),
        ("primes scanned", format!("{} (p = 2 excluded)", r.runtime_stats.primes_scanned)),
        ("prefix depth", r.prefix_depth.to_string()),
        ("candidates", r.candidates.len().to_string()),
        ("stable primes", format!("{} ({:.6} of scanned)", r.stable_primes.len(), r.stable_density())),
        ("killed past depth", format!("{killed_late} candidates need more than {} levels", r.kill_depth)),
        (
            "span",
            format!(
                "k = {}, rank {}, origin {}, predicted density {} ({})",
                span.k,
                span.rank,
                if span.origin_in_affine_span { "in affine span" } else { "not in affine span" },
                span.predicted_density,
                if span.prefix_based { "prefix-based" } else { "complete" }
            ),
        ),
    ];
    if r.stable_primes.len() <= 20 {
        rows.push(("stable list", format!("{:?}", r.stable_primes)));
    }
    if resumed > 0 {
        rows.push(("resumed", format!("{resumed} segments from checkpoints")));
    }
    rows.push(("wall time", format!("{:.2?}", elapsed)));
    Ok(Output {
        table: table(&rows),
        json: envelope_json("census", cfg.seed, &r),
        certified: true,
    })
}

pub fn heuristic(a: &HeuristicArgs, cfg: &Config) -> anyhow::Result<Output> {
    let r = census::heuristic_sum(a.bound, a.digits)?;
    let t = table(&[
        ("bound", r.bound.to_string()),
        ("primes", r.primes.to_string()),
        ("partial sum", r.partial_sum.clone()),
        ("tail bound", r.tail_bound.clone()),
    ]);
    Ok(Output {
        table: t,
        json: envelope_json("heuristic", cfg.seed, &r),
        certified: true,
    })
}

#[derive(Debug, Serialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub criterion_reducible: bool,
    pub cycle_type: Option<CycleType>,
    pub agrees: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub map: QuadMapZ,
    pub n: u32,
    pub levels: Vec<LevelCheck>,
    pub numfield_q: StabilityCertificate,
    pub deddomstab: StabilityCertificate,
    pub irreducible_certified: bool,
    /// γ = −m: f = (x − γ)², so every iterate is a square.
    pub reducible_over_q: bool,
    pub primes: Vec<PrimeCheck>,
    pub reducible_at_every_checked_prime: bool,
}

pub fn verify(a: &VerifyArgs, cfg: &Config) -> anyhow::Result<Output> {
    check_depth(a.n, cfg)?;
    if a.n == 0 {
        bail!(Error::InvalidInput("n must be at least 1".into()));
    }
    let f = QuadMapZ::new(a.gamma.clone(), a.m.clone());
    let lv = levels(&f, a.n);
    let last = lv.last().unwrap();
    let numfield_q = check_numfield_q(&f);
    let deddomstab = check_deddomstab(&f, &cfg.factor);
    let reducible_over_q = f.is_degenerate();
    let irreducible_certified = last.fund.is_certified()
        || last.altfund.is_certified()
        || !numfield_q.is_none()
        || !deddomstab.is_none();
    let use_oracle = a.n < usize::BITS && 1usize << a.n <= cfg.degree_cap;
    let primes = primes_up_to(a.p_bound)
        .skip(1)
        .map(|p| {
            let criterion_reducible = check_deddom_reducibility(&f, a.n, p)?;
            let cycle_type = if use_oracle {
                Some(modpoly::frobenius_cycle_type(&f, a.n, p, cfg.degree_cap)?)
            } else {
                None
            };
            let agrees = cycle_type
                .as_ref()
                .map_or(true, |c| c.is_full_cycle(a.n) != criterion_reducible);
            Ok(PrimeCheck {
                p,
                criterion_reducible,
                cycle_type,
                agrees,
            })
        })
        .collect::<quadstab::Result<Vec<_>>>()?;
    if let Some(bad) = primes.iter().find(|c| !c.agrees) {
        return Err(Error::InternalVerification(format!(
            "residue criterion and factorization disagree at p = {}",
            bad.p
        ))
        .into());
    }
    let reducible_everywhere = primes.iter().all(|c| c.criterion_reducible);
    let irreducible_at: Vec<u64> = primes.iter().filter(|c| !c.criterion_reducible).map(|c| c.p).collect();
    let t = table(&[
        ("map", format!("(x − {})² + {} + {}", f.gamma, f.gamma, f.m)),
        ("n", a.n.to_string()),
        ("fund", format!("{:?}", last.fund)),
        ("altfund", format!("{:?}", last.altfund)),
        ("stability", cert_name(&numfield_q, &deddomstab)),
        (
            "f^n over Q",
            if irreducible_certified {
                "irreducible (certified)".into()
            } else if reducible_over_q {
                "reducible (f = (x − γ)², every iterate is a square)".into()
            } else {
                "inconclusive".to_string()
            },
        ),
        (
            "mod p",
            if reducible_everywhere {
                format!("f̄^{} reducible at every odd p ≤ {}", a.n, a.p_bound)
            } else {
                format!(
                    "f̄^{} irreducible at {} odd primes ≤ {}, first {}",
                    a.n,
                    irreducible_at.len(),
                    a.p_bound,
                    irreducible_at[0]
                )
            },
        ),
    ]);
    let report = VerifyReport {
        map: f,
        n: a.n,
        levels: lv,
        numfield_q,
        deddomstab,
        irreducible_certified,
        reducible_over_q,
        primes,
        reducible_at_every_checked_prime: reducible_everywhere,
    };
    Ok(Output {
        table: t,
        json: envelope_json("verify", cfg.seed, &report),
        certified: irreducible_certified || reducible_over_q,
    })
}
