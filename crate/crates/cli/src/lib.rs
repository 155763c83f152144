//! Command-line front end: argument parsing, configuration, report
//! assembly and the exit-code contract.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quadstab::arith::Integer;

pub mod commands;
pub mod config;
pub mod report;

pub use config::Config;

/// Everything certified.
pub const EXIT_OK: i32 = 0;
/// Ran to completion but could not certify (e.g. `verify` inconclusive).
pub const EXIT_UNCERTIFIED: i32 = 1;
/// Bad hypothesis or bad input.
pub const EXIT_HYPOTHESIS: i32 = 2;
/// A recomputed certificate disagreed with a construction.
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "quadstab", version, about = "Stability of iterated quadratic maps")]
pub struct Cli {
    /// TOML config file.
    #[arg(long, global = true, env = "QUADSTAB_CONFIG")]
    pub config: Option<PathBuf>,
    /// Write the machine-readable report here.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a map whose n-th iterate is irreducible but reducible mod every prime.
    Construct {
        #[command(subcommand)]
        target: ConstructTarget,
    },
    /// Build a primitive example at level n and find a witness prime.
    Primitive(PrimitiveArgs),
    /// Scan primes up to a bound for stability of f mod p.
    Census(CensusArgs),
    /// Partial sum of 2^(-sqrt p) with a tail bound.
    Heuristic(HeuristicArgs),
    /// Run every criterion on a given map.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum ConstructTarget {
    /// Over the rationals, f = (x − γ)² + γ + m with γ = s − f₀ⁿ(0).
    Q(ConstructQ),
    /// Over F_q(t), γ = m^(2^(n−1)) − f₀ⁿ(0) (n ≥ 3) or the n = 2 remedy.
    Fq(ConstructFq),
}

#[derive(Debug, Args)]
pub struct ConstructQ {
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Integer,
    #[arg(long, conflicts_with = "auto_s", required_unless_present = "auto_s")]
    pub s: Option<Integer>,
    /// Use the smallest admissible s.
    #[arg(long)]
    pub auto_s: bool,
    /// Spot-check reduction mod odd primes up to this bound.
    #[arg(long, default_value_t = 500)]
    pub spot_bound: u64,
}

#[derive(Debug, Args)]
pub struct ConstructFq {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long)]
    pub n: u32,
    /// Numerator of m, ascending in t, comma separated. In F_{p^k} a
    /// coefficient is colon-separated coordinates, e.g. `0,1:2`.
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    /// Denominator of m (monic after normalization), same format.
    #[arg(long, allow_hyphen_values = true)]
    pub den: Option<String>,
    /// Constant r for the n = 2 remedy; r/2 must be a non-residue.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Sweep specializations over F_{p^j} for j up to this (default: j ≤ 4
    /// while p^j ≤ 10⁴).
    #[arg(long)]
    pub sweep_j: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Scan,
    Crt,
}

#[derive(Debug, Args)]
pub struct PrimitiveArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = StrategyArg::Crt)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 100_000)]
    pub cap: u64,
    #[arg(long, default_value_t = 500)]
    pub spot_bound: u64,
    /// Also measure how often f̄ⁿ⁻¹ is irreducible over primes up to this bound.
    #[arg(long)]
    pub density_bound: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Integer,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Integer,
    #[arg(long)]
    pub bound: u64,
    /// Prefix depth of the candidate test.
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub kill_depth: Option<u32>,
    #[arg(long)]
    pub span_depth: Option<u32>,
    /// Checkpoint directory; finished segments found there are reused.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HeuristicArgs {
    #[arg(long)]
    pub bound: u64,
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Integer,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Integer,
    #[arg(long)]
    pub n: u32,
    /// Compare the residue criterion with factorization mod p up to here.
    #[arg(long, default_value_t = 200)]
    pub p_bound: u64,
}

/// Map an error to the exit-code contract.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<quadstab::Error>() {
        Some(quadstab::Error::InternalVerification(_)) => EXIT_INTERNAL,
        Some(quadstab::Error::HypothesisViolation { .. })
        | Some(quadstab::Error::InvalidInput(_))
        | Some(quadstab::Error::DegreeCap { .. }) => EXIT_HYPOTHESIS,
        Some(_) => EXIT_UNCERTIFIED,
        // config and argument problems are input errors too
        None => EXIT_HYPOTHESIS,
    }
}

/// Run a parsed command; returns the exit code for a completed run.
pub fn run(cli: Cli) -> anyhow::Result<i32> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    let out = commands::dispatch(&cli.command, &cfg)?;
    print!("{}", out.table);
    if let Some(path) = &cli.json {
        report::write_json(path, &out.json)?;
    }
    Ok(if out.certified { EXIT_OK } else { EXIT_UNCERTIFIED })
}
