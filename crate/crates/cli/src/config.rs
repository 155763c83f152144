//! Run configuration: built-in defaults, then an optional TOML file, then
//! `QUADSTAB_*` environment variables, then command-line flags.

use std::path::Path;

use anyhow::{bail, Context};
use quadstab::arith::FactorBudget;
use quadstab::census::{DEFAULT_KILL_DEPTH, DEFAULT_PREFIX_DEPTH, DEFAULT_SEGMENT_SIZE, DEFAULT_SPAN_DEPTH};
use quadstab::modpoly::DEFAULT_SEED;
use quadstab::quadmap::DEFAULT_ORBIT_DEPTH_CAP;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusDefaults {
    pub prefix_depth: u32,
    pub kill_depth: u32,
    pub span_depth: u32,
    pub segment_size: u64,
}

impl Default for CensusDefaults {
    fn default() -> Self {
        CensusDefaults {
            prefix_depth: DEFAULT_PREFIX_DEPTH,
            kill_depth: DEFAULT_KILL_DEPTH,
            span_depth: DEFAULT_SPAN_DEPTH,
            segment_size: DEFAULT_SEGMENT_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub orbit_depth_cap: u32,
    /// Largest polynomial degree built over a finite field.
    pub degree_cap: usize,
    pub seed: u64,
    pub workers: usize,
    pub factor: FactorBudget,
    pub census: CensusDefaults,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            orbit_depth_cap: DEFAULT_ORBIT_DEPTH_CAP,
            degree_cap: 1 << 10,
            seed: DEFAULT_SEED,
            workers: 1,
            factor: FactorBudget::default(),
            census: CensusDefaults::default(),
        }
    }
}

const ENV_KEYS: &[&str] = &[
    "QUADSTAB_ORBIT_DEPTH_CAP",
    "QUADSTAB_DEGREE_CAP",
    "QUADSTAB_SEED",
    "QUADSTAB_WORKERS",
    "QUADSTAB_TRIAL_BOUND",
    "QUADSTAB_RHO_ITERATIONS",
    "QUADSTAB_TIME_CAP_MS",
    "QUADSTAB_PREFIX_DEPTH",
    "QUADSTAB_KILL_DEPTH",
    "QUADSTAB_SPAN_DEPTH",
    "QUADSTAB_SEGMENT_SIZE",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> anyhow::Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| anyhow::anyhow!("{key}={value}: {e}"))
}

impl Config {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                Self::from_toml(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Config::default(),
        };
        cfg.apply_env(std::env::vars())?;
        Ok(cfg)
    }

    /// Apply `QUADSTAB_*` overrides from `(key, value)` pairs.
    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> anyhow::Result<()> {
        for (key, value) in vars {
            if !ENV_KEYS.contains(&key.as_str()) {
                continue;
            }
            let v = value.as_str();
            match key.as_str() {
                "QUADSTAB_ORBIT_DEPTH_CAP" => self.orbit_depth_cap = parse(&key, v)?,
                "QUADSTAB_DEGREE_CAP" => self.degree_cap = parse(&key, v)?,
                "QUADSTAB_SEED" => self.seed = parse(&key, v)?,
                "QUADSTAB_WORKERS" => self.workers = parse(&key, v)?,
                "QUADSTAB_TRIAL_BOUND" => self.factor.trial_bound = parse(&key, v)?,
                "QUADSTAB_RHO_ITERATIONS" => self.factor.rho_iterations = parse(&key, v)?,
                "QUADSTAB_TIME_CAP_MS" => self.factor.time_cap_ms = parse(&key, v)?,
                "QUADSTAB_PREFIX_DEPTH" => self.census.prefix_depth = parse(&key, v)?,
                "QUADSTAB_KILL_DEPTH" => self.census.kill_depth = parse(&key, v)?,
                "QUADSTAB_SPAN_DEPTH" => self.census.span_depth = parse(&key, v)?,
                "QUADSTAB_SEGMENT_SIZE" => self.census.segment_size = parse(&key, v)?,
                _ => unreachable!(),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.orbit_depth_cap == 0 || self.degree_cap == 0 || self.workers == 0 {
            bail!("orbit_depth_cap, degree_cap and workers must be positive");
        }
        let c = &self.census;
        if c.prefix_depth == 0 || c.kill_depth == 0 || c.span_depth == 0 || c.segment_size < 2 {
            bail!("census depths must be positive and segment_size at least 2");
        }
        self.factor.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_env() {
        let mut cfg = Config::from_toml("workers = 4\n[census]\nkill_depth = 30\n").unwrap();
        assert_eq!((cfg.workers, cfg.census.kill_depth, cfg.census.prefix_depth), (4, 30, 20));
        cfg.apply_env([
            ("QUADSTAB_WORKERS".to_string(), "2".to_string()),
            ("HOME".to_string(), "/root".to_string()),
        ])
        .unwrap();
        assert_eq!(cfg.workers, 2);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::from_toml("bogus = 1").is_err());
        let mut cfg = Config::default();
        assert!(cfg
            .apply_env([("QUADSTAB_DEGREE_CAP".to_string(), "x".to_string())])
            .is_err());
        cfg.degree_cap = 0;
        assert!(cfg.validate().is_err());
    }
}
