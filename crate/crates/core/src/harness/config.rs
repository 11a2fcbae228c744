//! Experiment configuration from `key=value` files.

use std::path::Path;

use super::io::parse_key_values;
use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::optimizer::Algorithm;
use crate::routing::CostKind;

/// Default number of seeds (and Rand replicates).
pub const DEFAULT_SEEDS: u64 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub budgets: Vec<f64>,
    pub theta: f64,
    /// `None` means `ceil(sqrt(n))`.
    pub k: Option<usize>,
    pub seeds: Vec<u64>,
    /// Cut-diversity weight (multicast only).
    pub lambda: f64,
    pub algos: Vec<Algorithm>,
    /// When set, every seed runs on the instance generated from this seed
    /// and seeds only drive Rand; otherwise each seed has its own instance.
    pub instance_seed: Option<u64>,
    /// Cost-oracle override.
    pub oracle: Option<CostKind>,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            n: scenario.default_n(),
            budgets: scenario.default_budgets(),
            theta: scenario.default_theta(),
            k: None,
            seeds: (1..=DEFAULT_SEEDS).collect(),
            lambda: 1.0,
            algos: Algorithm::ALL.to_vec(),
            instance_seed: None,
            oracle: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budgets.is_empty() || self.budgets.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::param("budgets must be a nonempty list of positive numbers"));
        }
        if self.seeds.is_empty() {
            return Err(Error::param("seeds must be nonempty"));
        }
        if self.n == 0 {
            return Err(Error::param("n must be positive"));
        }
        if self.k == Some(0) {
            return Err(Error::param("k must be positive or auto"));
        }
        Ok(())
    }

    /// Reads a config file. `scenario` must come first or defaults for the
    /// poi scenario apply to keys set before it.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let pairs = parse_key_values(path, text)?;
        let scenario = pairs
            .iter()
            .find(|(_, k, _)| k == "scenario")
            .map(|(_, _, v)| v.parse::<Scenario>())
            .transpose()?
            .unwrap_or(Scenario::Poi);
        let mut cfg = Self::new(scenario);
        for (ln, key, value) in pairs {
            cfg.set(&key, &value).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: ln,
                msg: e.to_string(),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |what: &str| Error::param(format!("bad {what} `{value}`"));
        match key {
            "scenario" => {
                let scenario: Scenario = value.parse()?;
                if scenario != self.scenario {
                    *self = Self::new(scenario);
                }
            }
            "n" => self.n = value.parse().map_err(|_| num("n"))?,
            "budget" | "budgets" => {
                self.budgets = value
                    .split(',')
                    .map(|b| b.trim().parse().map_err(|_| num("budget")))
                    .collect::<Result<_>>()?
            }
            "theta" => self.theta = value.parse().map_err(|_| num("theta"))?,
            "k" => self.k = parse_k(value)?,
            "seed" | "seeds" => self.seeds = parse_seeds(value)?,
            "lambda" => self.lambda = value.parse().map_err(|_| num("lambda"))?,
            "algo" | "algos" => {
                self.algos = value
                    .split(',')
                    .map(|a| a.trim())
                    .filter(|a| !a.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "instance_seed" => self.instance_seed = Some(value.parse().map_err(|_| num("instance_seed"))?),
            "oracle" => self.oracle = Some(value.parse()?),
            _ => return Err(Error::param(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

/// `auto` or a positive integer.
pub fn parse_k(value: &str) -> Result<Option<usize>> {
    if value == "auto" {
        return Ok(None);
    }
    match value.parse::<usize>() {
        Ok(k) if k > 0 => Ok(Some(k)),
        _ => Err(Error::param(format!("k must be a positive integer or auto, got `{value}`"))),
    }
}

/// `a..b` (inclusive), `a..=b`, a comma list, or a single seed.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    let bad = || Error::param(format!("bad seed list `{value}`"));
    let seeds: Vec<u64> = if let Some((a, b)) = value.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        value
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}
