//! Seeded sweeps over budgets and algorithms.

use std::io::Write;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::scenario::{generate, ScenarioInstance};
use crate::baselines::{rand_baseline, rmax_baseline};
use crate::error::Result;
use crate::optimizer::{solve, Algorithm, Instance, Solution};
use crate::routing::Route;
use crate::verification::{CheckRow, VerificationReport, TOLERANCE};

pub const CSV_HEADER: [&str; 12] = [
    "algo",
    "seed",
    "budget",
    "value",
    "cost",
    "over_budget",
    "items",
    "travel_energy",
    "collect_energy",
    "f_calls",
    "rho_calls",
    "ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algo: Algorithm,
    pub seed: u64,
    /// Seed of the instance the run used.
    pub instance_seed: u64,
    pub budget: f64,
    pub theta: f64,
    pub value: f64,
    pub cost: f64,
    pub over_budget: f64,
    /// Selected items, ascending.
    pub items: Vec<usize>,
    /// Tour order when the route is a tour.
    pub tour: Vec<usize>,
    pub travel_energy: f64,
    pub collect_energy: f64,
    pub f_calls: u64,
    pub rho_calls: u64,
    pub ms: f64,
}

impl RunRecord {
    pub fn from_solution(sol: &Solution, seed: u64, instance_seed: u64, theta: f64, ms: f64) -> Self {
        Self {
            algo: sol.algorithm,
            seed,
            instance_seed,
            budget: sol.budget,
            theta,
            value: sol.value,
            cost: sol.cost,
            over_budget: sol.over_budget_ratio(),
            items: sol.items(),
            tour: match &sol.witness.route {
                Route::Tour(order) => order.clone(),
                _ => Vec::new(),
            },
            travel_energy: sol.travel_energy(),
            collect_energy: sol.visiting_energy(),
            f_calls: sol.f_calls,
            rho_calls: sol.rho_calls,
            ms,
        }
    }

    fn csv_fields(&self) -> [String; 12] {
        [
            self.algo.to_string(),
            self.seed.to_string(),
            self.budget.to_string(),
            self.value.to_string(),
            self.cost.to_string(),
            self.over_budget.to_string(),
            self.items.len().to_string(),
            self.travel_energy.to_string(),
            self.collect_energy.to_string(),
            self.f_calls.to_string(),
            self.rho_calls.to_string(),
            format!("{:.3}", self.ms),
        ]
    }
}

/// Runs one algorithm on `instance`; `seed` only matters for Rand.
pub fn run_algorithm(algo: Algorithm, instance: &Instance, seed: u64) -> Result<Solution> {
    match algo {
        Algorithm::Ours => solve(instance),
        Algorithm::Rand => rand_baseline(instance, seed),
        Algorithm::RMax => rmax_baseline(instance),
    }
}

/// Records plus the runs that failed.
#[derive(Debug, Default)]
pub struct Experiment {
    pub records: Vec<RunRecord>,
    pub failures: Vec<String>,
}

/// The instance a run with `seed` uses under `config`.
pub fn instance_for(config: &ScenarioConfig, seed: u64) -> Result<ScenarioInstance> {
    let mut inst = generate(config.scenario, config.n, config.instance_seed.unwrap_or(seed))?;
    if let super::scenario::ScenarioData::Multicast { lambda, .. } = &mut inst.data {
        if *lambda != config.lambda {
            *lambda = config.lambda;
            inst = ScenarioInstance::assemble(inst.scenario, inst.seed, inst.data.clone(), inst.cost.kind())?;
        }
    }
    if let Some(kind) = config.oracle {
        inst = inst.with_oracle(kind)?;
    }
    Ok(inst)
}

/// One record per (seed, budget, algorithm), sorted by algorithm, seed
/// and budget. Seeds run in parallel on the ambient rayon pool; a failed
/// run is logged and listed in `failures`.
pub fn run_experiment(config: &ScenarioConfig) -> Result<Experiment> {
    config.validate()?;
    if config.algos.is_empty() {
        return Ok(Experiment::default());
    }
    let shared = config.instance_seed.map(|_| instance_for(config, 0)).transpose()?;
    let per_seed: Vec<(Vec<RunRecord>, Vec<String>)> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let mut records = Vec::new();
            let mut failures = Vec::new();
            let owned;
            let scenario = match &shared {
                Some(s) => s,
                None => match instance_for(config, seed) {
                    Ok(s) => {
                        owned = s;
                        &owned
                    }
                    Err(e) => {
                        failures.push(format!("seed {seed}: instance generation failed: {e}"));
                        return (records, failures);
                    }
                },
            };
            for &budget in &config.budgets {
                for &algo in &config.algos {
                    let run = || -> Result<RunRecord> {
                        let instance = scenario.instance(budget, config.theta, config.k)?;
                        let start = Instant::now();
                        let sol = run_algorithm(algo, &instance, seed)?;
                        let ms = start.elapsed().as_secs_f64() * 1e3;
                        Ok(RunRecord::from_solution(&sol, seed, scenario.seed, config.theta, ms))
                    };
                    match run() {
                        Ok(r) => records.push(r),
                        Err(e) => {
                            warn!("{algo} seed {seed} budget {budget}: {e}");
                            failures.push(format!("{algo} seed {seed} budget {budget}: {e}"));
                        }
                    }
                }
            }
            (records, failures)
        })
        .collect();
    let mut out = Experiment::default();
    for (records, failures) in per_seed {
        out.records.extend(records);
        out.failures.extend(failures);
    }
    sort_records(&mut out.records);
    info!("{} runs, {} failures", out.records.len(), out.failures.len());
    Ok(out)
}

pub fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| {
        a.algo
            .cmp(&b.algo)
            .then(a.seed.cmp(&b.seed))
            .then(a.budget.total_cmp(&b.budget))
    });
}

pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush().map_err(|e| crate::Error::io("<csv>", e))?;
    Ok(())
}

/// Over-budget ratio at most `theta` for our algorithm and exactly zero for
/// the baselines, one row per record.
pub fn check_budget_safety(records: &[RunRecord]) -> VerificationReport {
    let mut report = VerificationReport::new("budget-safety");
    for r in records {
        let (ok, limit) = match r.algo {
            Algorithm::Ours => (r.over_budget <= r.theta + TOLERANCE, r.theta),
            _ => (r.over_budget == 0.0, 0.0),
        };
        report.record(CheckRow::new(Some(r.seed), ok, r.over_budget, limit).with_witness(vec![r.items.clone()]));
    }
    report
}

/// Travel plus collection energy equals the reported cost, per record.
pub fn check_energy_identity(records: &[RunRecord]) -> VerificationReport {
    let mut report = VerificationReport::new("energy-identity");
    for r in records {
        let sum = r.travel_energy + r.collect_energy;
        report.record(CheckRow::new(Some(r.seed), (sum - r.cost).abs() <= TOLERANCE, sum, r.cost));
    }
    report
}

/// Mean value per (algorithm, budget), budgets ascending.
pub fn mean_values(records: &[RunRecord], algo: Algorithm) -> Vec<(f64, f64)> {
    let mut budgets: Vec<f64> = records.iter().filter(|r| r.algo == algo).map(|r| r.budget).collect();
    budgets.sort_by(f64::total_cmp);
    budgets.dedup();
    budgets
        .into_iter()
        .map(|b| {
            let vals: Vec<f64> = records
                .iter()
                .filter(|r| r.algo == algo && r.budget == b)
                .map(|r| r.value)
                .collect();
            (b, vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect()
}

/// Budgets at which our mean value falls below Rand's mean. Informational.
pub fn dominance_gaps(records: &[RunRecord]) -> Vec<String> {
    let ours = mean_values(records, Algorithm::Ours);
    let rand = mean_values(records, Algorithm::Rand);
    ours.iter()
        .filter_map(|&(b, v)| {
            let (_, r) = rand.iter().find(|(rb, _)| *rb == b)?;
            (v < *r).then(|| format!("budget {b}: ours {v:.4} below rand mean {r:.4}"))
        })
        .collect()
}
