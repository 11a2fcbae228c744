//! Brute-force oracles and property checks behind the acceptance suite.
//!
//! Every check returns [`VerificationReport`]s; a report passes when it
//! holds no violating row. Seeds make each row replayable.

mod brute;
pub mod generate;
mod oracles;
mod report;
mod theorems;

pub use brute::{
    best_feasible, bicriterion_ratio, brute_force_opt, compute_k_parameter, exact_cost_table,
    k_parameter_from_table, MAX_BRUTE_STEINER, MAX_BRUTE_TSP,
};
pub use generate::Family;
pub use oracles::{audit_cost_oracle, check_objective_suite, check_routing_envelopes};
pub use report::{write_csv, CheckRow, VerificationReport, TOLERANCE};
pub use theorems::{check_bicriterion, check_prefix_theorems, check_usm_guarantee, oracle_count_rows, CostMode};

use crate::error::Result;

/// Sizes and seed counts for [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Ground-set size for the bicriterion sweep.
    pub n: usize,
    /// Seeds for the bicriterion sweep.
    pub seeds: u64,
    pub prefix_n: usize,
    pub prefix_seeds: u64,
    pub usm_trials: u64,
    pub usm_max_n: usize,
    pub envelope_seeds: u64,
    pub objective_seeds: u64,
    pub objective_n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n: 8,
            seeds: 300,
            prefix_n: 9,
            prefix_seeds: 200,
            usm_trials: 500,
            usm_max_n: 12,
            envelope_seeds: 200,
            objective_seeds: 20,
            objective_n: 6,
        }
    }
}

fn seeds(count: u64) -> Vec<u64> {
    (0..count).collect()
}

/// Every check in this module at the configured sizes. Uses the ambient
/// rayon pool.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let sweep = seeds(config.seeds);
    out.extend(check_bicriterion(Family::Tour, config.n, &sweep, CostMode::Exact)?);
    out.extend(check_bicriterion(Family::Tour, config.n, &sweep, CostMode::Heuristic)?);
    let tree_n = config.n.min(MAX_BRUTE_STEINER);
    let mut tree = check_bicriterion(Family::Tree, tree_n, &sweep, CostMode::Exact)?;
    tree.extend(check_bicriterion(Family::Tree, tree_n, &sweep, CostMode::Heuristic)?);
    for r in &mut tree {
        r.property = format!("{}-tree", r.property);
    }
    out.extend(tree);
    out.extend(check_prefix_theorems(config.prefix_n, &seeds(config.prefix_seeds))?);
    out.extend(check_usm_guarantee(&seeds(config.usm_trials), config.usm_max_n)?);
    out.extend(check_routing_envelopes(&seeds(config.envelope_seeds))?);
    out.extend(check_objective_suite(&seeds(config.objective_seeds), config.objective_n)?);
    Ok(out)
}
