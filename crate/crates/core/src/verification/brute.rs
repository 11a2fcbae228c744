//! Exhaustive optimum and independence-system parameter.

use log::warn;

use crate::error::{Error, Result};
use crate::objectives::value_table;
use crate::optimizer::Instance;
use crate::routing::CostOracle;
use crate::set;

pub const MAX_BRUTE_TSP: usize = 12;
pub const MAX_BRUTE_STEINER: usize = 10;

/// Exact cost of every subset for an oracle small enough to enumerate.
/// Heuristic oracles are replaced by their exact twin.
pub fn exact_cost_table(cost: &CostOracle) -> Result<Vec<f64>> {
    let n = cost.ground_size();
    let limit = if cost.kind().is_steiner() {
        MAX_BRUTE_STEINER
    } else {
        MAX_BRUTE_TSP
    };
    if n > limit {
        return Err(Error::TooLarge {
            what: "ground set for brute force",
            size: n,
            limit,
        });
    }
    cost.exact_twin().all_subset_costs()
}

/// Best feasible set under the exact cost and the original budget:
/// `(items, value)`. Ties go to the lexicographically smallest set.
pub fn brute_force_opt(instance: &Instance) -> Result<(Vec<usize>, f64)> {
    let costs = exact_cost_table(instance.cost())?;
    let values = value_table(instance.objective().function().as_ref())?;
    Ok(best_feasible(&values, &costs, instance.budget()))
}

/// Same as [`brute_force_opt`] over precomputed tables.
pub fn best_feasible(values: &[f64], costs: &[f64], budget: f64) -> (Vec<usize>, f64) {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for (mask, (&v, &c)) in values.iter().zip(costs).enumerate() {
        if c > budget {
            continue;
        }
        let items = set::from_mask(mask as u64);
        let better = match &best {
            None => true,
            Some((b_items, b_v)) => v > *b_v || (v == *b_v && items < *b_items),
        };
        if better {
            best = Some((items, v));
        }
    }
    best.expect("the empty set is always feasible")
}

/// `ceil(max base size / min base size)` over the maximal sets with
/// cost at most `budget`. Returns 1 when no singleton is feasible.
pub fn k_parameter_from_table(costs: &[f64], n: usize, budget: f64) -> usize {
    let feasible = |mask: usize| costs[mask] <= budget;
    let (mut largest, mut smallest) = (0u32, u32::MAX);
    for mask in 0..costs.len() {
        if !feasible(mask) {
            continue;
        }
        let maximal = (0..n).all(|x| mask >> x & 1 == 1 || !feasible(mask | 1 << x));
        if maximal {
            let size = (mask as u64).count_ones();
            largest = largest.max(size);
            smallest = smallest.min(size);
        }
    }
    if largest == 0 {
        warn!("no feasible singleton under budget {budget}; using k = 1");
        return 1;
    }
    largest.div_ceil(smallest) as usize
}

/// Independence-system parameter of `{S : rho(S) <= c}` under the exact cost.
pub fn compute_k_parameter(instance: &Instance) -> Result<usize> {
    let n = instance.n();
    if n > MAX_BRUTE_STEINER {
        return Err(Error::TooLarge {
            what: "ground set for base enumeration",
            size: n,
            limit: MAX_BRUTE_STEINER,
        });
    }
    let costs = exact_cost_table(instance.cost())?;
    Ok(k_parameter_from_table(&costs, n, instance.budget()))
}

/// The guaranteed fraction of the optimum for system parameter `k`.
pub fn bicriterion_ratio(k: usize) -> f64 {
    let k = k as f64;
    k / (4.0 * (k + 1.0) * (k + 1.0))
}
