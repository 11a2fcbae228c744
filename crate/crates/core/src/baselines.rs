//! Comparison algorithms: random admission and benefit-cost greedy.
//!
//! Both respect the original budget `c`, not the relaxed one.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::optimizer::{Algorithm, Instance, Solution};
use crate::routing::CostChain;

/// Floor on the marginal-cost denominator when `c_min` is zero.
pub const MIN_MARGINAL_COST: f64 = 1e-9;

/// Draws unselected items uniformly at random and admits each one while the
/// cost stays within `c`; stops at the first rejection.
pub fn rand_baseline(instance: &Instance, seed: u64) -> Result<Solution> {
    let objective = instance.objective();
    let cost = instance.cost();
    let (f0, r0, h0) = (objective.calls(), cost.calls(), cost.cache_hits());
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut chain = CostChain::new(cost);
    let mut sequence = Vec::new();
    let mut witness = cost.empty_witness();
    let mut value = objective.eval_or_neg_inf(&[])?;
    let mut trace = Vec::new();
    for (step, &x) in order.iter().enumerate() {
        sequence.push(x);
        let probe = chain.probe(cost, &sequence)?;
        if probe.reported > instance.budget() {
            sequence.pop();
            break;
        }
        chain.commit(&probe);
        let next = objective.eval_or_neg_inf(&sequence)?;
        trace.push(format!(
            "rand | iter {} | item {x} | gain {} | cost {} | over_budget 0",
            step + 1,
            next - value,
            probe.reported
        ));
        value = next;
        witness = probe.witness;
    }
    if sequence.is_empty() {
        value = 0.0;
    }
    Ok(Solution {
        algorithm: Algorithm::Rand,
        sequence,
        value,
        cost: witness.cost(),
        budget: instance.budget(),
        witness,
        f_calls: objective.calls() - f0,
        rho_calls: cost.calls() - r0,
        rho_cache_hits: cost.cache_hits() - h0,
        candidates: 1,
        trace,
    })
}

/// Repeatedly adds the feasible item of largest `gain / marginal cost`
/// until nothing fits within `c` or the best feasible gain is not positive.
/// The marginal cost is clamped below at `c_min` (and a tiny positive
/// floor); ties go to the lowest index.
pub fn rmax_baseline(instance: &Instance) -> Result<Solution> {
    let objective = instance.objective();
    let cost = instance.cost();
    let (f0, r0, h0) = (objective.calls(), cost.calls(), cost.cache_hits());
    let floor = cost.c_min().max(MIN_MARGINAL_COST);

    let mut chain = CostChain::new(cost);
    let mut remaining: Vec<usize> = (0..instance.n()).collect();
    let mut sequence: Vec<usize> = Vec::new();
    let mut witness = cost.empty_witness();
    let mut value = objective.eval_or_neg_inf(&[])?;
    let mut trace = Vec::new();
    loop {
        let mut best_gain = f64::NEG_INFINITY;
        // (position, ratio, gain, value, probe)
        let mut best = None;
        for (pos, &x) in remaining.iter().enumerate() {
            sequence.push(x);
            let probe = chain.probe(cost, &sequence)?;
            let feasible = probe.reported <= instance.budget();
            let next = if feasible {
                Some(objective.eval_or_neg_inf(&sequence)?)
            } else {
                None
            };
            sequence.pop();
            let Some(next) = next else { continue };
            let gain = next - value;
            if gain.is_nan() {
                continue;
            }
            best_gain = best_gain.max(gain);
            if gain <= 0.0 {
                continue;
            }
            let ratio = gain / (probe.reported - chain.last()).max(floor);
            if best.as_ref().map_or(true, |&(_, r, _, _, _)| ratio > r) {
                best = Some((pos, ratio, gain, next, probe));
            }
        }
        if best_gain <= 0.0 {
            break;
        }
        let Some((pos, _, gain, next, probe)) = best else { break };
        let x = remaining.remove(pos);
        sequence.push(x);
        chain.commit(&probe);
        trace.push(format!(
            "rmax | iter {} | item {x} | gain {gain} | cost {} | over_budget 0",
            sequence.len(),
            probe.reported
        ));
        value = next;
        witness = probe.witness;
    }
    if sequence.is_empty() {
        value = 0.0;
    }
    Ok(Solution {
        algorithm: Algorithm::RMax,
        sequence,
        value,
        cost: witness.cost(),
        budget: instance.budget(),
        witness,
        f_calls: objective.calls() - f0,
        rho_calls: cost.calls() - r0,
        rho_cache_hits: cost.cache_hits() - h0,
        candidates: 1,
        trace,
    })
}
