//! Budget-relaxed greedy growth of one iteration.

use crate::error::Result;
use crate::objectives::ObjectiveOracle;
use crate::routing::{CostChain, CostOracle, RouteWitness};

/// One admitted item.
#[derive(Debug, Clone, PartialEq)]
pub struct Admission {
    pub item: usize,
    pub gain: f64,
    /// Chain-clamped cost of the prefix ending at `item`.
    pub cost: f64,
    /// Route for that prefix, as the oracle returned it.
    pub witness: RouteWitness,
    pub value: f64,
    pub over_budget: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    /// Every candidate was admitted.
    Exhausted,
    /// Every remaining candidate has an undefined objective.
    NoCandidate,
    /// The best item would push the chain past the relaxed budget.
    OverBudget { item: usize, cost: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageOneState {
    /// Admitted items in order.
    pub x: Vec<usize>,
    /// Suffix of `x` admitted while the chain cost exceeded the budget.
    pub y: Vec<usize>,
    /// Candidates left over, ascending.
    pub remaining: Vec<usize>,
    pub admissions: Vec<Admission>,
    pub stop: StopReason,
    /// `f` of the empty set, as evaluated at the start of the loop.
    pub empty_value: f64,
}

impl StageOneState {
    /// `f(X)` for the final sequence.
    pub fn value(&self) -> f64 {
        self.admissions.last().map_or(self.empty_value, |a| a.value)
    }

    /// Length of `x` without its over-budget suffix.
    pub fn within_budget_len(&self) -> usize {
        self.x.len() - self.y.len()
    }

    /// Route witness for the first `len` items of `x`.
    pub fn prefix_witness(&self, len: usize) -> Option<&RouteWitness> {
        len.checked_sub(1).map(|i| &self.admissions[i].witness)
    }
}

/// Greedy growth from the empty set over `candidates`.
///
/// Picks the item of largest marginal gain (lowest index on ties) and
/// admits it while the chain cost stays within `relaxed_budget`; items
/// admitted while the cost exceeds `budget` form `y`. Negative gains are
/// admitted; only the budget stops the loop.
pub fn stage_one(
    objective: &ObjectiveOracle,
    cost: &CostOracle,
    candidates: &[usize],
    budget: f64,
    relaxed_budget: f64,
) -> Result<StageOneState> {
    let mut remaining = candidates.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let mut chain = CostChain::new(cost);
    let mut x: Vec<usize> = Vec::new();
    let mut y = Vec::new();
    let mut admissions: Vec<Admission> = Vec::new();
    let empty_value = objective.eval_or_neg_inf(&[])?;
    let mut fx = empty_value;
    let stop = loop {
        if remaining.is_empty() {
            break StopReason::Exhausted;
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for (pos, &s) in remaining.iter().enumerate() {
            x.push(s);
            let value = objective.eval_or_neg_inf(&x)?;
            x.pop();
            let gain = value - fx;
            if gain.is_nan() || value == f64::NEG_INFINITY {
                continue;
            }
            if best.map_or(true, |(_, g, _)| gain > g) {
                best = Some((pos, gain, value));
            }
        }
        let Some((pos, gain, value)) = best else {
            break StopReason::NoCandidate;
        };
        let item = remaining[pos];
        x.push(item);
        let probe = chain.probe(cost, &x)?;
        if probe.reported > relaxed_budget {
            x.pop();
            break StopReason::OverBudget {
                item,
                cost: probe.reported,
            };
        }
        chain.commit(&probe);
        remaining.remove(pos);
        fx = value;
        let over_budget = probe.reported > budget;
        if over_budget {
            y.push(item);
        }
        admissions.push(Admission {
            item,
            gain,
            cost: probe.reported,
            witness: probe.witness,
            value,
            over_budget,
        });
    };
    debug_assert!(x.ends_with(&y));
    Ok(StageOneState {
        x,
        y,
        remaining,
        admissions,
        stop,
        empty_value,
    })
}
