//! Iterated two-stage greedy.
//!
//! Each iteration grows a sequence greedily under the relaxed budget
//! `(1 + theta) c`, then runs the double-greedy USM on that sequence and on
//! every prefix obtained by stripping its over-budget suffix one item at a
//! time. The best candidate over all iterations wins.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::objectives::ObjectiveOracle;
use crate::routing::{CostOracle, RouteWitness};

mod stage_one;
mod usm;

pub use stage_one::{stage_one, Admission, StageOneState, StopReason};
pub use usm::{deterministic_usm, UsmResult};

/// Slack on budget comparisons of reported solutions.
pub const BUDGET_EPS: f64 = 1e-9;

/// `ceil(sqrt(n))`, at least 1.
pub fn default_k(n: usize) -> usize {
    let mut k = (n as f64).sqrt().ceil() as usize;
    // guard against sqrt rounding on perfect squares
    while k > 1 && (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    while k * k < n {
        k += 1;
    }
    k.max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Ours,
    Rand,
    RMax,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ours, Algorithm::Rand, Algorithm::RMax];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Ours => "ours",
            Algorithm::Rand => "rand",
            Algorithm::RMax => "rmax",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| Error::param(format!("unknown algorithm `{s}` (expected ours, rand or rmax)")))
    }
}

/// Objective, cost oracle, budget `c`, error parameter `theta` and loop count `k`.
#[derive(Debug)]
pub struct Instance {
    objective: ObjectiveOracle,
    cost: CostOracle,
    budget: f64,
    theta: f64,
    k: usize,
}

impl Instance {
    /// `theta` must cover the oracle's declared factor: `1 + theta >= guarantee`.
    /// Larger values are allowed, which is how an exact oracle emulates a
    /// `(1 + theta)`-approximate one. `k = None` picks [`default_k`].
    pub fn new(objective: ObjectiveOracle, cost: CostOracle, budget: f64, theta: f64, k: Option<usize>) -> Result<Self> {
        let n = objective.ground_size();
        if n == 0 {
            return Err(Error::param("ground set is empty"));
        }
        if cost.ground_size() != n {
            return Err(Error::param(format!(
                "objective has {n} items but the cost oracle has {}",
                cost.ground_size()
            )));
        }
        if !(budget > 0.0 && budget.is_finite()) {
            return Err(Error::param(format!("budget must be positive, got {budget}")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::param(format!("theta must be nonnegative, got {theta}")));
        }
        if 1.0 + theta < cost.guarantee_factor() - 1e-12 {
            return Err(Error::param(format!(
                "theta {theta} is below the {} oracle's declared factor {}",
                cost.kind(),
                cost.guarantee_factor()
            )));
        }
        let k = k.unwrap_or_else(|| default_k(n));
        if k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        Ok(Self {
            objective,
            cost,
            budget,
            theta,
            k,
        })
    }

    /// Same data, fresh counters.
    pub fn fork(&self) -> Self {
        Self {
            objective: self.objective.fork(),
            cost: self.cost.fork(),
            budget: self.budget,
            theta: self.theta,
            k: self.k,
        }
    }

    pub fn with_budget(&self, budget: f64) -> Result<Self> {
        Self::new(self.objective.fork(), self.cost.fork(), budget, self.theta, Some(self.k))
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.objective.fork(), self.cost.fork(), self.budget, self.theta, Some(k))
    }

    pub fn objective(&self) -> &ObjectiveOracle {
        &self.objective
    }

    pub fn cost(&self) -> &CostOracle {
        &self.cost
    }

    pub fn n(&self) -> usize {
        self.objective.ground_size()
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn relaxed_budget(&self) -> f64 {
        (1.0 + self.theta) * self.budget
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub algorithm: Algorithm,
    /// Selected items in selection order.
    pub sequence: Vec<usize>,
    pub value: f64,
    /// Cost of `witness`.
    pub cost: f64,
    pub budget: f64,
    pub witness: RouteWitness,
    pub f_calls: u64,
    pub rho_calls: u64,
    /// Depends on how warm the shared cache was; every other field is a
    /// pure function of the instance (and seed).
    pub rho_cache_hits: u64,
    /// Distinct candidates considered by the final scan.
    pub candidates: usize,
    pub trace: Vec<String>,
}

impl Solution {
    /// Selected items, ascending.
    pub fn items(&self) -> Vec<usize> {
        let mut v = self.sequence.clone();
        v.sort_unstable();
        v
    }

    /// `cost / c - 1`, or 0 within budget.
    pub fn over_budget_ratio(&self) -> f64 {
        (self.cost / self.budget - 1.0).max(0.0)
    }

    pub fn travel_energy(&self) -> f64 {
        self.witness.travel
    }

    pub fn visiting_energy(&self) -> f64 {
        self.witness.visiting
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub iteration: usize,
    /// Length of the prefix handed to USM.
    pub prefix_len: usize,
    /// USM output in prefix order.
    pub sequence: Vec<usize>,
    pub value: f64,
    pub witness: RouteWitness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    /// 1-based.
    pub index: usize,
    /// Candidates offered to the iteration, ascending.
    pub offered: Vec<usize>,
    pub stage_one: StageOneState,
    /// Candidates in the order they were produced, duplicates included.
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone)]
pub struct RunLog {
    /// Items dropped up front because their singleton cost exceeds the relaxed budget.
    pub screened_out: Vec<usize>,
    pub iterations: Vec<IterationLog>,
    pub solution: Solution,
}

/// Runs the algorithm and returns the best candidate.
pub fn solve(instance: &Instance) -> Result<Solution> {
    Ok(solve_detailed(instance)?.solution)
}

/// [`solve`] with per-iteration state kept for inspection.
pub fn solve_detailed(instance: &Instance) -> Result<RunLog> {
    let objective = instance.objective();
    let cost = instance.cost();
    let (f0, r0, h0) = (objective.calls(), cost.calls(), cost.cache_hits());
    let relaxed = instance.relaxed_budget();

    let mut offered = Vec::new();
    let mut screened_out = Vec::new();
    for s in 0..instance.n() {
        if cost.cost(&[s])? > relaxed {
            screened_out.push(s);
        } else {
            offered.push(s);
        }
    }
    if !screened_out.is_empty() {
        warn!(
            "{} of {} items cost more than the relaxed budget {relaxed} on their own and are excluded",
            screened_out.len(),
            instance.n()
        );
    }

    let mut trace = Vec::new();
    let mut iterations = Vec::new();
    let mut pool: Vec<Candidate> = Vec::new();
    let mut seen = HashSet::new();
    for i in 1..=instance.k() {
        let state = stage_one(objective, cost, &offered, instance.budget(), relaxed)?;
        for a in &state.admissions {
            trace.push(format!(
                "iter {i} | item {} | gain {} | cost {} | over_budget {}",
                a.item, a.gain, a.cost, a.over_budget as u8
            ));
        }
        if state.x.is_empty() {
            debug!("iteration {i}: nothing admitted, stopping");
            iterations.push(IterationLog {
                index: i,
                offered,
                stage_one: state,
                candidates: Vec::new(),
            });
            break;
        }
        let candidates = stage_two(instance, i, &state)?;
        for c in &candidates {
            trace.push(format!("iter {i} | prefix_len {} | value {}", c.prefix_len, c.value));
            if c.witness.cost() > relaxed + BUDGET_EPS {
                warn!(
                    "iteration {i}: candidate of prefix {} costs {} above the relaxed budget; dropped",
                    c.prefix_len,
                    c.witness.cost()
                );
                continue;
            }
            let mut key = c.sequence.clone();
            key.sort_unstable();
            if seen.insert(key) {
                pool.push(c.clone());
            }
        }
        let next = state.remaining.clone();
        iterations.push(IterationLog {
            index: i,
            offered,
            stage_one: state,
            candidates,
        });
        offered = next;
    }

    let best = pool
        .iter()
        .fold(None::<&Candidate>, |best, c| match best {
            Some(b) if b.value >= c.value => Some(b),
            _ => Some(c),
        })
        .cloned();
    let (sequence, value, witness) = match best {
        Some(c) => (c.sequence, c.value, c.witness),
        None => {
            if iterations.first().map_or(true, |it| it.stage_one.x.is_empty()) {
                warn!("no item fits the relaxed budget {relaxed}; returning the empty selection");
            }
            (Vec::new(), 0.0, cost.empty_witness())
        }
    };
    let solution = Solution {
        algorithm: Algorithm::Ours,
        sequence,
        value,
        cost: witness.cost(),
        budget: instance.budget(),
        witness,
        f_calls: objective.calls() - f0,
        rho_calls: cost.calls() - r0,
        rho_cache_hits: cost.cache_hits() - h0,
        candidates: pool.len(),
        trace,
    };
    Ok(RunLog {
        screened_out,
        iterations,
        solution,
    })
}

/// USM on `X_i`, then on each prefix left after popping the last item of `Y_i`.
fn stage_two(instance: &Instance, iteration: usize, state: &StageOneState) -> Result<Vec<Candidate>> {
    let full = state.x.len();
    let shortest = state.within_budget_len();
    let mut out = Vec::with_capacity(state.y.len() + 1);
    // stripped prefixes first, then the full sequence
    for len in (shortest..full).rev().chain(std::iter::once(full)) {
        out.push(candidate_from_prefix(instance, iteration, state, len)?);
    }
    Ok(out)
}

fn candidate_from_prefix(
    instance: &Instance,
    iteration: usize,
    state: &StageOneState,
    len: usize,
) -> Result<Candidate> {
    let cost = instance.cost();
    let prefix = &state.x[..len];
    let (sequence, value) = if prefix.is_empty() {
        (Vec::new(), state.empty_value)
    } else {
        let r = deterministic_usm(prefix, instance.objective())?;
        (r.items, r.value)
    };
    let witness = match state.prefix_witness(len) {
        _ if sequence.is_empty() => cost.empty_witness(),
        Some(w) if sequence.len() == len => w.clone(),
        Some(w) => cost.candidate_cost(&sequence, w)?,
        None => unreachable!("nonempty USM output from an empty prefix"),
    };
    Ok(Candidate {
        iteration,
        prefix_len: len,
        sequence,
        value,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Tabulated;

    fn modular(weights: &[f64]) -> ObjectiveOracle {
        let w = weights.to_vec();
        ObjectiveOracle::new(Tabulated::from_fn(w.len(), move |s| s.iter().map(|&i| w[i]).sum()).unwrap())
    }

    fn counting_cost(n: usize) -> CostOracle {
        let table = (0..1u64 << n).map(|m| m.count_ones() as f64).collect();
        CostOracle::tabulated(n, table).unwrap()
    }

    #[test]
    fn default_k_values() {
        assert_eq!(default_k(1), 1);
        assert_eq!(default_k(100), 10);
        assert_eq!(default_k(45), 7);
        assert_eq!(default_k(20), 5);
        for n in 1..2000 {
            let k = default_k(n);
            assert!(k * k >= n && (k - 1) * (k - 1) < n, "n={n}");
        }
    }

    #[test]
    fn modular_everything_fits() {
        let inst = Instance::new(modular(&[1.0, 2.0, 3.0, 4.0]), counting_cost(4), 10.0, 0.0, Some(2)).unwrap();
        let s = solve(&inst).unwrap();
        assert_eq!(s.items(), vec![0, 1, 2, 3]);
        assert_eq!(s.value, 10.0);
        assert_eq!(s.cost, 4.0);
    }

    #[test]
    fn nothing_fits() {
        let inst = Instance::new(modular(&[1.0, 2.0]), counting_cost(2), 0.5, 0.0, None).unwrap();
        let s = solve(&inst).unwrap();
        assert!(s.sequence.is_empty());
        assert_eq!((s.value, s.cost, s.candidates), (0.0, 0.0, 0));
    }

    #[test]
    fn theta_must_cover_declared_factor() {
        use crate::routing::{CostKind, PointSet};
        let p = PointSet::new(vec![[1.0, 0.0]], [0.0, 0.0], 1.0).unwrap();
        let heuristic = CostOracle::tsp(CostKind::TspMstDouble, p).unwrap();
        assert!(Instance::new(modular(&[1.0]), heuristic.fork(), 1.0, 0.5, None).is_err());
        assert!(Instance::new(modular(&[1.0]), heuristic, 1.0, 1.0, None).is_ok());
    }

    #[test]
    fn trace_format() {
        let inst = Instance::new(modular(&[1.0, 4.0, 2.0]), counting_cost(3), 1.0, 1.0, Some(1)).unwrap();
        let s = solve(&inst).unwrap();
        assert_eq!(s.trace[0], "iter 1 | item 1 | gain 4 | cost 1 | over_budget 0");
        assert_eq!(s.trace[1], "iter 1 | item 2 | gain 2 | cost 2 | over_budget 1");
        assert_eq!(s.trace[2], "iter 1 | prefix_len 1 | value 4");
        assert_eq!(s.trace[3], "iter 1 | prefix_len 2 | value 6");
        assert_eq!(s.items(), vec![1, 2]);
        assert!(s.over_budget_ratio() <= inst.theta());
    }
}
