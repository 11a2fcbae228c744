//! Deterministic double greedy for unconstrained submodular maximization.

use crate::error::Result;
use crate::objectives::ObjectiveOracle;

#[derive(Debug, Clone, PartialEq)]
pub struct UsmResult {
    /// Kept items, in input order.
    pub items: Vec<usize>,
    pub value: f64,
    /// Objective evaluations spent by this pass.
    pub evaluations: u64,
}

/// One pass over `order`: grow `X` from the empty set and shrink `Y` from
/// the full input, keeping `u` when `f(X+u) - f(X) >= f(Y-u) - f(Y)`.
///
/// Costs `2 + 2|order|` evaluations. Sets where the objective is undefined
/// count as `-inf`.
pub fn deterministic_usm(order: &[usize], objective: &ObjectiveOracle) -> Result<UsmResult> {
    let before = objective.calls();
    let mut x: Vec<usize> = Vec::with_capacity(order.len());
    let mut y: Vec<usize> = order.to_vec();
    let mut fx = objective.eval_or_neg_inf(&x)?;
    let mut fy = objective.eval_or_neg_inf(&y)?;
    for &u in order {
        x.push(u);
        let fx_plus = objective.eval_or_neg_inf(&x)?;
        x.pop();
        let pos = y.iter().position(|&v| v == u).expect("u is still in Y");
        y.remove(pos);
        let fy_minus = objective.eval_or_neg_inf(&y)?;
        let a = fx_plus - fx;
        let b = fy_minus - fy;
        if a >= b {
            x.push(u);
            fx = fx_plus;
            y.insert(pos, u);
        } else {
            fy = fy_minus;
        }
    }
    debug_assert_eq!(x, y);
    Ok(UsmResult {
        items: x,
        value: fx,
        evaluations: objective.calls() - before,
    })
}
