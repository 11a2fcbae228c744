//! Brute-force and sampled submodularity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ObjectiveOracle;
use crate::error::Result;
use crate::set;
use crate::verification::{CheckRow, VerificationReport, TOLERANCE};

/// How [`check_submodularity`] chooses the pairs it tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubmodularityMode {
    /// Every pair `(A, B)` of subsets. Ground set must have at most 20 items.
    Exhaustive,
    /// `trials` random draws, each testing one pair `(A, B)` and one
    /// diminishing-returns triple `A ⊆ B`, `x ∉ B`.
    Sampled { trials: usize, seed: u64 },
}

const MAX_EXHAUSTIVE: usize = 20;
const MAX_ROWS: usize = 1000;

/// Checks `f(A ∪ B) + f(A ∩ B) <= f(A) + f(B)` (and its marginal-gain form)
/// up to an absolute tolerance of `1e-9`. Sets on which the objective is
/// undefined are skipped.
pub fn check_submodularity(
    oracle: &ObjectiveOracle,
    mode: SubmodularityMode,
) -> Result<VerificationReport> {
    let n = oracle.ground_size();
    let mut report = VerificationReport::new(format!("submodularity[{}]", oracle.kind()));
    match mode {
        SubmodularityMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE {
                return Err(crate::Error::TooLarge {
                    what: "exhaustive submodularity ground set",
                    size: n,
                    limit: MAX_EXHAUSTIVE,
                });
            }
            let table: Vec<f64> = (0..1u64 << n)
                .map(|m| oracle.eval_or_neg_inf(&set::from_mask(m)))
                .collect::<Result<_>>()?;
            let size = table.len();
            for a in 0..size {
                for b in a + 1..size {
                    let quad = [table[a], table[b], table[a | b], table[a & b]];
                    if quad.iter().any(|v| !v.is_finite()) {
                        report.skipped += 1;
                        continue;
                    }
                    pair_row(&mut report, a as u64, b as u64, quad);
                }
            }
        }
        SubmodularityMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let a: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
                let b: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
                let to_mask = |v: &[bool]| {
                    set::to_mask(&v.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect::<Vec<_>>())
                };
                let (ma, mb) = (to_mask(&a), to_mask(&b));
                let eval = |m: u64| oracle.eval_or_neg_inf(&set::from_mask(m));
                let quad = [eval(ma)?, eval(mb)?, eval(ma | mb)?, eval(ma & mb)?];
                if quad.iter().all(|v| v.is_finite()) {
                    pair_row(&mut report, ma, mb, quad);
                } else {
                    report.skipped += 1;
                }

                // diminishing returns: A ⊆ B, x ∉ B
                let outside: Vec<usize> = (0..n).filter(|&i| !b[i]).collect();
                if outside.is_empty() {
                    report.skipped += 1;
                    continue;
                }
                let x = outside[rng.gen_range(0..outside.len())];
                let small = ma & mb;
                let bit = 1u64 << x;
                let vals = [eval(small)?, eval(small | bit)?, eval(mb)?, eval(mb | bit)?];
                if vals.iter().any(|v| !v.is_finite()) {
                    report.skipped += 1;
                    continue;
                }
                let gain_small = vals[1] - vals[0];
                let gain_large = vals[3] - vals[2];
                report.checked += 1;
                if gain_large > gain_small + TOLERANCE {
                    push_row(
                        &mut report,
                        CheckRow::failed(
                            None,
                            gain_large,
                            gain_small,
                            vec![set::from_mask(small), set::from_mask(mb), vec![x]],
                        ),
                    );
                }
            }
        }
    }
    Ok(report)
}

fn pair_row(report: &mut VerificationReport, a: u64, b: u64, quad: [f64; 4]) {
    let lhs = quad[2] + quad[3];
    let rhs = quad[0] + quad[1];
    report.checked += 1;
    if lhs > rhs + TOLERANCE {
        push_row(
            report,
            CheckRow::failed(None, lhs, rhs, vec![set::from_mask(a), set::from_mask(b)]),
        );
    }
}

fn push_row(report: &mut VerificationReport, row: CheckRow) {
    if report.rows.len() < MAX_ROWS {
        report.rows.push(row);
    } else {
        report.truncated += 1;
    }
}
