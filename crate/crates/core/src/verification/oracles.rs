//! Routing-oracle envelopes and the objective submodularity suite.

use rand::Rng;
use rayon::prelude::*;

use super::generate::{
    random_covariance, random_graph, random_points, random_similarity, random_subset, rng_for,
    small_integer_weight,
};
use super::report::{CheckRow, VerificationReport, TOLERANCE};
use crate::error::Result;
use crate::objectives::{check_submodularity, ObjectiveOracle, SubmodularityMode};
use crate::routing::{
    exact_steiner, exact_tsp, kmb_steiner, mst_double_tsp, two_opt_improve, CostOracle, RouteWitness,
};
use crate::set;

fn merge_rows(reports: &mut [VerificationReport], per_seed: Vec<Vec<CheckRow>>) {
    for rows in per_seed {
        for (report, row) in reports.iter_mut().zip(rows) {
            report.record(row);
        }
    }
}

fn sorted_tour(w: &RouteWitness) -> Vec<usize> {
    let mut v = w.tour().unwrap_or_default().to_vec();
    v.sort_unstable();
    v
}

/// KMB within twice the optimal tree, MST doubling within twice the
/// optimal tour, 2-opt never worse than its input tour.
///
/// Graphs have 2 to 10 vertices (weights in `{1, 2, 3}` on even seeds,
/// uniform in `[1, 10)` on odd seeds); point sets have 1 to 12 points.
pub fn check_routing_envelopes(seeds: &[u64]) -> Result<Vec<VerificationReport>> {
    let mut reports = vec![
        VerificationReport::new("kmb-envelope"),
        VerificationReport::new("mst-double-envelope"),
        VerificationReport::new("two-opt-no-worse"),
    ];
    let per_seed = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<CheckRow>> {
            let mut rng = rng_for("envelope", seed);
            let vertices = rng.gen_range(2..=10);
            let graph = if seed % 2 == 0 {
                random_graph(&mut rng, vertices, 0.4, small_integer_weight)?
            } else {
                random_graph(&mut rng, vertices, 0.4, |r| r.gen_range(1.0..10.0))?
            };
            let mut terminals = random_subset(&mut rng, vertices - 1);
            if terminals.is_empty() {
                terminals.push(0);
            }
            let exact = exact_steiner(&graph, &terminals)?.travel;
            let kmb = kmb_steiner(&graph, &terminals)?.travel;
            let kmb_row = CheckRow::new(
                Some(seed),
                exact <= kmb + TOLERANCE && kmb <= 2.0 * exact + TOLERANCE,
                kmb,
                2.0 * exact,
            )
            .with_witness(vec![terminals]);

            let m = rng.gen_range(1..=12);
            let points = random_points(&mut rng, m, 10.0, 1.0)?;
            let all: Vec<usize> = (0..m).collect();
            let opt = exact_tsp(&points, &all)?.travel;
            let mst = mst_double_tsp(&points, &all)?;
            let mst_row = CheckRow::new(
                Some(seed),
                opt <= mst.travel + TOLERANCE && mst.travel <= 2.0 * opt + TOLERANCE,
                mst.travel,
                2.0 * opt,
            );
            let improved = two_opt_improve(&mst, &points);
            let two_opt_row = CheckRow::new(
                Some(seed),
                improved.travel <= mst.travel + TOLERANCE && sorted_tour(&improved) == all,
                improved.travel,
                mst.travel,
            );
            Ok(vec![kmb_row, mst_row, two_opt_row])
        })
        .collect::<Result<Vec<_>>>()?;
    merge_rows(&mut reports, per_seed);
    Ok(reports)
}

/// Audit of one cost oracle: envelope against the exact twin, witness
/// validity, and monotonicity with the `c_min` gradient.
///
/// Ground sets of at most 12 items are enumerated; larger ones use
/// `samples` random `(S, x)` pairs. Monotonicity failures of heuristic
/// kinds are reported as notes (the solver's chain clamp absorbs them);
/// for exact kinds they are violations.
pub fn audit_cost_oracle(oracle: &CostOracle, samples: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let n = oracle.ground_size();
    let exact = oracle.exact_twin();
    let factor = oracle.guarantee_factor();
    let kind = oracle.kind();
    let mut envelope = VerificationReport::new(format!("envelope[{kind}]"));
    let mut validity = VerificationReport::new(format!("witness-validity[{kind}]"));
    let mut monotone = VerificationReport::new(format!("monotone-gradient[{kind}]"));

    let pairs: Vec<(Vec<usize>, usize)> = if n <= 12 {
        (0..1u64 << n)
            .flat_map(|m| (0..n).filter(move |&x| m >> x & 1 == 0).map(move |x| (set::from_mask(m), x)))
            .collect()
    } else {
        let mut rng = rng_for("audit", seed);
        (0..samples)
            .filter_map(|_| {
                let s = random_subset(&mut rng, n);
                let out: Vec<usize> = (0..n).filter(|x| s.binary_search(x).is_err()).collect();
                (!out.is_empty()).then(|| {
                    let x = out[rng.gen_range(0..out.len())];
                    (s, x)
                })
            })
            .collect()
    };
    let exact_limit_ok = |items: &[usize]| !(kind.is_tsp() && items.len() > crate::routing::MAX_EXACT_TSP)
        && !(kind.is_steiner() && n + 1 > crate::routing::MAX_EXACT_STEINER_VERTICES);

    let mut seen = std::collections::HashSet::new();
    let mut heuristic_drops = 0usize;
    for (s, x) in &pairs {
        let grown = set::with_item(s, *x);
        for items in [s, &grown] {
            if !seen.insert(items.clone()) {
                continue;
            }
            let w = oracle.route_cost(items)?;
            let ok = oracle.validate_witness(items, &w).is_ok();
            validity.record(CheckRow::new(Some(seed), ok, w.cost(), w.cost()).with_witness(vec![items.clone()]));
            if exact_limit_ok(items) {
                let e = exact.cost(items)?;
                envelope.record(
                    CheckRow::new(
                        Some(seed),
                        e <= w.cost() + TOLERANCE && w.cost() <= factor * e + TOLERANCE,
                        w.cost(),
                        factor * e,
                    )
                    .with_witness(vec![items.clone()]),
                );
            }
        }
        let diff = oracle.cost(&grown)? - oracle.cost(s)?;
        let ok = diff >= oracle.c_min() - TOLERANCE;
        if kind.is_exact() {
            monotone.record(CheckRow::new(Some(seed), ok, diff, oracle.c_min()).with_witness(vec![s.clone(), vec![*x]]));
        } else if !ok {
            heuristic_drops += 1;
        }
    }
    if heuristic_drops > 0 {
        monotone.notes.push(format!(
            "{heuristic_drops} of {} nested pairs grew by less than c_min; the chain clamp covers these",
            pairs.len()
        ));
    }
    if envelope.checked == 0 {
        envelope.skip("no set small enough for the exact solver");
    }
    Ok(vec![envelope, validity, monotone])
}

/// Exhaustive submodularity at `n = 6` for every shipped objective over
/// `seeds`, plus the symmetry of mutual information.
pub fn check_objective_suite(seeds: &[u64], n: usize) -> Result<Vec<VerificationReport>> {
    let names = [
        "submodular-cut-diversity-0.5",
        "submodular-cut-diversity-1",
        "submodular-summarization-diversity",
        "submodular-mutual-information",
        "mutual-information-symmetry",
    ];
    let per_seed = seeds
        .par_iter()
        .map(|&seed| -> Result<Vec<VerificationReport>> {
            let mut rng = rng_for("objectives", seed);
            let sim = random_similarity(&mut rng, n)?;
            let dist = random_similarity(&mut rng, n)?;
            let cov = random_covariance(&mut rng, n)?;
            let oracles = [
                ObjectiveOracle::cut_diversity(sim.clone(), 0.5)?,
                ObjectiveOracle::cut_diversity(sim, 1.0)?,
                ObjectiveOracle::summarization_diversity(dist),
                ObjectiveOracle::mutual_information(cov)?,
            ];
            let mut out = Vec::new();
            for (name, oracle) in names.iter().zip(&oracles) {
                let mut r = check_submodularity(oracle, SubmodularityMode::Exhaustive)?;
                r.property = name.to_string();
                for row in &mut r.rows {
                    row.seed = Some(seed);
                }
                out.push(r);
            }
            let mi = &oracles[3];
            let mut sym = VerificationReport::new(names[4]);
            for mask in 0..1u64 << n {
                let s = set::from_mask(mask);
                let (a, b) = (mi.eval(&s)?, mi.eval(&set::complement(&s, n))?);
                sym.checked += 1;
                if (a - b).abs() > TOLERANCE {
                    sym.rows.push(CheckRow::failed(Some(seed), a, b, vec![s]));
                }
            }
            out.push(sym);
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut reports: Vec<VerificationReport> = names.iter().map(|p| VerificationReport::new(*p)).collect();
    for group in per_seed {
        for (acc, r) in reports.iter_mut().zip(group) {
            acc.merge(r);
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::{CostKind, PointSet};

    #[test]
    fn envelopes_hold_on_a_few_seeds() {
        let seeds: Vec<u64> = (0..20).collect();
        for r in check_routing_envelopes(&seeds).unwrap() {
            assert!(r.passed(), "{}", r.to_text());
            assert_eq!(r.checked, 20);
        }
    }

    #[test]
    fn objective_suite_passes() {
        for r in check_objective_suite(&[1, 2], 5).unwrap() {
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn audit_of_exact_and_heuristic_tours() {
        let mut rng = rng_for("audit-test", 0);
        let points: PointSet = random_points(&mut rng, 7, 10.0, 0.6).unwrap();
        let visiting: Vec<f64> = (0..7).map(|i| 0.2 + i as f64 * 0.1).collect();
        for kind in [CostKind::TspExact, CostKind::TspMstDouble, CostKind::TspTwoOpt] {
            let o = CostOracle::tsp(kind, points.clone()).unwrap().with_visiting(visiting.clone()).unwrap();
            for r in audit_cost_oracle(&o, 0, 0).unwrap() {
                assert!(r.passed(), "{}", r.to_text());
            }
        }
    }
}
