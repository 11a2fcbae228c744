use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subroute::baselines::{rand_baseline, rmax_baseline};
use subroute::objectives::{ObjectiveOracle, Tabulated};
use subroute::optimizer::{default_k, deterministic_usm, solve, solve_detailed, stage_one, Algorithm, Instance};
use subroute::routing::{CostKind, CostOracle, PointSet};
use subroute::set;
use subroute::verification::{best_feasible, bicriterion_ratio, brute_force_opt, compute_k_parameter, exact_cost_table};

fn modular(weights: &[f64]) -> ObjectiveOracle {
    let w = weights.to_vec();
    ObjectiveOracle::new(Tabulated::from_fn(w.len(), move |s| s.iter().map(|&i| w[i]).sum()).unwrap())
}

/// Cost |S| with no route part: every item costs exactly 1.
fn unit_costs(n: usize) -> CostOracle {
    CostOracle::tabulated(n, vec![0.0; 1 << n]).unwrap().with_visiting(vec![1.0; n]).unwrap()
}

fn random_tour_instance(seed: u64, n: usize, theta: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)]).collect();
    let visiting: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let cost = CostOracle::tsp(CostKind::TspExact, PointSet::new(coords, [0.0, 0.0], 1.0).unwrap())
        .unwrap()
        .with_visiting(visiting)
        .unwrap();
    // directed cut plus a small modular bonus: nonnegative, nonmonotone, submodular
    let w: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.3)).collect();
    let f = Tabulated::from_fn(n, move |s| {
        let mut v = 0.0;
        for &i in s {
            for j in (0..n).filter(|j| !s.contains(j)) {
                v += w[i * n + j];
            }
            v += p[i];
        }
        v
    })
    .unwrap();
    let all: Vec<usize> = (0..n).collect();
    let budget = rng.gen_range(0.3..0.7) * cost.cost(&all).unwrap();
    Instance::new(ObjectiveOracle::new(f), cost, budget, theta, None).unwrap()
}

#[test]
fn default_k_values() {
    assert_eq!(default_k(1), 1);
    assert_eq!(default_k(100), 10);
    assert_eq!(default_k(45), 7);
    assert_eq!(default_k(2), 2);
}

#[test]
fn usm_singleton_and_modular() {
    let f = modular(&[2.0, 0.5, 3.0, 1.0]);
    let r = deterministic_usm(&[2], &f).unwrap();
    assert_eq!(r.items, vec![2]);
    assert_eq!(r.evaluations, 4);
    let r = deterministic_usm(&[3, 0, 1, 2], &f).unwrap();
    assert_eq!(r.items, vec![3, 0, 1, 2]);
    assert!((r.value - 6.5).abs() < 1e-12);
    assert_eq!(r.evaluations, 2 + 2 * 4);
}

#[test]
fn usm_drops_harmful_items() {
    // f = modular with one negative weight; USM keeps only the positive items
    let f = modular(&[1.0, -2.0, 1.0]);
    let r = deterministic_usm(&[0, 1, 2], &f).unwrap();
    assert_eq!(r.items, vec![0, 2]);
}

#[test]
fn stage_one_identical_costs() {
    // c = 2, (1 + theta) c = 3: three admitted, the third over c
    let f = modular(&[5.0, 4.0, 3.0, 2.0, 1.0]);
    let st = stage_one(&f, &unit_costs(5), &[0, 1, 2, 3, 4], 2.0, 3.0).unwrap();
    assert_eq!(st.x, vec![0, 1, 2]);
    assert_eq!(st.y, vec![2]);
    assert_eq!(st.within_budget_len(), 2);

    let empty = stage_one(&f, &unit_costs(5), &[], 2.0, 3.0).unwrap();
    assert!(empty.x.is_empty() && empty.y.is_empty());
}

#[test]
fn budget_below_every_singleton() {
    let inst = Instance::new(modular(&[1.0, 2.0, 3.0]), unit_costs(3), 0.4, 0.5, None).unwrap();
    for sol in [solve(&inst).unwrap(), rand_baseline(&inst, 1).unwrap(), rmax_baseline(&inst).unwrap()] {
        assert!(sol.sequence.is_empty(), "{}", sol.algorithm);
        assert_eq!(sol.value, 0.0);
        assert_eq!(sol.cost, 0.0);
    }
}

#[test]
fn everything_fits_with_modular_objective() {
    let inst = Instance::new(modular(&[1.0, 2.0, 3.0, 0.5]), unit_costs(4), 10.0, 0.0, None).unwrap();
    let sol = solve(&inst).unwrap();
    assert_eq!(sol.items(), vec![0, 1, 2, 3]);
    assert!((sol.value - 6.5).abs() < 1e-12);
    // greedy order: descending weight
    assert_eq!(sol.sequence, vec![2, 1, 0, 3]);
    let r = rand_baseline(&inst, 99).unwrap();
    assert_eq!(r.items(), vec![0, 1, 2, 3]);
}

#[test]
fn rmax_takes_descending_weights_until_the_budget() {
    let inst = Instance::new(modular(&[1.0, 4.0, 2.0, 5.0, 3.0]), unit_costs(5), 3.0, 1.0, None).unwrap();
    let sol = rmax_baseline(&inst).unwrap();
    assert_eq!(sol.sequence, vec![3, 1, 4]);
    assert!(sol.cost <= 3.0);
    assert_eq!(sol.over_budget_ratio(), 0.0);
}

#[test]
fn rmax_stops_on_negative_gains() {
    let inst = Instance::new(modular(&[-1.0, -0.5]), unit_costs(2), 5.0, 0.0, None).unwrap();
    let sol = rmax_baseline(&inst).unwrap();
    assert!(sol.sequence.is_empty());
    assert_eq!(sol.value, 0.0);
}

#[test]
fn rand_is_deterministic_per_seed() {
    let inst = random_tour_instance(4, 8, 0.0);
    let a = rand_baseline(&inst.fork(), 17).unwrap();
    let b = rand_baseline(&inst.fork(), 17).unwrap();
    assert_eq!(a.sequence, b.sequence);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.cost.to_bits(), b.cost.to_bits());
    assert_eq!(a.f_calls, b.f_calls);
}

#[test]
fn solve_is_deterministic() {
    let inst = random_tour_instance(6, 8, 0.3);
    let a = solve(&inst.fork()).unwrap();
    let b = solve(&inst.fork()).unwrap();
    assert_eq!(a.sequence, b.sequence);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!((a.f_calls, a.rho_calls), (b.f_calls, b.rho_calls));
    assert_eq!(a.trace, b.trace);
}

#[test]
fn brute_force_dominates_feasible_solves() {
    for seed in 0..40 {
        // theta = 0 with the exact oracle keeps every output within c
        let inst = random_tour_instance(seed, 8, 0.0);
        let sol = solve(&inst).unwrap();
        let (_, opt) = brute_force_opt(&inst).unwrap();
        assert!(sol.cost <= inst.budget() + 1e-9, "seed {seed}");
        assert!(opt >= sol.value - 1e-9, "seed {seed}");
        let k = compute_k_parameter(&inst).unwrap();
        assert!((1..inst.n()).contains(&k), "seed {seed}: k = {k}");
        let k_inst = inst.with_k(k).unwrap();
        let sol = solve(&k_inst).unwrap();
        assert!(sol.value >= bicriterion_ratio(k) * opt - 1e-9, "seed {seed}");
    }
}

#[test]
fn solution_accounting() {
    for seed in 0..10 {
        let inst = random_tour_instance(seed, 8, 0.5);
        let log = solve_detailed(&inst).unwrap();
        let sol = &log.solution;
        assert!((sol.witness.cost() - sol.cost).abs() < 1e-12);
        assert!(sol.cost <= inst.relaxed_budget() + 1e-9);
        assert!((inst.objective().eval(&sol.items()).unwrap() - sol.value).abs() < 1e-9);
        inst.cost().validate_witness(&sol.items(), &sol.witness).unwrap();
        assert!(log.iterations.len() <= inst.k());
        let (k, n) = (inst.k() as u64, inst.n() as u64);
        assert!(sol.f_calls <= 3 * k * n * n);
        assert!(sol.rho_calls <= 3 * k * n);
        assert_eq!(sol.algorithm, Algorithm::Ours);
    }
}

#[test]
fn best_feasible_with_zero_budget_is_empty() {
    let f = modular(&[1.0, 2.0, 3.0]);
    let costs = exact_cost_table(&unit_costs(3)).unwrap();
    let values: Vec<f64> = (0..8u64).map(|m| f.eval(&set::from_mask(m)).unwrap()).collect();
    assert_eq!(best_feasible(&values, &costs, 0.0), (vec![], 0.0));
    assert_eq!(best_feasible(&values, &costs, 2.0), (vec![1, 2], 5.0));
}

#[test]
fn symmetric_budget_has_k_one() {
    // every base has exactly three unit-cost items
    let inst = Instance::new(modular(&[1.0; 6]), unit_costs(6), 3.0, 0.0, None).unwrap();
    assert_eq!(compute_k_parameter(&inst).unwrap(), 1);
}

#[test]
fn unlimited_budget_cut_optimum() {
    // cut of the path 0-1-2-3: best is alternate vertices, value 3
    let edges = [(0, 1), (1, 2), (2, 3)];
    let f = Tabulated::from_fn(4, move |s| {
        edges.iter().filter(|(a, b)| s.contains(a) != s.contains(b)).count() as f64
    })
    .unwrap();
    let inst = Instance::new(ObjectiveOracle::new(f), unit_costs(4), 100.0, 0.0, None).unwrap();
    let (items, v) = brute_force_opt(&inst).unwrap();
    assert_eq!(v, 3.0);
    assert_eq!(items, vec![0, 2]);
}
