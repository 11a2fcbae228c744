use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subroute::routing::{
    exact_steiner, exact_tsp, kmb_steiner, mst_double_tsp, two_opt_improve, CostKind, CostOracle, PointSet, Route,
    WeightedGraph,
};
use subroute::set;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Shortest closed tour through depot and `pts` by trying every permutation.
fn tour_by_permutation(depot: [f64; 2], pts: &[[f64; 2]]) -> f64 {
    fn go(depot: [f64; 2], pts: &[[f64; 2]], used: &mut Vec<bool>, last: [f64; 2], acc: f64, best: &mut f64) {
        if used.iter().all(|&u| u) {
            *best = best.min(acc + dist(last, depot));
            return;
        }
        for i in 0..pts.len() {
            if !used[i] {
                used[i] = true;
                go(depot, pts, used, pts[i], acc + dist(last, pts[i]), best);
                used[i] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(depot, pts, &mut vec![false; pts.len()], depot, 0.0, &mut best);
    if pts.is_empty() {
        0.0
    } else {
        best
    }
}

/// Minimum-weight connected edge subset spanning root and terminals.
fn steiner_by_edge_subsets(n_vertices: usize, edges: &[(usize, usize, f64)], terminals: &[usize]) -> f64 {
    let mut best = f64::INFINITY;
    for mask in 0u32..1 << edges.len() {
        let mut parent: Vec<usize> = (0..n_vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        let mut w = 0.0;
        for (i, &(u, v, c)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                w += c;
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
            }
        }
        let r = find(&mut parent, 0);
        if terminals.iter().all(|&t| find(&mut parent, t) == r) {
            best = best.min(w);
        }
    }
    best
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize, weights: &[f64]) -> Vec<(usize, usize, f64)> {
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.5) {
                    edges.push((u, v, weights[rng.gen_range(0..weights.len())]));
                }
            }
        }
        if WeightedGraph::new(n, &edges).is_ok() {
            return edges;
        }
    }
}

#[test]
fn single_point_tour_energy() {
    let points = PointSet::new(vec![[3.0, 4.0]], [0.0, 0.0], 1.0).unwrap();
    let oracle = CostOracle::tsp(CostKind::TspExact, points).unwrap().with_visiting(vec![1.0]).unwrap();
    assert!((oracle.cost(&[0]).unwrap() - 11.0).abs() < 1e-12);
    assert!((oracle.marginal_cost(&[], 0).unwrap() - 11.0).abs() < 1e-12);
    assert_eq!(oracle.cost(&[]).unwrap(), 0.0);
}

#[test]
fn collinear_tour_is_forced() {
    let points = PointSet::new(vec![[1.0, 0.0], [2.0, 0.0]], [0.0, 0.0], 1.0).unwrap();
    assert!((exact_tsp(&points, &[0, 1]).unwrap().travel - 4.0).abs() < 1e-12);
    assert_eq!(exact_tsp(&points, &[]).unwrap().travel, 0.0);
}

#[test]
fn tsp_oracles_against_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let m = 1 + trial % 8;
        let coords: Vec<[f64; 2]> = (0..m).map(|_| [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)]).collect();
        let points = PointSet::new(coords.clone(), [0.0, 0.0], 1.0).unwrap();
        let items: Vec<usize> = (0..m).collect();
        let brute = tour_by_permutation([0.0, 0.0], &coords);
        let exact = exact_tsp(&points, &items).unwrap();
        let mst = mst_double_tsp(&points, &items).unwrap();
        let two = two_opt_improve(&mst, &points);
        assert!((exact.travel - brute).abs() < 1e-9, "trial {trial}");
        assert!(mst.travel >= brute - 1e-9 && mst.travel <= 2.0 * brute + 1e-9, "trial {trial}");
        assert!(two.travel <= mst.travel + 1e-12);
        let mut visited = two.tour().unwrap().to_vec();
        visited.sort_unstable();
        assert_eq!(visited, items);
        if m == 1 {
            assert!((mst.travel - exact.travel).abs() < 1e-12);
        }
    }
}

#[test]
fn travel_rate_scales_tours() {
    let coords = vec![[1.0, 1.0], [4.0, 5.0], [0.0, 3.0]];
    let slow = PointSet::new(coords.clone(), [0.0, 0.0], 1.0).unwrap();
    let fast = PointSet::new(coords, [0.0, 0.0], 0.6).unwrap();
    let a = exact_tsp(&slow, &[0, 1, 2]).unwrap().travel;
    let b = exact_tsp(&fast, &[0, 1, 2]).unwrap().travel;
    assert!((b - 0.6 * a).abs() < 1e-12);
}

#[test]
fn steiner_forced_path_and_root() {
    let g = WeightedGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
    // item 1 is vertex 2
    assert!((exact_steiner(&g, &[1]).unwrap().travel - 2.0).abs() < 1e-12);
    assert!((kmb_steiner(&g, &[1]).unwrap().travel - 2.0).abs() < 1e-12);
    assert_eq!(exact_steiner(&g, &[]).unwrap().travel, 0.0);
    assert_eq!(kmb_steiner(&g, &[]).unwrap().travel, 0.0);
}

#[test]
fn kmb_single_item_is_shortest_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let edges = random_connected(&mut rng, 6, &[1.0, 2.0, 3.0, 7.0]);
        let g = WeightedGraph::new(6, &edges).unwrap();
        for item in 0..5 {
            let w = kmb_steiner(&g, &[item]).unwrap();
            assert!((w.travel - g.distance(0, item + 1)).abs() < 1e-12);
        }
    }
}

#[test]
fn steiner_oracles_against_edge_subsets() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..200 {
        let edges = random_connected(&mut rng, 6, &[1.0, 2.0, 3.0]);
        let g = WeightedGraph::new(6, &edges).unwrap();
        let items = set::from_mask(rng.gen_range(1..32u64));
        let terminals: Vec<usize> = items.iter().map(|&i| i + 1).collect();
        let brute = steiner_by_edge_subsets(6, &edges, &terminals);
        let exact = exact_steiner(&g, &items).unwrap();
        let kmb = kmb_steiner(&g, &items).unwrap();
        assert!((exact.travel - brute).abs() < 1e-9, "trial {trial}");
        assert!(exact.travel <= kmb.travel + 1e-9);
        assert!(kmb.travel <= 2.0 * exact.travel + 1e-9, "trial {trial}");
        let Route::Tree(tree) = &kmb.route else { panic!("tree expected") };
        assert!((g.tree_weight(tree).unwrap() - kmb.travel).abs() < 1e-9);
    }
}

#[test]
fn kmb_is_exact_on_unit_five_vertex_graphs() {
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
    let mut graphs = 0;
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize, f64)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &(u, v))| (u, v, 1.0))
            .collect();
        let Ok(g) = WeightedGraph::new(5, &edges) else { continue };
        graphs += 1;
        for skip in 0..4 {
            let items: Vec<usize> = (0..4).filter(|&i| i != skip).collect();
            let kmb = kmb_steiner(&g, &items).unwrap().travel;
            let exact = exact_steiner(&g, &items).unwrap().travel;
            assert!((kmb - exact).abs() < 1e-12, "edges {edges:?} items {items:?}: {kmb} vs {exact}");
        }
    }
    assert_eq!(graphs, 728);
}

#[test]
fn exact_marginals_respect_the_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let coords: Vec<[f64; 2]> = (0..7).map(|_| [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)]).collect();
        let visiting: Vec<f64> = (0..7).map(|_| rng.gen_range(0.5..1.5)).collect();
        let c_min = visiting.iter().copied().fold(f64::INFINITY, f64::min);
        let oracle = CostOracle::tsp(CostKind::TspExact, PointSet::new(coords, [0.0, 0.0], 1.0).unwrap())
            .unwrap()
            .with_visiting(visiting)
            .unwrap();
        assert_eq!(oracle.c_min(), c_min);
        for mask in 0..128u64 {
            let s = set::from_mask(mask);
            for x in (0..7).filter(|x| mask >> x & 1 == 0) {
                let mut grown = s.clone();
                grown.push(x);
                grown.sort_unstable();
                let raw = oracle.cost(&grown).unwrap() - oracle.cost(&s).unwrap();
                assert!(raw >= c_min - 1e-9);
                assert!((oracle.marginal_cost(&s, x).unwrap() - raw.max(c_min)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn marginal_cost_clamps_at_c_min() {
    // route({0, 1}) = 4 < route({0}) = 5, so the raw difference is negative
    let oracle = CostOracle::tabulated(2, vec![0.0, 5.0, 3.0, 4.0])
        .unwrap()
        .with_visiting(vec![0.25, 0.5])
        .unwrap();
    let raw = oracle.cost(&[0, 1]).unwrap() - oracle.cost(&[0]).unwrap();
    assert!((raw + 0.5).abs() < 1e-12);
    assert_eq!(oracle.marginal_cost(&[0], 1).unwrap(), 0.25);
}

#[test]
fn heuristic_witnesses_are_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let coords: Vec<[f64; 2]> = (0..20).map(|_| [rng.gen_range(0.0..30.0), rng.gen_range(0.0..30.0)]).collect();
    let oracle = CostOracle::tsp(CostKind::TspTwoOpt, PointSet::new(coords, [0.0, 0.0], 0.6).unwrap()).unwrap();
    for _ in 0..30 {
        let items = set::from_mask(rng.gen_range(0..1u64 << 20));
        let w = oracle.route_cost(&items).unwrap();
        oracle.validate_witness(&items, &w).unwrap();
    }
}
