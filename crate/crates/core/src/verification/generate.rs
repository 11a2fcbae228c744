//! Seeded random instances small enough for brute force.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::objectives::{CovarianceMatrix, ObjectiveOracle, SimilarityMatrix, Tabulated};
use crate::routing::{CostKind, CostOracle, PointSet, WeightedGraph};
use crate::set;

/// Independent stream per (purpose, seed).
pub fn rng_for(tag: &str, seed: u64) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// `n` points uniform in `[0, side]^2`, depot at the origin.
pub fn random_points(rng: &mut impl Rng, n: usize, side: f64, rate: f64) -> Result<PointSet> {
    let coords = (0..n).map(|_| [rng.gen_range(0.0..side), rng.gen_range(0.0..side)]).collect();
    PointSet::new(coords, [0.0, 0.0], rate)
}

/// Connected graph: a random spanning tree plus each other pair with
/// probability `density`. Weights drawn by `weight`.
pub fn random_graph(
    rng: &mut impl Rng,
    vertices: usize,
    density: f64,
    mut weight: impl FnMut(&mut dyn rand::RngCore) -> f64,
) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    let mut tree = std::collections::HashSet::new();
    for v in 1..vertices {
        let u = rng.gen_range(0..v);
        tree.insert((u, v));
        edges.push((u, v, weight(rng)));
    }
    for u in 0..vertices {
        for v in u + 1..vertices {
            if !tree.contains(&(u, v)) && rng.gen_bool(density) {
                edges.push((u, v, weight(rng)));
            }
        }
    }
    WeightedGraph::new(vertices, &edges)
}

/// Integer weight in `{1, 2, 3}`.
pub fn small_integer_weight(rng: &mut dyn rand::RngCore) -> f64 {
    rng.gen_range(1..=3) as f64
}

/// `A A^T / n + 0.1 I` with `A` uniform in `[-1, 1]`.
pub fn random_covariance(rng: &mut impl Rng, n: usize) -> Result<CovarianceMatrix> {
    let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = (0..n).map(|t| a[i * n + t] * a[j * n + t]).sum();
            b[i * n + j] = dot / n as f64 + if i == j { 0.1 } else { 0.0 };
        }
    }
    CovarianceMatrix::new(n, b)
}

/// Symmetric similarity with entries uniform in `[0, 1)`.
pub fn random_similarity(rng: &mut impl Rng, n: usize) -> Result<SimilarityMatrix> {
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(0.0..1.0);
            s[i * n + j] = v;
            s[j * n + i] = v;
        }
    }
    SimilarityMatrix::new(n, s)
}

/// Nonnegative submodular function as an explicit table.
///
/// Sum of a weighted graph cut, a weighted coverage function, a concave
/// function of a modular one and a modular term of either sign, shifted
/// up so the minimum is zero.
pub fn random_submodular_table(rng: &mut impl Rng, n: usize) -> Result<Tabulated> {
    let cut_w: Vec<f64> = (0..n * n)
        .map(|_| if rng.gen_bool(0.5) { rng.gen_range(0.0..1.0) } else { 0.0 })
        .collect();
    let universe = 2 * n.max(1);
    let elem_w: Vec<f64> = (0..universe).map(|_| rng.gen_range(0.0..1.0)).collect();
    let covers: Vec<u64> = (0..n)
        .map(|_| (0..universe).filter(|_| rng.gen_bool(0.3)).fold(0u64, |m, e| m | 1 << e))
        .collect();
    let conc: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let modular: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..0.5)).collect();
    let (alpha, beta, gamma) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0));
    let raw = |s: &[usize]| {
        let m = set::to_mask(s);
        let mut cut = 0.0;
        for &i in s {
            for j in 0..n {
                if m >> j & 1 == 0 {
                    cut += cut_w[i * n + j] + cut_w[j * n + i];
                }
            }
        }
        let covered = s.iter().fold(0u64, |c, &i| c | covers[i]);
        let cov: f64 = (0..universe).filter(|&e| covered >> e & 1 == 1).map(|e| elem_w[e]).sum();
        let lin: f64 = s.iter().map(|&i| conc[i]).sum();
        let md: f64 = s.iter().map(|&i| modular[i]).sum();
        alpha * cut + beta * cov + gamma * lin.sqrt() + md
    };
    let base = Tabulated::from_fn(n, raw)?;
    let shift = base.table().iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    Tabulated::new(n, base.table().iter().map(|v| v - shift).collect())
}

/// Which network backs a small instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Tour,
    Tree,
}

/// A small instance with an exact cost oracle and a nonnegative objective.
#[derive(Debug)]
pub struct SmallInstance {
    pub objective: ObjectiveOracle,
    pub cost: CostOracle,
    pub budget: f64,
}

/// Random instance over `n` items: even seeds use mutual information,
/// odd seeds a random nonnegative submodular table. Tours get visiting
/// costs in `[0.5, 1.5)`; trees have none. The budget is a uniform
/// fraction in `[0.25, 0.75)` of the cost of the whole ground set.
pub fn small_instance(family: Family, n: usize, seed: u64) -> Result<SmallInstance> {
    let mut rng = rng_for("small-instance", seed);
    let objective = if seed % 2 == 0 {
        ObjectiveOracle::mutual_information(random_covariance(&mut rng, n)?)?
    } else {
        ObjectiveOracle::new(random_submodular_table(&mut rng, n)?)
    };
    let cost = match family {
        Family::Tour => {
            let visiting = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
            CostOracle::tsp(CostKind::TspExact, random_points(&mut rng, n, 10.0, 1.0)?)?.with_visiting(visiting)?
        }
        Family::Tree => CostOracle::steiner(
            CostKind::SteinerExact,
            random_graph(&mut rng, n + 1, 0.4, |r| r.gen_range(1..=10) as f64)?,
        )?,
    };
    let all: Vec<usize> = (0..n).collect();
    let budget = rng.gen_range(0.25..0.75) * cost.exact_twin().cost(&all)?;
    Ok(SmallInstance {
        objective,
        cost,
        budget,
    })
}

/// Random subset of `0..n` containing each item with probability 1/2.
pub fn random_subset(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Random permutation of `0..n`.
pub fn random_order(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}
