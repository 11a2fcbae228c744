//! Multicast and point-of-interest scenario generators.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::objectives::{CovarianceMatrix, ObjectiveOracle, SimilarityMatrix};
use crate::optimizer::Instance;
use crate::routing::{CostKind, CostOracle, PointSet, WeightedGraph};
use crate::verification::generate::rng_for;

pub const POI_COUNT: usize = 45;
pub const POI_WIDTH: f64 = 35.0;
pub const POI_HEIGHT: f64 = 40.0;
pub const POI_TRAVEL_RATE: f64 = 0.6;
pub const POI_MAX_COLLECT: f64 = 2.0;
pub const POI_DEFAULT_BUDGET: f64 = 120.0;
pub const POI_KERNEL_VARIANCE: f64 = 1.0;
pub const POI_KERNEL_LENGTH: f64 = 8.0;
/// Two-opt tours switch to Held-Karp at or below this many PoIs.
pub const POI_EXACT_BELOW: usize = 15;

pub const MULTICAST_PROCESSORS: usize = 20;
pub const MULTICAST_MAX_DELAY: u32 = 200;
pub const MULTICAST_RANK: usize = 5;
pub const MULTICAST_FACTOR_SCALE: f64 = 10.0;
pub const MULTICAST_LAMBDA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Multicast,
    Poi,
}

impl Scenario {
    pub fn default_n(self) -> usize {
        match self {
            Scenario::Multicast => MULTICAST_PROCESSORS,
            Scenario::Poi => POI_COUNT,
        }
    }

    pub fn default_budgets(self) -> Vec<f64> {
        match self {
            Scenario::Multicast => vec![50.0, 100.0, 150.0, 200.0],
            Scenario::Poi => vec![100.0, 160.0, 240.0, 320.0],
        }
    }

    /// Budget for single solves.
    pub fn default_budget(self) -> f64 {
        match self {
            Scenario::Multicast => 100.0,
            Scenario::Poi => POI_DEFAULT_BUDGET,
        }
    }

    /// `theta` matching the scenario's default oracle.
    pub fn default_theta(self) -> f64 {
        1.0
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Multicast => "multicast",
            Scenario::Poi => "poi",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multicast" => Ok(Scenario::Multicast),
            "poi" => Ok(Scenario::Poi),
            _ => Err(Error::param(format!("unknown scenario `{s}` (expected multicast or poi)"))),
        }
    }
}

/// Raw data behind a scenario instance, kept for persistence and plots.
#[derive(Debug, Clone)]
pub enum ScenarioData {
    Multicast {
        graph: WeightedGraph,
        similarity: SimilarityMatrix,
        lambda: f64,
    },
    Poi {
        points: PointSet,
        collection: Vec<f64>,
        covariance: CovarianceMatrix,
    },
}

#[derive(Debug)]
pub struct ScenarioInstance {
    pub scenario: Scenario,
    pub seed: u64,
    pub data: ScenarioData,
    pub objective: ObjectiveOracle,
    pub cost: CostOracle,
}

impl ScenarioInstance {
    /// Builds the oracles for `data` with the given cost kind.
    pub fn assemble(scenario: Scenario, seed: u64, data: ScenarioData, kind: CostKind) -> Result<Self> {
        let (objective, cost) = match &data {
            ScenarioData::Multicast {
                graph,
                similarity,
                lambda,
            } => (
                ObjectiveOracle::cut_diversity(similarity.clone(), *lambda)?,
                CostOracle::steiner(kind, graph.clone())?,
            ),
            ScenarioData::Poi {
                points,
                collection,
                covariance,
            } => {
                let mut cost = CostOracle::tsp(kind, points.clone())?.with_visiting(collection.clone())?;
                if kind == CostKind::TspTwoOpt {
                    cost = cost.with_exact_below(POI_EXACT_BELOW);
                }
                (ObjectiveOracle::mutual_information(covariance.clone())?, cost)
            }
        };
        Ok(Self {
            scenario,
            seed,
            data,
            objective,
            cost,
        })
    }

    pub fn n(&self) -> usize {
        self.objective.ground_size()
    }

    /// Problem instance over forked oracles.
    pub fn instance(&self, budget: f64, theta: f64, k: Option<usize>) -> Result<Instance> {
        Instance::new(self.objective.fork(), self.cost.fork(), budget, theta, k)
    }

    /// Same data with another cost kind.
    pub fn with_oracle(&self, kind: CostKind) -> Result<Self> {
        Self::assemble(self.scenario, self.seed, self.data.clone(), kind)
    }

    /// PoI coordinates, if any.
    pub fn coordinates(&self) -> Option<(&[[f64; 2]], [f64; 2])> {
        match &self.data {
            ScenarioData::Poi { points, .. } => Some((points.coords(), points.depot())),
            ScenarioData::Multicast { .. } => None,
        }
    }
}

/// Complete graph over a user (vertex 0) and `n` processors with integer
/// delays uniform in `[1, 200]`; similarity from rank-5 nonnegative factors
/// (entries uniform in `(0, 1)`, scaled by 10); cut diversity with
/// `lambda = 1`; KMB trees; no visiting costs.
pub fn gen_multicast_instance(n: usize, seed: u64) -> Result<ScenarioInstance> {
    if n < 2 {
        return Err(Error::param("multicast scenario needs at least 2 processors"));
    }
    let mut rng = rng_for("multicast", seed);
    let graph = WeightedGraph::complete(n + 1, |_, _| rng.gen_range(1..=MULTICAST_MAX_DELAY) as f64)?;
    let factors: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..MULTICAST_RANK)
                .map(|_| open_unit(&mut rng) * MULTICAST_FACTOR_SCALE)
                .collect()
        })
        .collect();
    let similarity = SimilarityMatrix::from_features(&factors)?;
    let data = ScenarioData::Multicast {
        graph,
        similarity,
        lambda: MULTICAST_LAMBDA,
    };
    ScenarioInstance::assemble(Scenario::Multicast, seed, data, CostKind::SteinerKmb)
}

/// Uniform draw from the open interval `(0, 1)`.
fn open_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let v: f64 = rng.gen();
        if v > 0.0 {
            return v;
        }
    }
}

/// The 45-PoI scenario.
pub fn gen_poi_instance(seed: u64) -> Result<ScenarioInstance> {
    gen_poi_instance_sized(POI_COUNT, seed)
}

/// `n` PoIs uniform in the 35 x 40 area, depot at the corner `(0, 0)`,
/// travel rate 0.6, collection costs uniform in `(0, 2)`, squared-exponential
/// prior (`sigma^2 = 1`, length 8), mutual information, MST-doubling tours
/// refined by 2-opt with Held-Karp for small sets.
pub fn gen_poi_instance_sized(n: usize, seed: u64) -> Result<ScenarioInstance> {
    if n == 0 {
        return Err(Error::param("poi scenario needs at least one PoI"));
    }
    let mut rng = rng_for("poi", seed);
    let coords: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.gen_range(0.0..POI_WIDTH), rng.gen_range(0.0..POI_HEIGHT)])
        .collect();
    let collection: Vec<f64> = (0..n).map(|_| open_unit(&mut rng) * POI_MAX_COLLECT).collect();
    let covariance = CovarianceMatrix::squared_exponential(&coords, POI_KERNEL_VARIANCE, POI_KERNEL_LENGTH)?;
    let points = PointSet::new(coords, [0.0, 0.0], POI_TRAVEL_RATE)?;
    let data = ScenarioData::Poi {
        points,
        collection,
        covariance,
    };
    ScenarioInstance::assemble(Scenario::Poi, seed, data, CostKind::TspTwoOpt)
}

/// Generator for `scenario` at size `n`.
pub fn generate(scenario: Scenario, n: usize, seed: u64) -> Result<ScenarioInstance> {
    match scenario {
        Scenario::Multicast => gen_multicast_instance(n, seed),
        Scenario::Poi => gen_poi_instance_sized(n, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poi_constants() {
        let s = gen_poi_instance(3).unwrap();
        let (coords, depot) = s.coordinates().unwrap();
        assert_eq!(coords.len(), 45);
        assert_eq!(depot, [0.0, 0.0]);
        assert!(coords.iter().all(|p| (0.0..=35.0).contains(&p[0]) && (0.0..=40.0).contains(&p[1])));
        assert!(s.cost.visiting_costs().iter().all(|&c| c > 0.0 && c < 2.0));
        assert_eq!(s.cost.kind(), CostKind::TspTwoOpt);
    }

    #[test]
    fn multicast_constants() {
        let s = gen_multicast_instance(20, 5).unwrap();
        let ScenarioData::Multicast { graph, lambda, .. } = &s.data else { panic!() };
        assert_eq!(*lambda, 1.0);
        assert_eq!(graph.vertex_count(), 21);
        assert!(graph.edges().iter().all(|&(_, _, w)| (1.0..=200.0).contains(&w) && w.fract() == 0.0));
        assert_eq!(graph.edges().len(), 21 * 20 / 2);
        assert_eq!(s.cost.c_min(), 0.0);
    }

    #[test]
    fn generation_is_a_function_of_the_seed() {
        let a = gen_poi_instance(9).unwrap();
        let b = gen_poi_instance(9).unwrap();
        assert_eq!(a.coordinates(), b.coordinates());
        assert_ne!(a.coordinates(), gen_poi_instance(10).unwrap().coordinates());
    }
}
