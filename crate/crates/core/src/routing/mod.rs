//! Routing-based cost oracles: visiting costs plus a tour or tree cost.
//!
//! [`CostOracle`] answers `rho(S)` for a fixed network and cost kind. Raw
//! values are memoized by canonical set in a cache shared between forks;
//! every call is counted, and cache hits are counted separately. The
//! running-max clamp that keeps heuristic costs monotone along one greedy
//! chain lives in [`CostChain`], never in the shared cache.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::set;

mod steiner;
mod tsp;
mod witness;

pub use steiner::{
    all_subset_steiner_costs, exact_steiner, kmb_steiner, WeightedGraph, MAX_EXACT_STEINER_VERTICES,
    ROOT,
};
pub use tsp::{all_subset_tour_lengths, exact_tsp, mst_double_tsp, two_opt_improve, PointSet, MAX_EXACT_TSP};
pub use witness::{Route, RouteWitness};

/// Absolute slack used when comparing costs.
const COST_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostKind {
    TspExact,
    TspMstDouble,
    /// MST doubling followed by 2-opt.
    TspTwoOpt,
    SteinerExact,
    SteinerKmb,
    Tabulated,
}

impl CostKind {
    pub fn is_exact(self) -> bool {
        matches!(self, CostKind::TspExact | CostKind::SteinerExact | CostKind::Tabulated)
    }

    pub fn is_tsp(self) -> bool {
        matches!(self, CostKind::TspExact | CostKind::TspMstDouble | CostKind::TspTwoOpt)
    }

    pub fn is_steiner(self) -> bool {
        matches!(self, CostKind::SteinerExact | CostKind::SteinerKmb)
    }

    /// Declared approximation factor `1 + theta`.
    pub fn default_guarantee(self) -> f64 {
        if self.is_exact() {
            1.0
        } else {
            2.0
        }
    }

    pub const ALL: [CostKind; 6] = [
        CostKind::TspExact,
        CostKind::TspMstDouble,
        CostKind::TspTwoOpt,
        CostKind::SteinerExact,
        CostKind::SteinerKmb,
        CostKind::Tabulated,
    ];
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostKind::TspExact => "tsp-exact",
            CostKind::TspMstDouble => "tsp-mst-double",
            CostKind::TspTwoOpt => "tsp-two-opt",
            CostKind::SteinerExact => "steiner-exact",
            CostKind::SteinerKmb => "steiner-kmb",
            CostKind::Tabulated => "tabulated",
        })
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CostKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::param(format!("unknown cost oracle `{s}`")))
    }
}

/// Geometry behind a cost oracle.
#[derive(Debug, Clone)]
pub enum Network {
    Points(Arc<PointSet>),
    Graph(Arc<WeightedGraph>),
    /// Route cost per item bitmask, `2^n` entries, entry 0 must be 0.
    Table { n: usize, routes: Arc<Vec<f64>> },
}

impl Network {
    pub fn item_count(&self) -> usize {
        match self {
            Network::Points(p) => p.len(),
            Network::Graph(g) => g.item_count(),
            Network::Table { n, .. } => *n,
        }
    }
}

/// Largest ground set a tabulated cost accepts.
pub const MAX_TABULATED_COST: usize = 20;

type Cache = Mutex<HashMap<Vec<usize>, RouteWitness>>;

#[derive(Debug)]
pub struct CostOracle {
    kind: CostKind,
    network: Network,
    visiting: Arc<Vec<f64>>,
    c_min: f64,
    guarantee: f64,
    /// Two-opt oracles switch to Held-Karp at or below this many items.
    exact_below: usize,
    cache: Arc<Cache>,
    calls: AtomicU64,
    cache_hits: AtomicU64,
}

impl CostOracle {
    fn build(kind: CostKind, network: Network) -> Self {
        let n = network.item_count();
        Self {
            kind,
            network,
            visiting: Arc::new(vec![0.0; n]),
            c_min: 0.0,
            guarantee: kind.default_guarantee(),
            exact_below: 0,
            cache: Arc::default(),
            calls: AtomicU64::new(0),
            cache_hits: AtomicU64::new(0),
        }
    }

    pub fn tsp(kind: CostKind, points: PointSet) -> Result<Self> {
        if !kind.is_tsp() {
            return Err(Error::param(format!("{kind} is not a tour oracle")));
        }
        Ok(Self::build(kind, Network::Points(Arc::new(points))))
    }

    pub fn steiner(kind: CostKind, graph: WeightedGraph) -> Result<Self> {
        if !kind.is_steiner() {
            return Err(Error::param(format!("{kind} is not a tree oracle")));
        }
        Ok(Self::build(kind, Network::Graph(Arc::new(graph))))
    }

    /// Exact oracle over an explicit route-cost table.
    pub fn tabulated(n: usize, routes: Vec<f64>) -> Result<Self> {
        if n > MAX_TABULATED_COST {
            return Err(Error::TooLarge {
                what: "tabulated cost",
                size: n,
                limit: MAX_TABULATED_COST,
            });
        }
        if routes.len() != 1 << n {
            return Err(Error::param(format!("cost table needs {} entries, got {}", 1u64 << n, routes.len())));
        }
        if routes[0] != 0.0 || routes.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return Err(Error::param("cost table must be finite, nonnegative and zero at the empty set"));
        }
        Ok(Self::build(CostKind::Tabulated, Network::Table { n, routes: Arc::new(routes) }))
    }

    /// Per-item visiting costs; resets the cache.
    pub fn with_visiting(mut self, visiting: Vec<f64>) -> Result<Self> {
        let n = self.ground_size();
        if visiting.len() != n {
            return Err(Error::param(format!("expected {n} visiting costs, got {}", visiting.len())));
        }
        if visiting.iter().any(|&c| !(c >= 0.0 && c.is_finite())) {
            return Err(Error::param("visiting costs must be finite and nonnegative"));
        }
        self.c_min = visiting.iter().copied().fold(f64::INFINITY, f64::min);
        if !self.c_min.is_finite() {
            self.c_min = 0.0;
        }
        self.visiting = Arc::new(visiting);
        self.cache = Arc::default();
        Ok(self)
    }

    /// Use Held-Karp for sets of at most `limit` items (two-opt kind only).
    pub fn with_exact_below(mut self, limit: usize) -> Self {
        self.exact_below = limit.min(MAX_EXACT_TSP);
        self.cache = Arc::default();
        self
    }

    /// Overrides the declared factor `1 + theta`.
    pub fn with_guarantee_factor(mut self, factor: f64) -> Result<Self> {
        if !(factor >= 1.0 && factor.is_finite()) {
            return Err(Error::param(format!("guarantee factor must be >= 1, got {factor}")));
        }
        self.guarantee = factor;
        Ok(self)
    }

    /// Same network and cache, fresh counters.
    pub fn fork(&self) -> Self {
        Self {
            kind: self.kind,
            network: self.network.clone(),
            visiting: Arc::clone(&self.visiting),
            c_min: self.c_min,
            guarantee: self.guarantee,
            exact_below: self.exact_below,
            cache: Arc::clone(&self.cache),
            calls: AtomicU64::new(0),
            cache_hits: AtomicU64::new(0),
        }
    }

    /// Exact oracle over the same network and visiting costs.
    pub fn exact_twin(&self) -> Self {
        let kind = match self.kind {
            k if k.is_tsp() => CostKind::TspExact,
            k if k.is_steiner() => CostKind::SteinerExact,
            _ => CostKind::Tabulated,
        };
        self.twin(kind).expect("exact kind matches the network")
    }

    /// Oracle of another kind over the same network and visiting costs,
    /// with that kind's default guarantee. Shares the cache only when the
    /// kind is unchanged.
    pub fn twin(&self, kind: CostKind) -> Result<Self> {
        let compatible = match self.network {
            Network::Points(_) => kind.is_tsp(),
            Network::Graph(_) => kind.is_steiner(),
            Network::Table { .. } => kind == CostKind::Tabulated,
        };
        if !compatible {
            return Err(Error::param(format!("{kind} does not fit a {} network", self.kind)));
        }
        if kind == self.kind {
            return Ok(self.fork());
        }
        Ok(Self {
            visiting: Arc::clone(&self.visiting),
            c_min: self.c_min,
            exact_below: self.exact_below,
            ..Self::build(kind, self.network.clone())
        })
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn ground_size(&self) -> usize {
        self.network.item_count()
    }

    pub fn visiting_costs(&self) -> &[f64] {
        &self.visiting
    }

    /// Smallest visiting cost, 0 for an empty ground set.
    pub fn c_min(&self) -> f64 {
        self.c_min
    }

    pub fn guarantee_factor(&self) -> f64 {
        self.guarantee
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits.load(Ordering::Relaxed)
    }

    fn visiting_sum(&self, items: &[usize]) -> f64 {
        items.iter().map(|&i| self.visiting[i]).sum()
    }

    fn compute(&self, items: &[usize]) -> Result<RouteWitness> {
        let mut w = match (&self.network, self.kind) {
            (Network::Points(p), CostKind::TspExact) => exact_tsp(p, items)?,
            (Network::Points(p), CostKind::TspMstDouble) => mst_double_tsp(p, items)?,
            (Network::Points(p), CostKind::TspTwoOpt) => {
                if items.len() <= self.exact_below {
                    exact_tsp(p, items)?
                } else {
                    two_opt_improve(&mst_double_tsp(p, items)?, p)
                }
            }
            (Network::Graph(g), CostKind::SteinerExact) => exact_steiner(g, items)?,
            (Network::Graph(g), CostKind::SteinerKmb) => kmb_steiner(g, items)?,
            (Network::Table { routes, .. }, CostKind::Tabulated) => RouteWitness {
                route: Route::Listed(items.to_vec()),
                travel: routes[set::to_mask(items) as usize],
                visiting: 0.0,
            },
            (_, kind) => unreachable!("{kind} paired with the wrong network"),
        };
        w.visiting = self.visiting_sum(items);
        Ok(w)
    }

    /// Route for the empty set. Not counted.
    pub fn empty_witness(&self) -> RouteWitness {
        match self.network {
            Network::Points(_) => RouteWitness::empty_tour(),
            Network::Graph(_) => RouteWitness::empty_tree(),
            Network::Table { .. } => RouteWitness {
                route: Route::Listed(Vec::new()),
                travel: 0.0,
                visiting: 0.0,
            },
        }
    }

    /// `rho(S)` with its witness. Counts one logical call.
    pub fn route_cost(&self, items: &[usize]) -> Result<RouteWitness> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let key = set::canonical(items, self.ground_size())?;
        if key.is_empty() {
            return Ok(self.empty_witness());
        }
        if let Some(w) = self.cache.lock().expect("cost cache poisoned").get(&key) {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(w.clone());
        }
        let w = self.compute(&key)?;
        self.cache
            .lock()
            .expect("cost cache poisoned")
            .insert(key, w.clone());
        Ok(w)
    }

    /// Scalar shorthand for [`route_cost`](Self::route_cost).
    pub fn cost(&self, items: &[usize]) -> Result<f64> {
        Ok(self.route_cost(items)?.cost())
    }

    /// `rho(S + x) - rho(S)`, clamped below at `c_min`. Two calls.
    pub fn marginal_cost(&self, items: &[usize], x: usize) -> Result<f64> {
        let n = self.ground_size();
        if x >= n {
            return Err(Error::ItemOutOfRange { item: x, n });
        }
        let base = set::canonical(items, n)?;
        if base.binary_search(&x).is_ok() {
            return Err(Error::AlreadyInSet { item: x });
        }
        let with = set::with_item(&base, x);
        let diff = self.cost(&with)? - self.cost(&base)?;
        Ok(diff.max(self.c_min))
    }

    /// Witness for `subset` cut out of a witness for a superset: tours are
    /// shortcut, trees pruned. `None` for tabulated costs. Not counted.
    pub fn restrict(&self, witness: &RouteWitness, subset: &[usize]) -> Result<Option<RouteWitness>> {
        let subset = set::canonical(subset, self.ground_size())?;
        let visiting = self.visiting_sum(&subset);
        Ok(match (&witness.route, &self.network) {
            (Route::Tour(order), Network::Points(p)) => {
                let kept: Vec<usize> = order.iter().copied().filter(|i| subset.binary_search(i).is_ok()).collect();
                if kept.len() != subset.len() {
                    return Err(Error::param("restriction target is not covered by the tour"));
                }
                Some(RouteWitness {
                    travel: p.travel_rate() * p.tour_length(&kept),
                    route: Route::Tour(kept),
                    visiting,
                })
            }
            (Route::Tree(edges), Network::Graph(g)) => {
                let mut terminals: Vec<usize> = subset.iter().map(|&i| WeightedGraph::item_vertex(i)).collect();
                terminals.push(ROOT);
                let pruned = if subset.is_empty() {
                    Vec::new()
                } else {
                    steiner::prune_leaves(edges.clone(), &terminals)
                };
                Some(RouteWitness {
                    travel: g.tree_weight(&pruned)?,
                    route: Route::Tree(pruned),
                    visiting,
                })
            }
            _ => None,
        })
    }

    /// Cost of a candidate drawn from a superset with known witness: the
    /// cheaper of a fresh evaluation and the restricted superset route.
    pub fn candidate_cost(&self, subset: &[usize], superset: &RouteWitness) -> Result<RouteWitness> {
        let fresh = self.route_cost(subset)?;
        Ok(match self.restrict(superset, subset)? {
            Some(cut) if cut.cost() < fresh.cost() => cut,
            _ => fresh,
        })
    }

    /// Checks that `witness` covers exactly `items` (plus depot or root)
    /// and re-costs to its own total within `1e-9`.
    pub fn validate_witness(&self, items: &[usize], witness: &RouteWitness) -> Result<()> {
        let items = set::canonical(items, self.ground_size())?;
        let fail = |msg: String| Err(Error::param(format!("invalid witness: {msg}")));
        let visiting = self.visiting_sum(&items);
        if (witness.visiting - visiting).abs() > COST_EPS {
            return fail(format!("visiting {} but items sum to {visiting}", witness.visiting));
        }
        match (&witness.route, &self.network) {
            (Route::Tour(order), Network::Points(p)) => {
                let mut sorted = order.clone();
                sorted.sort_unstable();
                if sorted != items {
                    return fail(format!("tour visits {order:?}, expected {items:?}"));
                }
                let travel = p.travel_rate() * p.tour_length(order);
                if (travel - witness.travel).abs() > COST_EPS {
                    return fail(format!("tour re-costs to {travel}, reported {}", witness.travel));
                }
            }
            (Route::Tree(edges), Network::Graph(g)) => {
                let travel = g.tree_weight(edges)?;
                if (travel - witness.travel).abs() > COST_EPS {
                    return fail(format!("tree re-costs to {travel}, reported {}", witness.travel));
                }
                if !tree_spans(g.vertex_count(), edges, &items) {
                    return fail(format!("tree does not connect the root to {items:?}"));
                }
            }
            (Route::Listed(listed), Network::Table { routes, .. }) => {
                if *listed != items {
                    return fail(format!("listed {listed:?}, expected {items:?}"));
                }
                let travel = routes[set::to_mask(&items) as usize];
                if (travel - witness.travel).abs() > COST_EPS {
                    return fail(format!("table holds {travel}, reported {}", witness.travel));
                }
            }
            _ => return fail("route type does not match the network".into()),
        }
        Ok(())
    }

    /// Exact `rho` for every subset, indexed by bitmask. Uncounted.
    ///
    /// Only exact kinds qualify; heuristics would need one call per subset
    /// and are better served by [`route_cost`](Self::route_cost).
    pub fn all_subset_costs(&self) -> Result<Vec<f64>> {
        let n = self.ground_size();
        let routes: Vec<f64> = match (&self.network, self.kind) {
            (Network::Points(p), CostKind::TspExact) => {
                let all: Vec<usize> = (0..n).collect();
                all_subset_tour_lengths(p, &all)?
                    .into_iter()
                    .map(|len| len * p.travel_rate())
                    .collect()
            }
            (Network::Graph(g), CostKind::SteinerExact) => all_subset_steiner_costs(g)?,
            (Network::Table { routes, .. }, CostKind::Tabulated) => routes.to_vec(),
            (_, kind) => return Err(Error::param(format!("{kind} has no exact subset table"))),
        };
        let mut out = routes;
        for (mask, value) in out.iter_mut().enumerate() {
            *value += self.visiting_sum(&set::from_mask(mask as u64));
        }
        Ok(out)
    }
}

fn tree_spans(n_vertices: usize, edges: &[(usize, usize)], items: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..n_vertices).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(u, v) in edges {
        if u >= n_vertices || v >= n_vertices {
            return false;
        }
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let root = find(&mut parent, ROOT);
    items
        .iter()
        .all(|&i| find(&mut parent, WeightedGraph::item_vertex(i)) == root)
}

/// One evaluation along a nested greedy chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainProbe {
    /// `max(raw, previous + c_min)`; what admission decisions see.
    pub reported: f64,
    /// Unclamped route for the probed set.
    pub witness: RouteWitness,
}

impl ChainProbe {
    pub fn raw(&self) -> f64 {
        self.witness.cost()
    }

    pub fn clamped(&self) -> bool {
        self.reported > self.raw()
    }
}

/// Running-max clamp over a chain `X_0 = {} ⊂ X_1 ⊂ ...` of nested sets.
///
/// Exact oracles already satisfy `rho(X + x) >= rho(X) + c_min`, so the
/// clamp only ever moves heuristic values.
#[derive(Debug, Clone)]
pub struct CostChain {
    last: f64,
    c_min: f64,
}

impl CostChain {
    pub fn new(oracle: &CostOracle) -> Self {
        Self {
            last: 0.0,
            c_min: oracle.c_min(),
        }
    }

    /// Reported cost of the last committed set.
    pub fn last(&self) -> f64 {
        self.last
    }

    /// Evaluates the next set of the chain without committing it.
    pub fn probe(&self, oracle: &CostOracle, items: &[usize]) -> Result<ChainProbe> {
        let witness = oracle.route_cost(items)?;
        let reported = witness.cost().max(self.last + self.c_min);
        Ok(ChainProbe { reported, witness })
    }

    pub fn commit(&mut self, probe: &ChainProbe) {
        self.last = probe.reported;
    }
}
