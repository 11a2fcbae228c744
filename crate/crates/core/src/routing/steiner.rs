//! Multicast trees rooted at vertex 0 of an undirected weighted graph.
//!
//! Item `i` of the ground set lives on vertex `i + 1`.

use std::collections::BTreeSet;

use super::witness::{Route, RouteWitness};
use crate::error::{Error, Result};
use crate::set;

pub const ROOT: usize = 0;

/// Largest graph handed to the exact Steiner solver.
pub const MAX_EXACT_STEINER_VERTICES: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    adj: Vec<f64>,
    dist: Vec<f64>,
    next: Vec<usize>,
}

impl WeightedGraph {
    /// `edges` are 0-based `(u, v, weight)`; parallel edges keep the lighter one.
    pub fn new(n_vertices: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n_vertices < 1 {
            return Err(Error::param("graph needs at least the root vertex"));
        }
        let n = n_vertices;
        let mut adj = vec![f64::INFINITY; n * n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!("edge ({u}, {v}) names a missing vertex")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop on vertex {u}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::param(format!("edge ({u}, {v}) has non-positive weight {w}")));
            }
            if w < adj[u * n + v] {
                adj[u * n + v] = w;
                adj[v * n + u] = w;
            }
        }
        let mut dist = adj.clone();
        let mut next = vec![usize::MAX; n * n];
        for u in 0..n {
            dist[u * n + u] = 0.0;
            next[u * n + u] = u;
            for v in 0..n {
                if adj[u * n + v].is_finite() {
                    next[u * n + v] = v;
                }
            }
        }
        for k in 0..n {
            for u in 0..n {
                let duk = dist[u * n + k];
                if !duk.is_finite() {
                    continue;
                }
                for v in 0..n {
                    let cand = duk + dist[k * n + v];
                    if cand < dist[u * n + v] {
                        dist[u * n + v] = cand;
                        next[u * n + v] = next[u * n + k];
                    }
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| !dist[ROOT * n + v].is_finite()) {
            return Err(Error::Disconnected { vertex: v });
        }
        Ok(Self { n, adj, dist, next })
    }

    /// Complete graph with `weight(u, v)` on every pair `u < v`.
    pub fn complete(n_vertices: usize, mut weight: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut edges = Vec::with_capacity(n_vertices * n_vertices.saturating_sub(1) / 2);
        for u in 0..n_vertices {
            for v in u + 1..n_vertices {
                edges.push((u, v, weight(u, v)));
            }
        }
        Self::new(n_vertices, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of ground-set items (all non-root vertices).
    pub fn item_count(&self) -> usize {
        self.n - 1
    }

    pub fn item_vertex(item: usize) -> usize {
        item + 1
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let w = self.adj[u * self.n + v];
        w.is_finite().then_some(w)
    }

    /// All edges `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if let Some(w) = self.weight(u, v) {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n + v]
    }

    /// Vertices of the stored shortest path from `u` to `v`, inclusive.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let mut out = vec![u];
        let mut cur = u;
        while cur != v {
            cur = self.next[cur * self.n + v];
            out.push(cur);
        }
        out
    }

    /// Sum of edge weights; errors if an edge is missing from the graph.
    pub fn tree_weight(&self, edges: &[(usize, usize)]) -> Result<f64> {
        edges
            .iter()
            .map(|&(u, v)| {
                self.weight(u, v)
                    .ok_or_else(|| Error::param(format!("tree edge ({u}, {v}) is not in the graph")))
            })
            .sum()
    }

    fn terminal_vertices(&self, items: &[usize]) -> Result<Vec<usize>> {
        Ok(set::canonical(items, self.item_count())?
            .into_iter()
            .map(Self::item_vertex)
            .collect())
    }

    fn add_path(&self, u: usize, v: usize, edges: &mut BTreeSet<(usize, usize)>) {
        for w in self.path(u, v).windows(2) {
            edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }

    /// Minimum spanning forest of `edges` (Kruskal, ties by `(w, u, v)`),
    /// then repeated removal of leaves outside `terminals`.
    fn clean_tree(&self, edges: BTreeSet<(usize, usize)>, terminals: &[usize]) -> Vec<(usize, usize)> {
        let mut sorted: Vec<(f64, usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| (self.adj[u * self.n + v], u, v))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut tree = Vec::new();
        for (_, u, v) in sorted {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                tree.push((u, v));
            }
        }
        prune_leaves(tree, terminals)
    }

    fn tree_witness(&self, edges: Vec<(usize, usize)>) -> RouteWitness {
        let travel = edges.iter().map(|&(u, v)| self.adj[u * self.n + v]).sum();
        RouteWitness {
            route: Route::Tree(edges),
            travel,
            visiting: 0.0,
        }
    }
}

/// Removes non-terminal leaves until none remain. Output edges are sorted.
pub(crate) fn prune_leaves(mut edges: Vec<(usize, usize)>, terminals: &[usize]) -> Vec<(usize, usize)> {
    let keep: BTreeSet<usize> = terminals.iter().copied().collect();
    loop {
        let mut degree = std::collections::BTreeMap::<usize, usize>::new();
        for &(u, v) in &edges {
            *degree.entry(u).or_default() += 1;
            *degree.entry(v).or_default() += 1;
        }
        let before = edges.len();
        edges.retain(|&(u, v)| {
            let leaf = |x: usize| degree[&x] == 1 && !keep.contains(&x);
            !(leaf(u) || leaf(v))
        });
        if edges.len() == before {
            break;
        }
    }
    edges.sort_unstable();
    edges
}

/// Kou-Markowsky-Berman 2-approximation.
///
/// MST of the metric closure over the root and the item vertices, expanded
/// into shortest paths, re-spanned and pruned of non-terminal leaves.
pub fn kmb_steiner(graph: &WeightedGraph, items: &[usize]) -> Result<RouteWitness> {
    let mut terminals = vec![ROOT];
    terminals.extend(graph.terminal_vertices(items)?);
    if terminals.len() == 1 {
        return Ok(RouteWitness::empty_tree());
    }
    let t = terminals.len();
    let mut in_tree = vec![false; t];
    let mut key = vec![f64::INFINITY; t];
    let mut parent = vec![usize::MAX; t];
    key[0] = 0.0;
    let mut expanded = BTreeSet::new();
    for _ in 0..t {
        let mut u = usize::MAX;
        for v in 0..t {
            if !in_tree[v] && (u == usize::MAX || key[v] < key[u]) {
                u = v;
            }
        }
        if !key[u].is_finite() {
            return Err(Error::Disconnected { vertex: terminals[u] });
        }
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            graph.add_path(terminals[parent[u]], terminals[u], &mut expanded);
        }
        for v in 0..t {
            let w = graph.distance(terminals[u], terminals[v]);
            if !in_tree[v] && w < key[v] {
                key[v] = w;
                parent[v] = u;
            }
        }
    }
    Ok(graph.tree_witness(graph.clean_tree(expanded, &terminals)))
}

/// Dreyfus-Wagner tables over a terminal list.
struct DreyfusWagner {
    n: usize,
    /// `best[mask * n + v]`: lightest tree spanning terminals in `mask` plus `v`.
    best: Vec<f64>,
    /// Vertex where the tree for `(mask, v)` branches.
    via: Vec<usize>,
    /// Split of `mask` at its branching vertex.
    split: Vec<usize>,
}

impl DreyfusWagner {
    fn run(graph: &WeightedGraph, terminals: &[usize]) -> Self {
        let n = graph.n;
        let m = terminals.len();
        let full = 1usize << m;
        let mut best = vec![f64::INFINITY; full * n];
        let mut via = vec![usize::MAX; full * n];
        let mut split = vec![0usize; full * n];
        for (i, &t) in terminals.iter().enumerate() {
            for v in 0..n {
                best[(1 << i) * n + v] = graph.distance(t, v);
                via[(1 << i) * n + v] = t;
            }
        }
        let mut merged = vec![f64::INFINITY; n];
        let mut merged_split = vec![0usize; n];
        for mask in 1..full {
            if mask.count_ones() < 2 {
                continue;
            }
            let low = mask & mask.wrapping_neg();
            for u in 0..n {
                merged[u] = f64::INFINITY;
                let rest = mask ^ low;
                // submasks of `mask` that contain the lowest bit, excluding `mask`
                let mut s = rest;
                loop {
                    let sub = s | low;
                    if sub != mask {
                        let cand = best[sub * n + u] + best[(mask ^ sub) * n + u];
                        if cand < merged[u] {
                            merged[u] = cand;
                            merged_split[u] = sub;
                        }
                    }
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & rest;
                }
            }
            for v in 0..n {
                let mut b = f64::INFINITY;
                let mut arg = usize::MAX;
                for u in 0..n {
                    let cand = merged[u] + graph.distance(u, v);
                    if cand < b {
                        b = cand;
                        arg = u;
                    }
                }
                best[mask * n + v] = b;
                via[mask * n + v] = arg;
                split[mask * n + arg] = merged_split[arg];
            }
        }
        Self {
            n,
            best,
            via,
            split,
        }
    }

    fn collect(&self, graph: &WeightedGraph, mask: usize, v: usize, edges: &mut BTreeSet<(usize, usize)>) {
        let u = self.via[mask * self.n + v];
        graph.add_path(u, v, edges);
        if mask.count_ones() == 1 {
            return;
        }
        let sub = self.split[mask * self.n + u];
        self.collect(graph, sub, u, edges);
        self.collect(graph, mask ^ sub, u, edges);
    }
}

fn check_exact_size(graph: &WeightedGraph) -> Result<()> {
    if graph.n > MAX_EXACT_STEINER_VERTICES {
        return Err(Error::TooLarge {
            what: "exact Steiner graph",
            size: graph.n,
            limit: MAX_EXACT_STEINER_VERTICES,
        });
    }
    Ok(())
}

/// Optimal Steiner tree spanning the root and the item vertices.
pub fn exact_steiner(graph: &WeightedGraph, items: &[usize]) -> Result<RouteWitness> {
    check_exact_size(graph)?;
    let terminals = graph.terminal_vertices(items)?;
    if terminals.is_empty() {
        return Ok(RouteWitness::empty_tree());
    }
    let dw = DreyfusWagner::run(graph, &terminals);
    let full = (1usize << terminals.len()) - 1;
    let mut edges = BTreeSet::new();
    dw.collect(graph, full, ROOT, &mut edges);
    let mut all_terminals = terminals;
    all_terminals.push(ROOT);
    let witness = graph.tree_witness(graph.clean_tree(edges, &all_terminals));
    debug_assert!((witness.travel - dw.best[full * graph.n + ROOT]).abs() < 1e-6);
    Ok(witness)
}

/// Optimal tree weight for every subset of items, indexed by item bitmask.
pub fn all_subset_steiner_costs(graph: &WeightedGraph) -> Result<Vec<f64>> {
    check_exact_size(graph)?;
    let terminals: Vec<usize> = (0..graph.item_count()).map(WeightedGraph::item_vertex).collect();
    let dw = DreyfusWagner::run(graph, &terminals);
    Ok((0..1usize << terminals.len())
        .map(|mask| if mask == 0 { 0.0 } else { dw.best[mask * graph.n + ROOT] })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive search over edge subsets: smallest-weight connected
    /// subgraph touching every terminal.
    fn brute_force_steiner(graph: &WeightedGraph, terminals: &[usize]) -> f64 {
        let edges = graph.edges();
        let mut best = f64::INFINITY;
        for mask in 0u64..1 << edges.len() {
            let chosen: Vec<_> = (0..edges.len()).filter(|&e| mask >> e & 1 == 1).collect();
            let weight: f64 = chosen.iter().map(|&e| edges[e].2).sum();
            if weight >= best {
                continue;
            }
            // union-find connectivity of terminals
            let mut parent: Vec<usize> = (0..graph.vertex_count()).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    x = p[x];
                }
                x
            }
            for &e in &chosen {
                let (a, b) = (find(&mut parent, edges[e].0), find(&mut parent, edges[e].1));
                parent[a] = b;
            }
            let r = find(&mut parent, terminals[0]);
            if terminals.iter().all(|&t| find(&mut parent, t) == r) {
                best = weight;
            }
        }
        best
    }

    fn path_graph() -> WeightedGraph {
        WeightedGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn forced_path() {
        let g = path_graph();
        let w = exact_steiner(&g, &[1]).unwrap();
        assert_eq!(w.travel, 2.0);
        assert_eq!(w.route, Route::Tree(vec![(0, 1), (1, 2)]));
        assert_eq!(kmb_steiner(&g, &[1]).unwrap().travel, 2.0);
        assert_eq!(exact_steiner(&g, &[]).unwrap().travel, 0.0);
        assert_eq!(kmb_steiner(&g, &[]).unwrap().travel, 0.0);
    }

    #[test]
    fn single_item_is_shortest_path() {
        let g = WeightedGraph::new(4, &[(0, 1, 5.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, 2.0)]).unwrap();
        assert_eq!(g.distance(0, 3), 3.0);
        assert_eq!(kmb_steiner(&g, &[2]).unwrap().travel, 3.0);
        assert_eq!(exact_steiner(&g, &[2]).unwrap().travel, 3.0);
    }

    #[test]
    fn star_needs_steiner_vertex() {
        // hub 1 connects root and leaves cheaply; direct edges are expensive
        let g = WeightedGraph::new(
            5,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (1, 3, 1.0),
                (1, 4, 1.0),
                (0, 2, 1.9),
                (2, 3, 1.9),
                (3, 4, 1.9),
            ],
        )
        .unwrap();
        let exact = exact_steiner(&g, &[1, 2, 3]).unwrap();
        assert!((exact.travel - 4.0).abs() < 1e-12);
        assert!((brute_force_steiner(&g, &[0, 2, 3, 4]) - 4.0).abs() < 1e-12);
        let kmb = kmb_steiner(&g, &[1, 2, 3]).unwrap();
        assert!(kmb.travel >= exact.travel - 1e-12);
        assert!(kmb.travel <= 2.0 * exact.travel);
    }

    #[test]
    fn dreyfus_wagner_matches_edge_enumeration() {
        let g = WeightedGraph::new(
            6,
            &[
                (0, 1, 3.0),
                (0, 2, 1.0),
                (1, 2, 1.0),
                (2, 3, 2.0),
                (1, 4, 2.0),
                (3, 4, 1.0),
                (4, 5, 3.0),
                (3, 5, 1.0),
                (0, 5, 6.0),
            ],
        )
        .unwrap();
        let table = all_subset_steiner_costs(&g).unwrap();
        for mask in 1u64..32 {
            let items = set::from_mask(mask);
            let mut terminals = vec![ROOT];
            terminals.extend(items.iter().map(|&i| i + 1));
            let brute = brute_force_steiner(&g, &terminals);
            assert!((table[mask as usize] - brute).abs() < 1e-9, "mask {mask}");
            let w = exact_steiner(&g, &items).unwrap();
            assert!((w.travel - brute).abs() < 1e-9);
            let Route::Tree(edges) = &w.route else { panic!() };
            assert!((g.tree_weight(edges).unwrap() - w.travel).abs() < 1e-12);
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        assert!(matches!(
            WeightedGraph::new(3, &[(0, 1, 1.0)]),
            Err(Error::Disconnected { vertex: 2 })
        ));
        assert!(WeightedGraph::new(2, &[(0, 1, 0.0)]).is_err());
    }

    #[test]
    fn exact_size_limit() {
        let g = WeightedGraph::complete(15, |_, _| 1.0).unwrap();
        assert!(matches!(exact_steiner(&g, &[0]), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn prune_removes_dangling_paths() {
        let edges = vec![(0, 1), (1, 2), (2, 3), (1, 4)];
        assert_eq!(prune_leaves(edges, &[0, 2]), vec![(0, 1), (1, 2)]);
    }
}
