//! Closed depot tours over points in the plane.
//!
//! Every function here returns travel energy only (`rate * length`); the
//! cost oracle adds visiting costs on top.

use super::witness::{Route, RouteWitness};
use crate::error::{Error, Result};
use crate::set;

/// Largest item set handed to the Held-Karp solver.
pub const MAX_EXACT_TSP: usize = 15;

/// Improvement threshold for 2-opt moves.
const TWO_OPT_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<[f64; 2]>,
    depot: [f64; 2],
    travel_rate: f64,
}

impl PointSet {
    pub fn new(coords: Vec<[f64; 2]>, depot: [f64; 2], travel_rate: f64) -> Result<Self> {
        if !(travel_rate > 0.0 && travel_rate.is_finite()) {
            return Err(Error::param(format!("travel rate must be positive, got {travel_rate}")));
        }
        if coords.iter().chain(std::iter::once(&depot)).flatten().any(|v| !v.is_finite()) {
            return Err(Error::param("point coordinates must be finite"));
        }
        Ok(Self {
            coords,
            depot,
            travel_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn depot(&self) -> [f64; 2] {
        self.depot
    }

    pub fn travel_rate(&self) -> f64 {
        self.travel_rate
    }

    fn pos(&self, stop: Option<usize>) -> [f64; 2] {
        stop.map_or(self.depot, |i| self.coords[i])
    }

    /// Euclidean distance; `None` is the depot.
    pub fn distance(&self, a: Option<usize>, b: Option<usize>) -> f64 {
        let (p, q) = (self.pos(a), self.pos(b));
        (p[0] - q[0]).hypot(p[1] - q[1])
    }

    /// Length of depot -> order -> depot.
    pub fn tour_length(&self, order: &[usize]) -> f64 {
        let mut prev = None;
        let mut total = 0.0;
        for &i in order {
            total += self.distance(prev, Some(i));
            prev = Some(i);
        }
        total + self.distance(prev, None)
    }

    fn tour_witness(&self, order: Vec<usize>) -> RouteWitness {
        RouteWitness {
            travel: self.travel_rate * self.tour_length(&order),
            route: Route::Tour(order),
            visiting: 0.0,
        }
    }

    fn checked(&self, items: &[usize]) -> Result<Vec<usize>> {
        set::canonical(items, self.len())
    }
}

/// Path-DP table over `items`: `dp[mask * m + j]` is the shortest path
/// from the depot through `mask` ending at `items[j]`.
struct HeldKarp {
    m: usize,
    dp: Vec<f64>,
    parent: Vec<u8>,
}

impl HeldKarp {
    fn run(points: &PointSet, items: &[usize]) -> Self {
        let m = items.len();
        let full = 1usize << m;
        let d: Vec<f64> = items
            .iter()
            .flat_map(|&a| items.iter().map(move |&b| (a, b)))
            .map(|(a, b)| points.distance(Some(a), Some(b)))
            .collect();
        let mut dp = vec![f64::INFINITY; full * m];
        let mut parent = vec![u8::MAX; full * m];
        for j in 0..m {
            dp[(1 << j) * m + j] = points.distance(None, Some(items[j]));
        }
        for mask in 1..full {
            if mask.count_ones() < 2 {
                continue;
            }
            let mut js = mask;
            while js != 0 {
                let j = js.trailing_zeros() as usize;
                js &= js - 1;
                let prev = mask ^ (1 << j);
                let mut best = f64::INFINITY;
                let mut arg = u8::MAX;
                let mut is = prev;
                while is != 0 {
                    let i = is.trailing_zeros() as usize;
                    is &= is - 1;
                    let cand = dp[prev * m + i] + d[i * m + j];
                    if cand < best {
                        best = cand;
                        arg = i as u8;
                    }
                }
                dp[mask * m + j] = best;
                parent[mask * m + j] = arg;
            }
        }
        Self { m, dp, parent }
    }

    fn closing(&self, points: &PointSet, items: &[usize], mask: usize) -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for j in 0..self.m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let cand = self.dp[mask * self.m + j] + points.distance(Some(items[j]), None);
            if cand < best {
                best = cand;
                arg = j;
            }
        }
        (best, arg)
    }

    fn order(&self, items: &[usize], mut mask: usize, mut last: usize) -> Vec<usize> {
        let mut rev = Vec::with_capacity(mask.count_ones() as usize);
        loop {
            rev.push(items[last]);
            let p = self.parent[mask * self.m + last];
            mask ^= 1 << last;
            if mask == 0 {
                break;
            }
            last = p as usize;
        }
        rev.reverse();
        rev
    }
}

/// Optimal closed tour through `items` by bitmask dynamic programming.
pub fn exact_tsp(points: &PointSet, items: &[usize]) -> Result<RouteWitness> {
    let items = points.checked(items)?;
    if items.len() > MAX_EXACT_TSP {
        return Err(Error::TooLarge {
            what: "exact TSP item set (use a heuristic oracle)",
            size: items.len(),
            limit: MAX_EXACT_TSP,
        });
    }
    if items.is_empty() {
        return Ok(RouteWitness::empty_tour());
    }
    let hk = HeldKarp::run(points, &items);
    let full = (1usize << items.len()) - 1;
    let (_, last) = hk.closing(points, &items, full);
    Ok(points.tour_witness(hk.order(&items, full, last)))
}

/// Optimal tour *lengths* (not energies) for every subset of `items`,
/// indexed by bitmask over positions in `items`.
pub fn all_subset_tour_lengths(points: &PointSet, items: &[usize]) -> Result<Vec<f64>> {
    let items = points.checked(items)?;
    if items.len() > MAX_EXACT_TSP {
        return Err(Error::TooLarge {
            what: "exact TSP item set",
            size: items.len(),
            limit: MAX_EXACT_TSP,
        });
    }
    let hk = HeldKarp::run(points, &items);
    Ok((0..1usize << items.len())
        .map(|mask| if mask == 0 { 0.0 } else { hk.closing(points, &items, mask).0 })
        .collect())
}

/// Preorder walk of a minimum spanning tree over the depot and `items`.
///
/// Prim's algorithm rooted at the depot; ties go to the lowest index and
/// children are visited in ascending item order.
pub fn mst_double_tsp(points: &PointSet, items: &[usize]) -> Result<RouteWitness> {
    let items = points.checked(items)?;
    let m = items.len();
    if m == 0 {
        return Ok(RouteWitness::empty_tour());
    }
    // vertex 0 is the depot, vertex k >= 1 is items[k - 1]
    let stop = |v: usize| if v == 0 { None } else { Some(items[v - 1]) };
    let mut in_tree = vec![false; m + 1];
    let mut key = vec![f64::INFINITY; m + 1];
    let mut parent = vec![usize::MAX; m + 1];
    key[0] = 0.0;
    let mut children = vec![Vec::new(); m + 1];
    for _ in 0..=m {
        let mut u = usize::MAX;
        for v in 0..=m {
            if !in_tree[v] && (u == usize::MAX || key[v] < key[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            children[parent[u]].push(u);
        }
        for v in 0..=m {
            if !in_tree[v] {
                let w = points.distance(stop(u), stop(v));
                if w < key[v] {
                    key[v] = w;
                    parent[v] = u;
                }
            }
        }
    }
    let mut order = Vec::with_capacity(m);
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        if u != 0 {
            order.push(items[u - 1]);
        }
        children[u].sort_unstable();
        stack.extend(children[u].iter().rev());
    }
    Ok(points.tour_witness(order))
}

/// First-improvement 2-opt with the depot pinned at both ends.
///
/// Never increases the tour length and keeps the visited multiset.
/// Non-tour witnesses are returned unchanged.
pub fn two_opt_improve(witness: &RouteWitness, points: &PointSet) -> RouteWitness {
    let Route::Tour(order) = &witness.route else {
        return witness.clone();
    };
    let m = order.len();
    let mut tour: Vec<Option<usize>> = Vec::with_capacity(m + 2);
    tour.push(None);
    tour.extend(order.iter().map(|&i| Some(i)));
    tour.push(None);
    let d = |a: Option<usize>, b: Option<usize>| points.distance(a, b);
    let mut improved = true;
    while improved {
        improved = false;
        for i in 1..m {
            for j in i + 1..=m {
                let delta = d(tour[i - 1], tour[j]) + d(tour[i], tour[j + 1])
                    - d(tour[i - 1], tour[i])
                    - d(tour[j], tour[j + 1]);
                if delta < -TWO_OPT_EPS {
                    tour[i..=j].reverse();
                    improved = true;
                }
            }
        }
    }
    let new_order: Vec<usize> = tour[1..=m].iter().map(|s| s.expect("interior stop")).collect();
    let improved = points.tour_witness(new_order);
    if improved.travel <= witness.travel {
        RouteWitness {
            visiting: witness.visiting,
            ..improved
        }
    } else {
        witness.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[[f64; 2]], rate: f64) -> PointSet {
        PointSet::new(coords.to_vec(), [0.0, 0.0], rate).unwrap()
    }

    /// Enumerates all permutations of `items`.
    fn brute_force_length(points: &PointSet, items: &[usize]) -> f64 {
        fn rec(points: &PointSet, rest: &mut Vec<usize>, order: &mut Vec<usize>, best: &mut f64) {
            if rest.is_empty() {
                *best = best.min(points.tour_length(order));
                return;
            }
            for k in 0..rest.len() {
                let x = rest.remove(k);
                order.push(x);
                rec(points, rest, order, best);
                order.pop();
                rest.insert(k, x);
            }
        }
        let mut best = f64::INFINITY;
        rec(points, &mut items.to_vec(), &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn single_point_out_and_back() {
        let p = pts(&[[3.0, 4.0]], 1.0);
        let w = exact_tsp(&p, &[0]).unwrap();
        assert_eq!(w.travel, 10.0);
        assert_eq!(mst_double_tsp(&p, &[0]).unwrap(), w);
        assert_eq!(exact_tsp(&p, &[]).unwrap().travel, 0.0);
        assert_eq!(mst_double_tsp(&p, &[]).unwrap().travel, 0.0);
    }

    #[test]
    fn collinear_forced_tour() {
        let p = pts(&[[1.0, 0.0], [2.0, 0.0]], 1.0);
        let w = exact_tsp(&p, &[0, 1]).unwrap();
        assert!((w.travel - 4.0).abs() < 1e-12);
        let p = pts(&[[1.0, 0.0], [2.0, 0.0]], 0.6);
        assert!((exact_tsp(&p, &[0, 1]).unwrap().travel - 2.4).abs() < 1e-12);
    }

    #[test]
    fn held_karp_matches_permutation_search() {
        let p = pts(
            &[[5.0, 1.0], [2.0, 7.0], [9.0, 3.0], [4.0, 4.0], [8.0, 8.0], [1.0, 2.0], [6.5, 0.5]],
            1.0,
        );
        let all: Vec<usize> = (0..7).collect();
        let w = exact_tsp(&p, &all).unwrap();
        assert!((w.travel - brute_force_length(&p, &all)).abs() < 1e-9);
        let table = all_subset_tour_lengths(&p, &all).unwrap();
        for mask in [0b1u64, 0b101, 0b1110, 0b1010101, 0b1111111] {
            let sub = crate::set::from_mask(mask);
            assert!((table[mask as usize] - brute_force_length(&p, &sub)).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_rejects_large_sets() {
        let coords: Vec<[f64; 2]> = (0..16).map(|i| [i as f64, 0.0]).collect();
        let p = pts(&coords, 1.0);
        let all: Vec<usize> = (0..16).collect();
        assert!(matches!(exact_tsp(&p, &all), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn two_opt_uncrosses_square() {
        // depot (0,0), then (1,1), (0,1), (1,0): crossing diagonals
        let p = pts(&[[1.0, 1.0], [0.0, 1.0], [1.0, 0.0]], 1.0);
        let crossing = p.tour_witness(vec![0, 1, 2]);
        let crossing_len = 2f64.sqrt() + 1.0 + 2f64.sqrt() + 1.0;
        assert!((crossing.travel - crossing_len).abs() < 1e-12);
        let better = two_opt_improve(&crossing, &p);
        assert!(better.travel < crossing.travel - 1e-9);
        assert!((better.travel - 4.0).abs() < 1e-12);
        let mut visited = better.tour().unwrap().to_vec();
        visited.sort_unstable();
        assert_eq!(visited, vec![0, 1, 2]);
    }

    #[test]
    fn two_opt_keeps_optimal_triangle() {
        let p = pts(&[[3.0, 0.0], [0.0, 4.0]], 1.0);
        let w = exact_tsp(&p, &[0, 1]).unwrap();
        assert_eq!(two_opt_improve(&w, &p).travel, w.travel);
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::new(vec![[0.0, 0.0]], [0.0, 0.0], 0.0).is_err());
        assert!(PointSet::new(vec![[f64::NAN, 0.0]], [0.0, 0.0], 1.0).is_err());
    }
}
