//! Exact maximum-volume disjoint subcollection.
//!
//! The problem is maximum-weight independent set on the intersection graph
//! with body volumes as weights. The graph is split into connected
//! components; complete components are answered directly and the rest are
//! solved by branch-and-bound on 64-bit vertex masks, so the size cap applies
//! per component.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{union_volume, Collection, UnionConfig, VolumeEstimate};

/// Hard upper limit of the bitmask search.
pub const MAX_COMPONENT: usize = 64;

/// Memory guard for the oracle's intersection graph.
pub const MAX_EDGES: usize = 10_000_000;

/// Relative tolerance under which two subcollection volumes are tied.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionGraph {
    pub n: usize,
    /// Sorted neighbour lists; no self loops.
    pub neighbors: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
}

impl IntersectionGraph {
    pub fn new(c: &Collection) -> Self {
        Self::with_edge_limit(c, usize::MAX).expect("unbounded edge budget")
    }

    /// Fails with a resource error once more than `max_edges` edges are found.
    pub fn with_edge_limit(c: &Collection, max_edges: usize) -> Result<Self> {
        let b = c.bodies();
        let n = b.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut edges = 0usize;
        for i in 0..n {
            for j in i + 1..n {
                if b[i].intersects(&b[j]) {
                    edges += 1;
                    if edges > max_edges {
                        return Err(Error::ResourceLimit(format!(
                            "intersection graph exceeds {max_edges} edges"
                        )));
                    }
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                }
            }
        }
        Ok(IntersectionGraph {
            n,
            neighbors,
            weights: b.iter().map(|x| x.volume()).collect(),
        })
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| {
                self.neighbors[i]
                    .iter()
                    .filter(move |&&j| j > i)
                    .map(move |&j| (i, j))
            })
            .collect()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(k, &i)| set[k + 1..].iter().all(|&j| !self.is_adjacent(i, j)))
    }

    /// Connected components of the subgraph induced by `allowed`, each
    /// listed in increasing index order.
    fn components(&self, allowed: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] || !allowed[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut k = 0;
            while k < comp.len() {
                let v = comp[k];
                k += 1;
                for &u in &self.neighbors[v] {
                    if allowed[u] && !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Exact optimum for one collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub chosen: Vec<usize>,
    pub selected_volume: f64,
    pub union_volume: VolumeEstimate,
    pub delta: f64,
    pub nodes_explored: u64,
    pub proven_optimal: bool,
}

/// Maximum-weight independent set of a graph restricted to `allowed`
/// vertices. Returns the lexicographically smallest optimal index set,
/// its weight and the number of search nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentSet {
    pub vertices: Vec<usize>,
    pub weight: f64,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oracle {
    /// Largest connected component the search accepts.
    pub cap: usize,
    pub union: UnionConfig,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            cap: MAX_COMPONENT,
            union: UnionConfig::default(),
        }
    }
}

impl Oracle {
    pub fn with_cap(cap: usize) -> Result<Self> {
        if cap == 0 || cap > MAX_COMPONENT {
            return Err(Error::InvalidParameter(format!(
                "oracle cap must be in 1..={MAX_COMPONENT}, got {cap}"
            )));
        }
        Ok(Oracle {
            cap,
            ..Oracle::default()
        })
    }

    pub fn with_union(mut self, union: UnionConfig) -> Self {
        self.union = union;
        self
    }

    /// Maximum total volume of a disjoint subcollection avoiding `forbidden`.
    pub fn max_disjoint_volume(&self, c: &Collection, forbidden: &[usize]) -> Result<OracleResult> {
        let graph = IntersectionGraph::with_edge_limit(c, MAX_EDGES)?;
        let best = self.solve(&graph, &graph.weights, forbidden)?;
        let union_volume = union_volume(c, &self.union)?;
        Ok(OracleResult {
            delta: best.weight / union_volume.value,
            chosen: best.vertices,
            selected_volume: best.weight,
            union_volume,
            nodes_explored: best.nodes,
            proven_optimal: true,
        })
    }

    /// Best achievable density of a disjoint subcollection.
    pub fn delta(&self, c: &Collection) -> Result<f64> {
        Ok(self.max_disjoint_volume(c, &[])?.delta)
    }

    /// Largest number of pairwise disjoint bodies.
    pub fn independence_number(&self, c: &Collection) -> Result<usize> {
        let graph = IntersectionGraph::with_edge_limit(c, MAX_EDGES)?;
        Ok(self.solve(&graph, &vec![1.0; graph.n], &[])?.vertices.len())
    }

    /// Exact maximum-weight independent set avoiding `forbidden`.
    pub fn solve(&self, graph: &IntersectionGraph, weights: &[f64], forbidden: &[usize]) -> Result<IndependentSet> {
        let mut allowed = vec![true; graph.n];
        for &f in forbidden {
            if f >= graph.n {
                return Err(Error::InvalidParameter(format!(
                    "forbidden index {f} out of range (n = {})",
                    graph.n
                )));
            }
            allowed[f] = false;
        }
        let comps = graph.components(&allowed);
        if let Some(big) = comps.iter().find(|comp| comp.len() > self.cap && !is_clique(graph, comp)) {
            return Err(Error::InstanceTooLarge {
                size: big.len(),
                cap: self.cap,
            });
        }
        let mut vertices = Vec::new();
        let mut weight = 0.0;
        let mut nodes = 0;
        for comp in comps {
            let (set, w, n) = if is_clique(graph, &comp) {
                let best = comp
                    .iter()
                    .copied()
                    .reduce(|a, b| if weights[b] > weights[a] * (1.0 + TIE_TOL) { b } else { a })
                    .expect("non-empty component");
                (vec![best], weights[best], 1)
            } else {
                branch_and_bound(graph, weights, &comp)
            };
            vertices.extend(set);
            weight += w;
            nodes += n;
        }
        vertices.sort_unstable();
        Ok(IndependentSet {
            vertices,
            weight,
            nodes,
        })
    }
}

fn is_clique(graph: &IntersectionGraph, comp: &[usize]) -> bool {
    comp.iter().all(|&v| graph.neighbors[v].len() >= comp.len() - 1)
        && comp
            .iter()
            .enumerate()
            .all(|(k, &i)| comp[k + 1..].iter().all(|&j| graph.is_adjacent(i, j)))
}

struct Search<'a> {
    adj: Vec<u64>,
    w: &'a [f64],
    by_weight: Vec<usize>,
    best: f64,
    best_set: u64,
    tol: f64,
    nodes: u64,
}

impl Search<'_> {
    /// Weighted greedy clique cover of `cand`: each clique contributes its
    /// heaviest member, which bounds any independent set inside `cand`.
    fn bound(&self, cand: u64) -> f64 {
        let mut cliques: [u64; 64] = [0; 64];
        let mut k = 0;
        let mut total = 0.0;
        for &v in &self.by_weight {
            if cand >> v & 1 == 0 {
                continue;
            }
            match cliques[..k].iter_mut().find(|m| **m & !self.adj[v] == 0) {
                Some(m) => *m |= 1 << v,
                None => {
                    cliques[k] = 1 << v;
                    k += 1;
                    total += self.w[v];
                }
            }
        }
        total
    }

    // Branches on the lowest remaining vertex, include-first, so optimal sets
    // are met in lexicographic order and only strict improvements replace
    // the incumbent.
    fn run(&mut self, cand: u64, cur: u64, cur_w: f64) {
        self.nodes += 1;
        if cand == 0 {
            if cur_w > self.best + self.tol {
                self.best = cur_w;
                self.best_set = cur;
            }
            return;
        }
        if cur_w + self.bound(cand) <= self.best + self.tol {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        self.run(cand & !self.adj[v] & !bit, cur | bit, cur_w + self.w[v]);
        self.run(cand & !bit, cur, cur_w);
    }
}

fn branch_and_bound(graph: &IntersectionGraph, weights: &[f64], comp: &[usize]) -> (Vec<usize>, f64, u64) {
    let m = comp.len();
    debug_assert!(m <= MAX_COMPONENT);
    let local: std::collections::HashMap<usize, usize> =
        comp.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let adj: Vec<u64> = comp
        .iter()
        .map(|&v| {
            graph.neighbors[v]
                .iter()
                .filter_map(|u| local.get(u))
                .fold(0u64, |acc, &k| acc | 1 << k)
        })
        .collect();
    let w: Vec<f64> = comp.iter().map(|&v| weights[v]).collect();
    let mut by_weight: Vec<usize> = (0..m).collect();
    by_weight.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));

    // Heaviest-first greedy as a warm start, set marginally below its value
    // so that an equal-weight, lexicographically smaller set still wins.
    let mut greedy_w = 0.0;
    let mut blocked = 0u64;
    for &v in &by_weight {
        if blocked >> v & 1 == 0 {
            greedy_w += w[v];
            blocked |= adj[v] | 1 << v;
        }
    }
    let total: f64 = w.iter().sum();
    let tol = TIE_TOL * total.max(1e-300);
    let mut s = Search {
        adj,
        w: &w,
        by_weight,
        best: greedy_w - 2.0 * tol,
        best_set: 0,
        tol,
        nodes: 0,
    };
    let all = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    s.run(all, 0, 0.0);
    let set: Vec<usize> = (0..m).filter(|&k| s.best_set >> k & 1 == 1).map(|k| comp[k]).collect();
    let weight = set.iter().map(|&v| weights[v]).sum();
    (set, weight, s.nodes)
}

/// Convenience wrapper with the default oracle.
pub fn max_disjoint_volume(c: &Collection, forbidden: &[usize]) -> Result<OracleResult> {
    Oracle::default().max_disjoint_volume(c, forbidden)
}

pub fn delta(c: &Collection) -> Result<f64> {
    Oracle::default().delta(c)
}

pub fn independence_number(c: &Collection) -> Result<usize> {
    Oracle::default().independence_number(c)
}

pub fn intersection_graph(c: &Collection) -> IntersectionGraph {
    IntersectionGraph::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Body;

    fn four_squares() -> Collection {
        let sq = |x: f64, y: f64| Body::axis_box(vec![x, y], 0.5).unwrap();
        Collection::new(
            2,
            "",
            vec![sq(0.5, 0.5), sq(-0.5, 0.5), sq(-0.5, -0.5), sq(0.5, -0.5)],
        )
        .unwrap()
    }

    #[test]
    fn graph_of_four_squares_is_complete() {
        let g = intersection_graph(&four_squares());
        assert_eq!(g.edges().len(), 6);
        assert_eq!(g.weights, vec![1.0; 4]);
    }

    #[test]
    fn graph_of_three_intervals() {
        let c = Collection::intervals(&[(0.0, 1.0), (2.0, 3.1), (3.0, 4.0)]).unwrap();
        assert_eq!(intersection_graph(&c).edges(), vec![(1, 2)]);
    }

    #[test]
    fn far_balls_have_no_edges() {
        let c = Collection::new(
            2,
            "",
            vec![
                Body::ball(vec![0.0, 0.0], 1.0).unwrap(),
                Body::ball(vec![9.0, 0.0], 1.0).unwrap(),
            ],
        )
        .unwrap();
        assert!(intersection_graph(&c).edges().is_empty());
        assert_eq!(independence_number(&c).unwrap(), 2);
    }

    #[test]
    fn touching_pair_has_delta_one_half() {
        let c = Collection::intervals(&[(0.0, 1.0), (1.0, 2.0)]).unwrap();
        let r = max_disjoint_volume(&c, &[]).unwrap();
        assert_eq!(r.chosen, vec![0]);
        assert_eq!(r.delta, 0.5);
        assert!(r.proven_optimal);
    }

    #[test]
    fn three_intervals() {
        let c = Collection::intervals(&[(0.0, 1.0), (2.0, 3.1), (3.0, 4.0)]).unwrap();
        let r = max_disjoint_volume(&c, &[]).unwrap();
        assert_eq!(r.chosen, vec![0, 1]);
        assert!((r.selected_volume - 2.1).abs() < 1e-12);
        assert!((r.union_volume.value - 3.0).abs() < 1e-12);
        assert!((r.delta - 0.7).abs() < 1e-12);
    }

    #[test]
    fn four_squares_quarter() {
        let c = four_squares();
        assert_eq!(delta(&c).unwrap(), 0.25);
        assert_eq!(independence_number(&c).unwrap(), 1);
    }

    #[test]
    fn forbidden_vertices() {
        let c = Collection::intervals(&[(0.0, 1.0), (2.0, 3.1), (3.0, 4.0)]).unwrap();
        let r = max_disjoint_volume(&c, &[1]).unwrap();
        assert_eq!(r.chosen, vec![0, 2]);
        let all = max_disjoint_volume(&c, &[0, 1, 2]).unwrap();
        assert!(all.chosen.is_empty());
        assert_eq!(all.selected_volume, 0.0);
        assert!(max_disjoint_volume(&c, &[7]).is_err());
    }

    #[test]
    fn ties_break_lexicographically() {
        // path 0 - 1 - 2 - 3 of unit intervals: {0,2}, {0,3}, {1,3} all weigh 2
        let c = Collection::intervals(&[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0), (3.0, 4.0)]).unwrap();
        assert_eq!(max_disjoint_volume(&c, &[]).unwrap().chosen, vec![0, 2]);
    }

    #[test]
    fn cap_applies_per_component() {
        // 80 pairwise disjoint unit intervals: 80 singleton components
        let iv: Vec<(f64, f64)> = (0..80).map(|k| (3.0 * k as f64, 3.0 * k as f64 + 1.0)).collect();
        let c = Collection::intervals(&iv).unwrap();
        assert_eq!(independence_number(&c).unwrap(), 80);
        // a connected path of 80 intervals is rejected
        let path: Vec<(f64, f64)> = (0..80).map(|k| (k as f64, k as f64 + 1.0)).collect();
        let c = Collection::intervals(&path).unwrap();
        assert!(matches!(
            independence_number(&c),
            Err(Error::InstanceTooLarge { size: 80, cap: 64 })
        ));
        assert!(Oracle::with_cap(65).is_err());
    }

    #[test]
    fn edge_budget_is_a_resource_error() {
        let g = IntersectionGraph::with_edge_limit(&four_squares(), 5);
        assert!(matches!(g, Err(ref e) if e.is_resource_limit()));
        assert!(IntersectionGraph::with_edge_limit(&four_squares(), 6).is_ok());
    }
}
