use super::FillingGraph;
use crate::linalg;
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BinaryHeap;

/// Weight ρ with log π accumulated along the genealogy.
#[derive(Clone, Debug, Serialize)]
pub struct WeightFunction {
    pub rho: Vec<f64>,
    pub log_pi: Vec<f64>,
}

impl WeightFunction {
    pub fn new(graph: &FillingGraph, rho: Vec<f64>) -> Result<Self> {
        if rho.len() != graph.len() {
            return Err(Error::Param(format!("{} weights for {} vertices", rho.len(), graph.len())));
        }
        if let Some(v) = rho.iter().position(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(Error::Param(format!("weight at vertex {v} must be positive, got {}", rho[v])));
        }
        let mut log_pi = vec![0.0; rho.len()];
        for v in 0..rho.len() {
            log_pi[v] = rho[v].ln() + graph.parent[v].map(|p| log_pi[p]).unwrap_or(0.0);
        }
        Ok(WeightFunction { rho, log_pi })
    }

    pub fn constant(graph: &FillingGraph, c: f64) -> Result<Self> {
        Self::new(graph, vec![c; graph.len()])
    }

    pub fn pi(&self, v: usize) -> f64 {
        self.log_pi[v].exp()
    }

    /// ρ*(B): min of ρ over B and its horizontal neighbours.
    pub fn rho_star(&self, graph: &FillingGraph) -> Vec<f64> {
        (0..graph.len())
            .map(|v| graph.horizontal[v].iter().map(|&w| self.rho[w]).fold(self.rho[v], f64::min))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct H1Report {
    pub eta_minus: f64,
    pub eta_plus: f64,
    pub pass: bool,
}

pub fn check_h1(w: &WeightFunction) -> H1Report {
    let eta_minus = w.rho.iter().copied().fold(f64::INFINITY, f64::min);
    let eta_plus = w.rho.iter().copied().fold(0.0, f64::max);
    H1Report { eta_minus, eta_plus, pass: eta_minus > 0.0 && eta_plus < 1.0 }
}

/// K₀ = max π(B)/π(B') over horizontal edges, 1 if there are none.
pub fn check_h2(graph: &FillingGraph, w: &WeightFunction) -> f64 {
    let mut worst: f64 = 0.0;
    for v in 0..graph.len() {
        for &u in &graph.horizontal[v] {
            worst = worst.max(w.log_pi[v] - w.log_pi[u]);
        }
    }
    worst.exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct H3Report {
    /// Minimum of L_h over all enumerated crossing paths (∞ when there are none).
    pub min_cost: f64,
    /// Vertex B attaining the minimum.
    pub argmin: Option<usize>,
    /// Number of B with a nonempty Γ_{k+1}(B).
    pub nonvacuous: usize,
    pub no_crossing_paths: bool,
    pub pass: bool,
}

#[derive(Copy, Clone, PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

/// Classification of level-(k+1) vertices relative to B: 0 start (center in B), 1 inside 2·B, 2 outside.
fn crossing_zones(graph: &FillingGraph, space: &FiniteMetricSpace, b: usize) -> Vec<(usize, u8)> {
    let k = graph.level(b);
    let (xb, r) = (graph.center(b), graph.radius(b));
    graph.levels[k + 1]
        .iter()
        .map(|&v| {
            let d = space.dist(xb, graph.center(v));
            (v, if d < r { 0 } else if d < 2.0 * r { 1 } else { 2 })
        })
        .collect()
}

/// Least cost over Γ_{k+1}(B) where each edge (B_j, B_{j+1}) costs `edge(B_j, B_{j+1})`
/// and each vertex adds `node` (start and end included); None when Γ_{k+1}(B) is empty.
pub fn min_crossing_cost(
    graph: &FillingGraph,
    space: &FiniteMetricSpace,
    b: usize,
    edge: &dyn Fn(usize, usize) -> f64,
    node: &dyn Fn(usize) -> f64,
) -> Option<f64> {
    let k = graph.level(b);
    if k + 1 > graph.max_level() {
        return None;
    }
    let zones = crossing_zones(graph, space, b);
    let base = graph.levels[k + 1][0];
    let zone = |v: usize| zones[v - base].1;
    let mut dist = vec![f64::INFINITY; zones.len()];
    let mut heap = BinaryHeap::new();
    for &(v, z) in &zones {
        if z == 0 {
            dist[v - base] = node(v);
            heap.push(Item(node(v), v));
        }
    }
    let mut best = f64::INFINITY;
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v - base] || d >= best {
            continue;
        }
        for &u in &graph.horizontal[v] {
            let nd = d + edge(v, u) + node(u);
            if zone(u) == 2 {
                best = best.min(nd);
            } else if nd < dist[u - base] {
                dist[u - base] = nd;
                heap.push(Item(nd, u));
            }
        }
    }
    best.is_finite().then_some(best)
}

/// (H3′) over all B at levels 1..max_level−1 by Dijkstra with edge cost ρ*(B_j) ∧ ρ*(B_{j+1}).
pub fn check_h3prime(graph: &FillingGraph, space: &FiniteMetricSpace, w: &WeightFunction) -> H3Report {
    let rs = w.rho_star(graph);
    let bs: Vec<usize> = (1..graph.max_level()).flat_map(|k| graph.levels[k].iter().copied()).collect();
    let costs = crate::par::map(&bs, |&b| min_crossing_cost(graph, space, b, &|u, v| rs[u].min(rs[v]), &|_| 0.0));
    summarize_h3(&bs, &costs)
}

fn summarize_h3(bs: &[usize], costs: &[Option<f64>]) -> H3Report {
    let mut min_cost = f64::INFINITY;
    let mut argmin = None;
    let mut nonvacuous = 0;
    for (&b, c) in bs.iter().zip(costs) {
        if let Some(c) = c {
            nonvacuous += 1;
            if *c < min_cost {
                min_cost = *c;
                argmin = Some(b);
            }
        }
    }
    H3Report { min_cost, argmin, nonvacuous, no_crossing_paths: nonvacuous == 0, pass: min_cost >= 1.0 }
}

/// (H3′) by Bellman–Ford relaxation over hop counts, independent of the Dijkstra path in [`check_h3prime`].
/// Costs are nonnegative, so the minimum over walks equals the minimum over simple crossing paths.
pub fn check_h3prime_exhaustive(graph: &FillingGraph, space: &FiniteMetricSpace, w: &WeightFunction) -> H3Report {
    let rs = w.rho_star(graph);
    let bs: Vec<usize> = (1..graph.max_level()).flat_map(|k| graph.levels[k].iter().copied()).collect();
    let costs: Vec<Option<f64>> = bs
        .iter()
        .map(|&b| {
            let zones = crossing_zones(graph, space, b);
            let base = graph.levels[graph.level(b) + 1][0];
            let mut d: Vec<f64> = zones.iter().map(|&(_, z)| if z == 0 { 0.0 } else { f64::INFINITY }).collect();
            let mut best = f64::INFINITY;
            for _ in 0..zones.len() {
                let mut next = d.clone();
                for &(v, z) in &zones {
                    let dv = d[v - base];
                    if z == 2 || !dv.is_finite() {
                        continue;
                    }
                    for &u in &graph.horizontal[v] {
                        let c = dv + rs[v].min(rs[u]);
                        if zones[u - base].1 == 2 {
                            best = best.min(c);
                        } else if c < next[u - base] {
                            next[u - base] = c;
                        }
                    }
                }
                if next == d {
                    break;
                }
                d = next;
            }
            best.is_finite().then_some(best)
        })
        .collect();
    summarize_h3(&bs, &costs)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryEstimate {
    pub x: usize,
    pub y: usize,
    /// m_α(x, y).
    pub level: usize,
    /// π(c_α(x, y)).
    pub theta: f64,
    /// The pair is still inside a common α-ball at the deepest level.
    pub unseparated: bool,
}

/// θ̂(x,y) = max π over the deepest-level vertices whose α-dilation holds both points.
pub fn boundary_metric_estimate(
    graph: &FillingGraph,
    space: &FiniteMetricSpace,
    w: &WeightFunction,
    alpha: f64,
    pairs: &[(usize, usize)],
) -> Result<Vec<BoundaryEstimate>> {
    if !(2.0..=graph.params.lambda / 4.0).contains(&alpha) {
        return Err(Error::Param(format!("alpha must lie in [2, lambda/4], got {alpha}")));
    }
    Ok(crate::par::map(pairs, |&(x, y)| {
        let mut found = (0, w.pi(graph.root()));
        for k in 0..=graph.max_level() {
            let mut best: Option<f64> = None;
            for &b in &graph.levels[k] {
                let (c, r) = (graph.center(b), alpha * graph.radius(b));
                if space.dist(x, c) < r && space.dist(y, c) < r {
                    best = Some(best.map_or(w.log_pi[b], |v: f64| v.max(w.log_pi[b])));
                }
            }
            match best {
                Some(lp) => found = (k, lp.exp()),
                None => break,
            }
        }
        BoundaryEstimate { x, y, level: found.0, theta: found.1, unseparated: found.0 == graph.max_level() }
    }))
}

/// Horizontal edge length 2·max(−log η₊, −log η₋, log K₀).
pub fn horizontal_length(graph: &FillingGraph, w: &WeightFunction) -> f64 {
    let h1 = check_h1(w);
    let k0 = check_h2(graph, w);
    2.0 * (-h1.eta_plus.ln()).max(-h1.eta_minus.ln()).max(k0.ln())
}

/// Shortest-path distance D_ρ between two filling vertices.
pub fn filling_metric_drho(graph: &FillingGraph, w: &WeightFunction, v1: usize, v2: usize) -> Result<f64> {
    let hl = horizontal_length(graph, w);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); graph.len()];
    for v in 0..graph.len() {
        if let Some(p) = graph.parent[v] {
            let l = (w.log_pi[v] - w.log_pi[p]).abs();
            adj[v].push((p, l));
            adj[p].push((v, l));
        }
        for &u in &graph.horizontal[v] {
            adj[v].push((u, hl));
        }
    }
    let d = linalg::dijkstra(&adj, &[(v1, 0.0)])[v2];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Disconnected(format!("no path between vertices {v1} and {v2}")))
    }
}
