use super::{min_crossing_cost, FillingGraph};
use crate::diag::{capacity, GraphForm};
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};
use serde::Serialize;

/// 𝒞(B) = m(B)/r_B^γ with measured gentleness constants and the (E) margin.
#[derive(Clone, Debug, Serialize)]
pub struct GentleFunction {
    pub c: Vec<f64>,
    pub gamma: f64,
    pub k_h: f64,
    pub k_v: f64,
    /// min over B at levels ≥ 1 with children of 1 − 𝒞(B)/Σ_{non-peripheral children} 𝒞.
    pub e_delta: f64,
    /// (E) holds with δ = e_delta ∈ (0,1).
    pub e_holds: bool,
    /// Parents at levels ≥ 1 without a non-peripheral child.
    pub no_np_parents: Vec<usize>,
    pub non_peripheral: Vec<bool>,
}

/// m(B(x_B, r_B)) for every vertex under a point measure.
pub fn vertex_ball_masses(graph: &FillingGraph, space: &FiniteMetricSpace, point_mass: &[f64]) -> Vec<f64> {
    let idx: Vec<usize> = (0..graph.len()).collect();
    crate::par::map(&idx, |&v| {
        let (x, r) = (graph.center(v), graph.radius(v));
        (0..space.len()).filter(|&y| space.dist(x, y) < r).map(|y| point_mass[y]).sum()
    })
}

/// Measures K_h, K_v and (E) for 𝒞 built from per-vertex ball masses.
pub fn gentle_capacity_function(graph: &FillingGraph, ball_mass: &[f64], gamma: f64) -> Result<GentleFunction> {
    if let Some(v) = ball_mass.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::Mass(format!("ball of vertex {v} has mass {}", ball_mass[v])));
    }
    let c: Vec<f64> = (0..graph.len()).map(|v| ball_mass[v] / graph.radius(v).powf(gamma)).collect();
    gentle_from_values(graph, c, gamma)
}

/// Same as [`gentle_capacity_function`] for arbitrary positive values.
pub fn gentle_from_values(graph: &FillingGraph, c: Vec<f64>, gamma: f64) -> Result<GentleFunction> {
    if let Some(v) = c.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::Mass(format!("capacity value {} at vertex {v}", c[v])));
    }
    let mut k_h: f64 = 1.0;
    let mut k_v: f64 = 1.0;
    for v in 0..graph.len() {
        for &u in &graph.horizontal[v] {
            k_h = k_h.max(c[v] / c[u]);
        }
        if let Some(p) = graph.parent[v] {
            k_v = k_v.max(c[v] / c[p]).max(c[p] / c[v]);
        }
    }
    let non_peripheral: Vec<bool> = (0..graph.len()).map(|v| graph.is_non_peripheral(v)).collect();
    let mut e_delta = f64::INFINITY;
    let mut no_np_parents = Vec::new();
    for v in 0..graph.len() {
        if graph.level(v) == 0 || graph.children[v].is_empty() {
            continue;
        }
        let s: f64 = graph.children[v].iter().filter(|&&u| non_peripheral[u]).map(|&u| c[u]).sum();
        if s == 0.0 {
            no_np_parents.push(v);
            e_delta = f64::NEG_INFINITY;
        } else {
            e_delta = e_delta.min(1.0 - c[v] / s);
        }
    }
    let e_holds = e_delta > 0.0 && e_delta < 1.0;
    Ok(GentleFunction { c, gamma, k_h, k_v, e_delta, e_holds, no_np_parents, non_peripheral })
}

/// σ_B on level k+1, stored sparsely.
#[derive(Clone, Debug, Serialize)]
pub struct LocalSigma {
    pub b: usize,
    /// (vertex, σ_B(vertex)) for vertices of V_B with nonzero value.
    pub values: Vec<(usize, f64)>,
    /// B(x_B, 1.9 r_B) has no exterior, so σ_B ≡ 0.
    pub vacuous: bool,
    /// Energy of the cutoff potential.
    pub cutoff_energy: f64,
}

impl LocalSigma {
    pub fn get(&self, v: usize) -> f64 {
        self.values.iter().find(|e| e.0 == v).map(|e| e.1).unwrap_or(0.0)
    }

    /// Σ σ_B(B')² 𝒞(B') / 𝒞(B).
    pub fn energy_ratio(&self, gentle: &GentleFunction) -> f64 {
        self.values.iter().map(|&(v, s)| s * s * gentle.c[v]).sum::<f64>() / gentle.c[self.b]
    }
}

/// Discrete gradient of the equilibrium potential between B(x_B, 1.1 r_B) and B(x_B, 1.9 r_B)^c.
pub fn discrete_gradient_sigma(
    graph: &FillingGraph,
    space: &FiniteMetricSpace,
    form: &GraphForm,
    b: usize,
) -> Result<LocalSigma> {
    let k = graph.level(b);
    if k + 1 > graph.max_level() {
        return Err(Error::Param(format!("vertex {b} is on the deepest level")));
    }
    if form.len() != space.len() {
        return Err(Error::Param("form and space differ in size".into()));
    }
    let (xb, r) = (graph.center(b), graph.radius(b));
    let n = space.len();
    let inner: Vec<usize> = (0..n).filter(|&y| space.dist(xb, y) < 1.1 * r).collect();
    let outer: Vec<usize> = (0..n).filter(|&y| space.dist(xb, y) >= 1.9 * r).collect();
    if outer.is_empty() {
        return Ok(LocalSigma { b, values: Vec::new(), vacuous: true, cutoff_energy: 0.0 });
    }
    let cap = capacity(form, &inner, &outer)?;
    let u = &cap.potential;
    let m = form.measure();
    let level = &graph.levels[k + 1];
    let ud: Vec<f64> = level
        .iter()
        .map(|&v| {
            let (c, rv) = (graph.center(v), graph.radius(v));
            if space.dist(xb, c) >= 1.9 * r + rv {
                return 0.0;
            }
            let (mut s, mut w) = (0.0, 0.0);
            for y in 0..n {
                if space.dist(c, y) < rv {
                    s += m[y] * u[y];
                    w += m[y];
                }
            }
            s / w
        })
        .collect();
    let base = level[0];
    let mut values = Vec::new();
    for (i, &v) in level.iter().enumerate() {
        if space.dist(xb, graph.center(v)) >= graph.radius(v) + 3.0 * r {
            continue;
        }
        let s: f64 = graph.horizontal[v].iter().map(|&w| (ud[w - base] - ud[i]).abs()).sum();
        if s > 0.0 {
            values.push((v, s));
        }
    }
    Ok(LocalSigma { b, values, vacuous: false, cutoff_energy: cap.cap })
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaFunction {
    pub sigma: Vec<f64>,
    pub max: f64,
    /// Vertices with σ ≥ ¼.
    pub over_quarter: usize,
}

impl SigmaFunction {
    pub fn new(sigma: Vec<f64>) -> Self {
        let max = sigma.iter().copied().fold(0.0, f64::max);
        let over_quarter = sigma.iter().filter(|&&s| s >= 0.25).count();
        SigmaFunction { sigma, max, over_quarter }
    }

    pub fn zero(graph: &FillingGraph) -> Self {
        Self::new(vec![0.0; graph.len()])
    }
}

/// Pointwise max of local σ_B.
pub fn patch_sigma(n_vertices: usize, locals: &[LocalSigma]) -> SigmaFunction {
    let mut sigma = vec![0.0f64; n_vertices];
    for l in locals {
        for &(v, s) in &l.values {
            sigma[v] = sigma[v].max(s);
        }
    }
    SigmaFunction::new(sigma)
}

/// Locals for every B at levels 1..max_level−1, patched.
pub fn gradient_sigma(
    graph: &FillingGraph,
    space: &FiniteMetricSpace,
    form: &GraphForm,
) -> Result<(SigmaFunction, Vec<LocalSigma>)> {
    let bs: Vec<usize> = (1..graph.max_level()).flat_map(|k| graph.levels[k].iter().copied()).collect();
    let locals: Vec<LocalSigma> =
        crate::par::map(&bs, |&b| discrete_gradient_sigma(graph, space, form, b)).into_iter().collect::<Result<_>>()?;
    Ok((patch_sigma(graph.len(), &locals), locals))
}

/// min over B and Γ_{k+1}(B) of Σ σ(B_i); None when every Γ_{k+1}(B) is empty.
pub fn s1_minimum(graph: &FillingGraph, space: &FiniteMetricSpace, sigma: &[f64]) -> Option<(usize, f64)> {
    let bs: Vec<usize> = (0..graph.max_level()).flat_map(|k| graph.levels[k].iter().copied()).collect();
    let costs = crate::par::map(&bs, |&b| min_crossing_cost(graph, space, b, &|_, _| 0.0, &|v| sigma[v]));
    bs.iter()
        .zip(costs)
        .filter_map(|(&b, c)| c.map(|c| (b, c)))
        .fold(None, |acc, (b, c)| match acc {
            Some((_, bc)) if bc <= c => acc,
            _ => Some((b, c)),
        })
}

/// max over B of Σ_{children} σ^β 𝒞 / 𝒞(B), with the maximizing vertex.
pub fn s2_ratio(graph: &FillingGraph, gentle: &GentleFunction, sigma: &[f64], beta: f64) -> (usize, f64) {
    let mut best = (graph.root(), 0.0);
    for v in 0..graph.len() {
        let s: f64 = graph.children[v].iter().map(|&u| sigma[u].powf(beta) * gentle.c[u]).sum();
        let r = s / gentle.c[v];
        if r > best.1 {
            best = (v, r);
        }
    }
    best
}
