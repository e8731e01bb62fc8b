use crate::metric::{uniform_perfectness_estimate, FiniteMetricSpace, NetHierarchy};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FillingParams {
    pub a: f64,
    pub lambda: f64,
    pub k_p: Option<f64>,
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Vertex {
    pub level: usize,
    pub center: usize,
    pub radius: f64,
}

/// Hyperbolic filling: vertices are balls B(x, 2a^{-k}) for x in N_k, ids in level-major order.
#[derive(Clone, Debug, Serialize)]
pub struct FillingGraph {
    pub params: FillingParams,
    pub vertices: Vec<Vertex>,
    /// Vertex ids per level.
    pub levels: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// Horizontal neighbours (self excluded), sorted by id.
    pub horizontal: Vec<Vec<usize>>,
    /// Max |{B' ~ B}| counting B itself.
    pub d_h: usize,
    /// Max number of children.
    pub d_v: usize,
}

impl FillingGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, v: usize) -> usize {
        self.vertices[v].level
    }

    pub fn center(&self, v: usize) -> usize {
        self.vertices[v].center
    }

    pub fn radius(&self, v: usize) -> f64 {
        self.vertices[v].radius
    }

    /// Genealogy g(B) from the root down to `v`.
    pub fn genealogy(&self, v: usize) -> Vec<usize> {
        let mut g = vec![v];
        let mut c = v;
        while let Some(p) = self.parent[c] {
            g.push(p);
            c = p;
        }
        g.reverse();
        g
    }

    /// Ancestor of `v` at `level` (or `v` itself).
    pub fn ancestor(&self, v: usize, level: usize) -> usize {
        let mut c = v;
        while self.level(c) > level {
            c = self.parent[c].expect("non-root vertex has a parent");
        }
        c
    }

    /// Every horizontal neighbour of `v` has the same parent as `v` (levels ≥ 1).
    pub fn is_non_peripheral(&self, v: usize) -> bool {
        self.level(v) >= 1 && self.horizontal[v].iter().all(|&w| self.parent[w] == self.parent[v])
    }

    /// Vertices within horizontal graph distance 2 of `v`, `v` included.
    pub fn two_neighbourhood(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        out.extend_from_slice(&self.horizontal[v]);
        for &w in &self.horizontal[v] {
            out.extend_from_slice(&self.horizontal[w]);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn horizontal_edge_count(&self) -> usize {
        self.horizontal.iter().map(|h| h.len()).sum::<usize>() / 2
    }
}

/// Filling over a net hierarchy with horizontal test d(x_B, x_B') < λ(r_B + r_B').
pub fn build_filling(
    space: &FiniteMetricSpace,
    nets: &NetHierarchy,
    lambda: f64,
    k_p: Option<f64>,
    strict: bool,
) -> Result<FillingGraph> {
    if !(lambda >= 3.0) {
        return Err(Error::Param(format!("horizontal parameter must be at least 3, got {lambda}")));
    }
    let a = nets.a;
    if nets.levels[0].len() != 1 {
        return Err(Error::Param(format!(
            "level 0 has {} vertices; rescale the space to diameter 1/2",
            nets.levels[0].len()
        )));
    }
    let mut k_p = k_p;
    if strict {
        if k_p.is_none() {
            k_p = Some(uniform_perfectness_estimate(space)?.k_p);
        }
        let kp = k_p.unwrap();
        if lambda < 32.0 || a < 24.0 * lambda.max(kp) {
            return Err(Error::Param(format!(
                "strict mode needs lambda >= 32 and a >= 24 max(lambda, K_P); got lambda = {lambda}, a = {a}, K_P = {kp}"
            )));
        }
    }
    let mut vertices = Vec::new();
    let mut levels = Vec::new();
    let mut parent = Vec::new();
    let n = space.len();
    let mut prev_pos: Vec<usize> = Vec::new();
    for (k, net) in nets.levels.iter().enumerate() {
        let radius = 2.0 * a.powi(-(k as i32));
        let mut pos = vec![usize::MAX; n];
        let mut ids = Vec::with_capacity(net.len());
        for (i, &x) in net.iter().enumerate() {
            let id = vertices.len();
            pos[x] = id;
            ids.push(id);
            vertices.push(Vertex { level: k, center: x, radius });
            parent.push(if k == 0 { None } else { Some(prev_pos[nets.predecessor[k][i]]) });
        }
        levels.push(ids);
        prev_pos = pos;
    }
    let mut children = vec![Vec::new(); vertices.len()];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(v);
        }
    }
    let mut horizontal = vec![Vec::new(); vertices.len()];
    for ids in &levels {
        let rows = crate::par::map(ids, |&v| {
            let (x, r) = (vertices[v].center, vertices[v].radius);
            ids.iter()
                .copied()
                .filter(|&w| w != v && space.dist(x, vertices[w].center) < lambda * (r + vertices[w].radius))
                .collect::<Vec<_>>()
        });
        for (&v, row) in ids.iter().zip(rows) {
            horizontal[v] = row;
        }
    }
    let d_h = horizontal.iter().map(|h| h.len() + 1).max().unwrap_or(1);
    let d_v = children.iter().map(|c| c.len()).max().unwrap_or(0);
    Ok(FillingGraph {
        params: FillingParams { a, lambda, k_p, strict },
        vertices,
        levels,
        parent,
        children,
        horizontal,
        d_h,
        d_v,
    })
}
