//! Cell measures, cell diameters and the M₂ surrogate.

use super::harmonic::Pcf;
use super::structure::{build_level, LevelNetwork, Word};
use crate::linalg::{dijkstra, floyd_warshall};
use crate::{par, Error, Result};

/// Word-indexed masses at a fixed level.
#[derive(Clone, Debug, PartialEq)]
pub struct CellMeasure {
    pub alphabet: usize,
    pub level: usize,
    pub masses: Vec<f64>,
}

impl CellMeasure {
    pub fn new(alphabet: usize, level: usize, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != alphabet.pow(level as u32) {
            return Err(Error::Param("mass vector length must be |S|^level".into()));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::Mass("cell masses must be finite and nonnegative".into()));
        }
        Ok(CellMeasure { alphabet, level, masses })
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Masses of all words of length 0..=level, obtained by summing children.
    pub fn closure(&self) -> Vec<Vec<f64>> {
        let mut levels = vec![self.masses.clone()];
        for _ in 0..self.level {
            let last = levels.last().expect("nonempty");
            let up: Vec<f64> = last.chunks(self.alphabet).map(|c| c.iter().sum()).collect();
            levels.push(up);
        }
        levels.reverse();
        levels
    }

    pub fn mass_of(&self, w: &Word) -> f64 {
        assert!(w.len() <= self.level);
        let span = self.alphabet.pow((self.level - w.len()) as u32);
        let start = w.index(self.alphabet) * span;
        self.masses[start..start + span].iter().sum()
    }

    pub fn scaled(&self, c: f64) -> CellMeasure {
        CellMeasure { masses: self.masses.iter().map(|m| m * c).collect(), ..self.clone() }
    }
}

/// Self-similar measure m(K_w) = r_w^{d_H}.
pub fn self_similar_measure(pcf: &Pcf, d_h: f64, n: usize) -> CellMeasure {
    let masses = pcf.weights(n).iter().map(|r| r.powf(d_h)).collect();
    CellMeasure { alphabet: pcf.alphabet(), level: n, masses }
}

/// Candidate diameters of cells K_w for |w| ≤ level (index: level, then word).
#[derive(Clone, Debug, PartialEq)]
pub struct CellDiameters {
    pub alphabet: usize,
    pub level: usize,
    pub diam: Vec<Vec<f64>>,
}

impl CellDiameters {
    pub fn of(&self, w: &Word) -> f64 {
        self.diam[w.len()][w.index(self.alphabet)]
    }

    /// Largest ratio diam(child)/diam(parent).
    pub fn max_child_ratio(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..=self.level {
            for (idx, &d) in self.diam[k].iter().enumerate() {
                let p = self.diam[k - 1][idx / self.alphabet];
                if p > 0.0 {
                    worst = worst.max(d / p);
                } else if d > 0.0 {
                    worst = f64::INFINITY;
                }
            }
        }
        worst
    }
}

/// A 0-harmonic function with cached per-word restrictions h∘F_w|V0.
#[derive(Clone, Debug)]
pub struct HarmonicFunction {
    pub boundary: Vec<f64>,
    /// `levels[k]` holds h∘F_w|V0 for |w| = k, flattened word-major.
    pub levels: Vec<Vec<f64>>,
}

impl HarmonicFunction {
    pub fn new(pcf: &Pcf, boundary: &[f64], depth: usize) -> Result<Self> {
        if boundary.len() != pcf.n_boundary() {
            return Err(Error::Param("boundary vector must have |V0| entries".into()));
        }
        let mut levels = vec![boundary.to_vec()];
        for k in 0..depth {
            let next = extend_once(pcf, &levels[k]);
            levels.push(next);
        }
        Ok(HarmonicFunction { boundary: boundary.to_vec(), levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn restriction(&self, w: &Word, nb: usize, alphabet: usize) -> &[f64] {
        let idx = w.index(alphabet);
        &self.levels[w.len()][idx * nb..(idx + 1) * nb]
    }
}

fn extend_once(pcf: &Pcf, cur: &[f64]) -> Vec<f64> {
    let nb = pcf.n_boundary();
    let s = pcf.alphabet();
    let blocks: Vec<&[f64]> = cur.chunks(nb).collect();
    let out = par::map(&blocks, |v| {
        let mut o = vec![0.0; s * nb];
        for (i, a) in pcf.ext.iter().enumerate() {
            for j in 0..nb {
                o[i * nb + j] = (0..nb).map(|k| a[(j, k)] * v[k]).sum();
            }
        }
        o
    });
    out.concat()
}

/// Γ(h,h)(K_w) = r_w^{-1} E^(0)(h∘F_w|V0) for |w| = n.
pub fn cell_energy_measure(pcf: &Pcf, h: &HarmonicFunction, n: usize) -> Result<CellMeasure> {
    if n > h.depth() {
        return Err(Error::Param(format!("harmonic function cached to depth {} < {n}", h.depth())));
    }
    let nb = pcf.n_boundary();
    let rw = pcf.weights(n);
    let vals = &h.levels[n];
    let masses = par::map_range(rw.len(), |idx| pcf.hs.energy0(&vals[idx * nb..(idx + 1) * nb]) / rw[idx]);
    Ok(CellMeasure { alphabet: pcf.alphabet(), level: n, masses })
}

/// Γ(h1,h1)+Γ(h2,h2) after scaling so that E(h1)+E(h2) = 1.
pub fn kusuoka_pair_measure(pcf: &Pcf, h1: &HarmonicFunction, h2: &HarmonicFunction, n: usize) -> Result<CellMeasure> {
    let e = pcf.hs.energy0(&h1.boundary) + pcf.hs.energy0(&h2.boundary);
    if e <= 0.0 {
        return Err(Error::ZeroMass("both harmonic functions are constant".into()));
    }
    let g1 = cell_energy_measure(pcf, h1, n)?;
    let g2 = cell_energy_measure(pcf, h2, n)?;
    let masses = g1.masses.iter().zip(&g2.masses).map(|(a, b)| (a + b) / e).collect();
    Ok(CellMeasure { alphabet: pcf.alphabet(), level: n, masses })
}

/// (θ_w, μ_w) pulled back to the cell K_w.
pub fn rescale_cell_pair(
    theta: &CellDiameters,
    mu: &CellMeasure,
    pcf: &Pcf,
    w: &Word,
) -> Result<(CellDiameters, CellMeasure)> {
    let s = pcf.alphabet();
    let mw = mu.mass_of(w);
    if mw <= 0.0 {
        return Err(Error::ZeroMass(w.to_string()));
    }
    let rw: f64 = w.0.iter().map(|&c| pcf.hs.r[c as usize]).product();
    let scale = (rw * mw).sqrt();
    let k = w.len();
    let depth = theta.level.min(mu.level).saturating_sub(k);
    let mut diam = Vec::with_capacity(depth + 1);
    for j in 0..=depth.min(theta.level - k) {
        let span = s.pow(j as u32);
        let start = w.index(s) * span;
        diam.push(theta.diam[k + j][start..start + span].iter().map(|d| d / scale).collect());
    }
    let span = s.pow((mu.level - k) as u32);
    let start = w.index(s) * span;
    let masses = mu.masses[start..start + span].iter().map(|m| m / mw).collect();
    Ok((
        CellDiameters { alphabet: s, level: diam.len() - 1, diam },
        CellMeasure { alphabet: s, level: mu.level - k, masses },
    ))
}

/// Worst two-sided ratio between diam² and r_w μ(K_w).
#[derive(Clone, Debug)]
pub struct M2Report {
    /// Running maximum over |w| ≤ L, for L = 0..=max_level.
    pub per_level: Vec<f64>,
    pub c_star: f64,
    pub argmax: Word,
    pub overflow: bool,
    pub zero_mass_cells: usize,
}

pub fn m2_constant(theta: &CellDiameters, mu: &CellMeasure, pcf: &Pcf, max_level: usize) -> Result<M2Report> {
    if max_level > theta.level || max_level > mu.level {
        return Err(Error::Param("max_level exceeds the resolution of θ or μ".into()));
    }
    let s = pcf.alphabet();
    let masses = mu.closure();
    let mut per_level = Vec::with_capacity(max_level + 1);
    let mut best = 0.0f64;
    let mut argmax = Word::empty();
    let mut zero_mass_cells = 0;
    for k in 0..=max_level {
        let rw = pcf.weights(k);
        for idx in 0..rw.len() {
            let m = masses[k][idx];
            let d = theta.diam[k][idx];
            let rm = rw[idx] * m;
            if m <= 0.0 {
                zero_mass_cells += 1;
            }
            let ratio = if rm > 0.0 && d > 0.0 { (rm / (d * d)).max(d * d / rm) } else { f64::INFINITY };
            if ratio > best {
                best = ratio;
                argmax = Word::from_index(idx, k, s);
            }
        }
        per_level.push(best);
    }
    Ok(M2Report { c_star: best, overflow: !best.is_finite(), per_level, argmax, zero_mass_cells })
}

/// Shortest-path metric from cell weights √(r_w μ(K_w)).
#[derive(Clone, Debug)]
pub struct CellGraphMetric {
    pub diameters: CellDiameters,
    pub network: LevelNetwork,
    /// Adjacency on V_n: every pair of boundary vertices of a level-n cell is joined by that cell's weight.
    pub adjacency: Vec<Vec<(usize, f64)>>,
    pub zero_weight_cells: usize,
}

impl CellGraphMetric {
    pub fn distance(&self, v1: usize, v2: usize) -> f64 {
        dijkstra(&self.adjacency, &[(v1, 0.0)])[v2]
    }

    pub fn distances_from(&self, v: usize) -> Vec<f64> {
        dijkstra(&self.adjacency, &[(v, 0.0)])
    }

    pub fn degenerate(&self) -> bool {
        self.zero_weight_cells > 0
    }
}

/// Build the cell-graph metric of μ at level n and read off diameters between boundary vertices.
///
/// Crossing a level-n cell costs √(r_w μ(K_w)), so walking from the centre of one cell to
/// that of an intersecting cell costs the average of the two weights.
pub fn cell_graph_metric(pcf: &Pcf, mu: &CellMeasure, n: usize) -> Result<CellGraphMetric> {
    if mu.level < n {
        return Err(Error::Param("measure resolution below metric level".into()));
    }
    let s = pcf.alphabet();
    let nb = pcf.n_boundary();
    let masses = mu.closure();
    let rw = pcf.weights(n);
    let weight: Vec<f64> = rw.iter().zip(&masses[n]).map(|(r, m)| (r * m).sqrt()).collect();
    let zero_weight_cells = weight.iter().filter(|&&w| w == 0.0).count();
    let net = build_level(&pcf.ss, n);
    let mut adjacency = vec![Vec::new(); net.n_vertices()];
    for (idx, &wgt) in weight.iter().enumerate() {
        let c = net.cell(idx);
        for p in 0..nb {
            for q in 0..nb {
                if p != q && pcf.hs.d[(p, q)] > 0.0 {
                    adjacency[c[p]].push((c[q], wgt));
                }
            }
        }
    }
    // level-1 template: vertex ids of F_i(q_j) in V1
    let one = build_level(&pcf.ss, 1);
    let n1 = one.n_vertices();
    let tmpl: Vec<Vec<usize>> = (0..s).map(|i| one.cell(i).to_vec()).collect();
    let edge = |p: usize, q: usize| p != q && pcf.hs.d[(p, q)] > 0.0;

    // intrinsic distances among boundary vertices of each cell, bottom-up
    let mut intra: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    intra[n] = weight
        .iter()
        .flat_map(|&w| {
            (0..nb * nb).map(move |k| {
                let (p, q) = (k / nb, k % nb);
                if p == q {
                    0.0
                } else if edge(p, q) {
                    w
                } else {
                    f64::INFINITY
                }
            })
        })
        .collect();
    for k in (0..n).rev() {
        let count = s.pow(k as u32);
        let below = &intra[k + 1];
        let blocks = par::map_range(count, |idx| {
            let mut d = vec![f64::INFINITY; n1 * n1];
            for v in 0..n1 {
                d[v * n1 + v] = 0.0;
            }
            for (i, t) in tmpl.iter().enumerate() {
                let child = &below[(idx * s + i) * nb * nb..(idx * s + i + 1) * nb * nb];
                for p in 0..nb {
                    for q in 0..nb {
                        let c = &mut d[t[p] * n1 + t[q]];
                        *c = c.min(child[p * nb + q]);
                    }
                }
            }
            floyd_warshall(n1, &mut d);
            (0..nb * nb).map(|k2| d[(k2 / nb) * n1 + k2 % nb]).collect::<Vec<f64>>()
        });
        intra[k] = blocks.concat();
    }
    // global distances among boundary vertices, top-down
    let mut global: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    global[0] = intra[0].clone();
    for k in 0..n {
        let count = s.pow(k as u32);
        let g = &global[k];
        let below = &intra[k + 1];
        let blocks = par::map_range(count, |idx| {
            let mut d = vec![f64::INFINITY; n1 * n1];
            for v in 0..n1 {
                d[v * n1 + v] = 0.0;
            }
            for (i, t) in tmpl.iter().enumerate() {
                let child = &below[(idx * s + i) * nb * nb..(idx * s + i + 1) * nb * nb];
                for p in 0..nb {
                    for q in 0..nb {
                        let c = &mut d[t[p] * n1 + t[q]];
                        *c = c.min(child[p * nb + q]);
                    }
                }
            }
            let parent = &g[idx * nb * nb..(idx + 1) * nb * nb];
            for p in 0..nb {
                for q in 0..nb {
                    let c = &mut d[p * n1 + q];
                    *c = c.min(parent[p * nb + q]);
                }
            }
            floyd_warshall(n1, &mut d);
            let mut out = Vec::with_capacity(s * nb * nb);
            for t in &tmpl {
                for p in 0..nb {
                    for q in 0..nb {
                        out.push(d[t[p] * n1 + t[q]]);
                    }
                }
            }
            out
        });
        global[k + 1] = blocks.concat();
    }
    let diam = global
        .iter()
        .map(|lvl| lvl.chunks(nb * nb).map(|m| m.iter().copied().fold(0.0, f64::max)).collect())
        .collect();
    Ok(CellGraphMetric {
        diameters: CellDiameters { alphabet: s, level: n, diam },
        network: net,
        adjacency,
        zero_weight_cells,
    })
}

/// Diameters equal to √(r_w μ(K_w)) for every word up to the measure's level.
pub fn tautological_diameters(pcf: &Pcf, mu: &CellMeasure) -> CellDiameters {
    let masses = mu.closure();
    let diam = (0..=mu.level)
        .map(|k| pcf.weights(k).iter().zip(&masses[k]).map(|(r, m)| (r * m).sqrt()).collect())
        .collect();
    CellDiameters { alphabet: mu.alphabet, level: mu.level, diam }
}
