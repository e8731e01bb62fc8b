use super::FiniteMetricSpace;
use crate::{Error, Result};
use serde::Serialize;

/// Relative slack in the separation test d ≥ ε, absorbing rounding on grids.
pub const SEPARATION_RTOL: f64 = 1e-9;

/// Nested a^{-k}-nets N_0 ⊆ N_1 ⊆ … with predecessor maps.
#[derive(Clone, Debug, Serialize)]
pub struct NetHierarchy {
    pub a: f64,
    /// `levels[k]` lists point ids of N_k; N_{k-1} is a prefix of N_k.
    pub levels: Vec<Vec<usize>>,
    /// `predecessor[k][i]` is the point of N_{k-1} closest to `levels[k][i]` (empty for k = 0).
    pub predecessor: Vec<Vec<usize>>,
}

impl NetHierarchy {
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn scale(&self, k: usize) -> f64 {
        self.a.powi(-(k as i32))
    }
}

#[inline]
pub fn separated(d: f64, eps: f64) -> bool {
    d >= eps * (1.0 - SEPARATION_RTOL)
}

/// Greedy nets: each level starts from the previous one and scans ids in order.
pub fn build_net_hierarchy(space: &FiniteMetricSpace, a: f64, max_level: usize) -> Result<NetHierarchy> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    if !(a > 1.0) || !a.is_finite() {
        return Err(Error::Scale(format!("base a must exceed 1, got {a}")));
    }
    let n = space.len();
    let mut levels: Vec<Vec<usize>> = Vec::with_capacity(max_level + 1);
    let mut predecessor: Vec<Vec<usize>> = Vec::with_capacity(max_level + 1);
    for k in 0..=max_level {
        let eps = a.powi(-(k as i32));
        let mut net: Vec<usize> = if k == 0 { Vec::new() } else { levels[k - 1].clone() };
        let mut member = vec![false; n];
        for &p in &net {
            member[p] = true;
        }
        for x in 0..n {
            if member[x] {
                continue;
            }
            if net.iter().all(|&y| separated(space.dist(x, y), eps)) {
                net.push(x);
                member[x] = true;
            }
        }
        let preds = if k == 0 {
            Vec::new()
        } else {
            let prev = &levels[k - 1];
            crate::par::map(&net, |&x| closest(space, x, prev))
        };
        levels.push(net);
        predecessor.push(preds);
    }
    Ok(NetHierarchy { a, levels, predecessor })
}

/// Closest point of `set` to `x`; ties go to the smaller id.
pub fn closest(space: &FiniteMetricSpace, x: usize, set: &[usize]) -> usize {
    let mut best = set[0];
    let mut bd = space.dist(x, best);
    for &y in &set[1..] {
        let d = space.dist(x, y);
        if d < bd || (d == bd && y < best) {
            best = y;
            bd = d;
        }
    }
    best
}

/// Checks separation, maximality, nesting and predecessor optimality; returns the first violation.
pub fn check_net_invariants(space: &FiniteMetricSpace, nets: &NetHierarchy) -> Option<String> {
    for (k, net) in nets.levels.iter().enumerate() {
        let eps = nets.scale(k);
        for (i, &x) in net.iter().enumerate() {
            for &y in &net[i + 1..] {
                if !separated(space.dist(x, y), eps) {
                    return Some(format!("level {k}: {x} and {y} closer than {eps}"));
                }
            }
        }
        for x in 0..space.len() {
            if net.iter().all(|&y| separated(space.dist(x, y), eps) && y != x) {
                return Some(format!("level {k}: point {x} is far from the net"));
            }
        }
        if k > 0 {
            let prev = &nets.levels[k - 1];
            if net[..prev.len()] != prev[..] {
                return Some(format!("level {k} does not extend level {}", k - 1));
            }
            for (i, &x) in net.iter().enumerate() {
                let p = nets.predecessor[k][i];
                let dp = space.dist(x, p);
                if prev.iter().any(|&y| space.dist(x, y) < dp) {
                    return Some(format!("level {k}: predecessor of {x} is not closest"));
                }
            }
        }
    }
    None
}
