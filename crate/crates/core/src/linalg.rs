//! Sparse Laplacians, Dirichlet solves and shortest paths.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Relative residual for conjugate gradient.
pub const CG_TOL: f64 = 1e-12;
/// Auto mode solves systems up to this many unknowns densely.
pub const DENSE_AUTO_MAX: usize = 300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    Auto,
    Cg,
    Dense,
}

/// Symmetric graph Laplacian in CSR form, diagonal included.
#[derive(Clone, Debug)]
pub struct Laplacian {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    vals: Vec<f64>,
}

impl Laplacian {
    /// Assemble from undirected edges `(i, j, c)`; duplicates are summed, loops dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, c) in edges {
            if i == j || c == 0.0 {
                continue;
            }
            rows[i].push((j, c));
            rows[j].push((i, c));
        }
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut vals = Vec::new();
        indptr.push(0);
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len() + 1);
            for &(j, c) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += c,
                    _ => merged.push((j, c)),
                }
            }
            let deg: f64 = merged.iter().map(|e| e.1).sum();
            let pos = merged.partition_point(|e| e.0 < i);
            merged.insert(pos, (i, deg));
            for (j, c) in merged {
                indices.push(j);
                vals.push(if j == i { c } else { -c });
            }
            indptr.push(indices.len());
        }
        Laplacian { n, indptr, indices, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |k| (self.indices[k], self.vals[k]))
    }

    /// Off-diagonal neighbours with their (positive) conductances.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row(i).filter(move |&(j, _)| j != i).map(|(j, v)| (j, -v))
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).find(|&(j, _)| j == i).map(|e| e.1).unwrap_or(0.0))
            .collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.vals[k] * x[self.indices[k]];
            }
            *yi = s;
        }
    }

    /// E(u,u) = Σ_edges c (u_i − u_j)².
    pub fn energy(&self, u: &[f64]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.n {
            for (j, c) in self.neighbors(i) {
                if j > i {
                    let d = u[i] - u[j];
                    e += c * d * d;
                }
            }
        }
        e
    }

    /// E(u,v) for the bilinear form.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.n {
            for (j, c) in self.neighbors(i) {
                if j > i {
                    e += c * (u[i] - u[j]) * (v[i] - v[j]);
                }
            }
        }
        e
    }

    /// Connected-component label of every vertex (edges with positive conductance).
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for (w, c) in self.neighbors(v) {
                    if c > 0.0 && label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Principal submatrix on `keep`; `local[i]` is the position of `i` in `keep` or `usize::MAX`.
    pub fn submatrix(&self, keep: &[usize], local: &[usize]) -> Laplacian {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut vals = Vec::new();
        for &i in keep {
            for (j, v) in self.row(i) {
                if local[j] != usize::MAX {
                    indices.push(local[j]);
                    vals.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Laplacian { n: keep.len(), indptr, indices, vals }
    }
}

/// Solution of a Dirichlet problem plus solver diagnostics.
#[derive(Clone, Debug)]
pub struct DirichletSolution {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Free vertices in components without any fixed vertex (set to 0).
    pub floating: usize,
}

/// Solve (L u)_i = b_i on free vertices with u prescribed where `fixed` is `Some`.
///
/// Free vertices that cannot reach a fixed vertex are set to 0 and counted in
/// `floating`.
pub fn solve_dirichlet(
    lap: &Laplacian,
    fixed: &[Option<f64>],
    b: Option<&[f64]>,
    solver: Solver,
) -> Result<DirichletSolution> {
    let n = lap.n();
    assert_eq!(fixed.len(), n);
    let comp = lap.components();
    let mut anchored = vec![false; n];
    for i in 0..n {
        if fixed[i].is_some() {
            anchored[comp[i]] = true;
        }
    }
    let mut u: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
    let mut local = vec![usize::MAX; n];
    let mut free = Vec::new();
    let mut floating = 0;
    for i in 0..n {
        if fixed[i].is_none() {
            if anchored[comp[i]] {
                local[i] = free.len();
                free.push(i);
            } else {
                floating += 1;
            }
        }
    }
    if free.is_empty() {
        return Ok(DirichletSolution { u, iterations: 0, residual: 0.0, floating });
    }
    let mut rhs = vec![0.0; free.len()];
    for (k, &i) in free.iter().enumerate() {
        let mut s = b.map(|b| b[i]).unwrap_or(0.0);
        for (j, v) in lap.row(i) {
            if let Some(x) = fixed[j] {
                s -= v * x;
            }
        }
        rhs[k] = s;
    }
    let sub = lap.submatrix(&free, &local);
    let dense = match solver {
        Solver::Dense => true,
        Solver::Cg => false,
        Solver::Auto => free.len() <= DENSE_AUTO_MAX,
    };
    let (x, iterations, residual) = if dense {
        let x = dense_spd_solve(&sub.to_dense(), &rhs)?;
        (x, 0, 0.0)
    } else {
        cg(&sub, &rhs, CG_TOL, 20 * free.len() + 200)?
    };
    for (k, &i) in free.iter().enumerate() {
        u[i] = x[k];
    }
    Ok(DirichletSolution { u, iterations, residual, floating })
}

/// Dense SPD solve by Cholesky.
pub fn dense_spd_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Solve("matrix not positive definite".into()))?;
    let x = chol.solve(&DVector::from_column_slice(b));
    Ok(x.as_slice().to_vec())
}

/// Jacobi-preconditioned conjugate gradient on an SPD CSR matrix.
pub fn cg(a: &Laplacian, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize, f64)> {
    let n = a.n();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let dinv: Vec<f64> = a
        .diag()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Solve(format!("CG breakdown at iteration {it}")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rn = norm(&r) / bnorm;
        if rn <= tol {
            return Ok((x, it + 1, rn));
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rn = norm(&r) / bnorm;
    Err(Error::Solve(format!("CG did not converge: residual {rn:.3e} after {max_iter} iterations")))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Inverse of the Laplacian grounded at `ground` (row/column `ground` are zero).
pub fn grounded_inverse(lap: &Laplacian, ground: usize) -> Result<DMatrix<f64>> {
    let n = lap.n();
    let full = lap.to_dense();
    let keep: Vec<usize> = (0..n).filter(|&i| i != ground).collect();
    let sub = full.select_rows(&keep).select_columns(&keep);
    let inv = sub
        .cholesky()
        .ok_or_else(|| Error::Solve("grounded Laplacian not positive definite".into()))?
        .inverse();
    let mut g = DMatrix::zeros(n, n);
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            g[(i, j)] = inv[(a, b)];
        }
    }
    Ok(g)
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Single-source shortest paths with nonnegative edge lengths.
pub fn dijkstra(adj: &[Vec<(usize, f64)>], sources: &[(usize, f64)]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    for &(s, d0) in sources {
        if d0 < dist[s] {
            dist[s] = d0;
            heap.push(HeapItem(d0, s));
        }
    }
    while let Some(HeapItem(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, len) in &adj[v] {
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(HeapItem(nd, w));
            }
        }
    }
    dist
}

/// In-place Floyd–Warshall on a dense row-major matrix.
pub fn floyd_warshall(n: usize, d: &mut [f64]) {
    if n == 0 {
        return;
    }
    for k in 0..n {
        let rk: Vec<f64> = d[k * n..(k + 1) * n].to_vec();
        crate::par::rows_mut(d, n, |_, row| {
            let dik = row[k];
            if !dik.is_finite() {
                return;
            }
            for j in 0..n {
                let cand = dik + rk[j];
                if cand < row[j] {
                    row[j] = cand;
                }
            }
        });
    }
}

/// Single-source shortest paths on a dense complete graph, O(n²).
pub fn dense_dijkstra(n: usize, len: impl Fn(usize, usize) -> f64, src: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    for _ in 0..n {
        let mut v = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..n {
            if !done[i] && dist[i] < best {
                best = dist[i];
                v = i;
            }
        }
        if v == usize::MAX {
            break;
        }
        done[v] = true;
        for w in 0..n {
            if !done[w] {
                let nd = best + len(v, w);
                if nd < dist[w] {
                    dist[w] = nd;
                }
            }
        }
    }
    dist
}
