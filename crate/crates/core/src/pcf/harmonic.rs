//! Harmonic structures, graph energies, harmonic extension, resistance and F_w* spectra.

use super::structure::{build_level, interval_structure, sierpinski_structure, vicsek_structure};
use super::structure::{LevelNetwork, SelfSimilarStructure, Word};
use crate::linalg::{solve_dirichlet, Laplacian, Solver};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Boundary matrix D and resistance weights r.
#[derive(Clone, Debug)]
pub struct HarmonicStructure {
    pub d: DMatrix<f64>,
    pub r: Vec<f64>,
    pub validated: bool,
}

impl HarmonicStructure {
    /// Checks symmetry, zero row sums (D1), nonnegative off-diagonals (D2) and r_i ∈ (0,1).
    pub fn new(d: DMatrix<f64>, r: Vec<f64>) -> Result<Self> {
        let n = d.nrows();
        if d.ncols() != n || n == 0 {
            return Err(Error::Param("D must be square and nonempty".into()));
        }
        let scale = d.amax().max(1.0);
        for i in 0..n {
            let row_sum: f64 = d.row(i).iter().sum();
            if row_sum.abs() > 1e-12 * scale {
                return Err(Error::Param(format!("row {i} of D does not sum to zero")));
            }
            for j in 0..n {
                if (d[(i, j)] - d[(j, i)]).abs() > 1e-14 * scale {
                    return Err(Error::Param(format!("D not symmetric at ({i},{j})")));
                }
                if i != j && d[(i, j)] < 0.0 {
                    return Err(Error::Param(format!("negative off-diagonal D[{i},{j}]")));
                }
            }
        }
        if r.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::Param("resistance weights must lie in (0,1)".into()));
        }
        Ok(HarmonicStructure { d, r, validated: false })
    }

    /// E^(0)(u,v) = −Σ D_pq u_q v_p.
    pub fn bilinear0(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.d.nrows();
        let mut e = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                e += self.d[(p, q)] * (u[p] - u[q]) * (v[p] - v[q]);
            }
        }
        e
    }

    pub fn energy0(&self, u: &[f64]) -> f64 {
        self.bilinear0(u, u)
    }

    pub fn norm(&self) -> f64 {
        self.d.amax()
    }
}

pub fn make_sierpinski_gasket(n: usize) -> Result<(SelfSimilarStructure, HarmonicStructure)> {
    let ss = sierpinski_structure(n)?;
    let m = n + 1;
    let d = DMatrix::from_fn(m, m, |i, j| if i == j { -(n as f64) } else { 1.0 });
    let r = (n as f64 + 1.0) / (n as f64 + 3.0);
    let hs = HarmonicStructure::new(d, vec![r; m])?;
    Ok((ss, hs))
}

pub fn make_vicsek(r: f64) -> Result<(SelfSimilarStructure, HarmonicStructure)> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::Param(format!("Vicsek weight r must lie in (0, 1/2), got {r}")));
    }
    let d = DMatrix::from_fn(4, 4, |i, j| if i == j { -3.0 } else { 1.0 });
    let hs = HarmonicStructure::new(d, vec![1.0 - 2.0 * r, r, r, r, r])?;
    Ok((vicsek_structure(), hs))
}

pub fn make_interval() -> (SelfSimilarStructure, HarmonicStructure) {
    let d = DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]);
    let hs = HarmonicStructure::new(d, vec![0.5, 0.5]).expect("static data");
    (interval_structure(), hs)
}

/// Outcome of the level-1 Schur-complement test.
#[derive(Clone, Debug)]
pub struct Validation {
    pub residual: f64,
    pub norm_d: f64,
    pub validated: bool,
    /// Harmonic extension V0 → V1 (|V1| × |V0|).
    pub extension: DMatrix<f64>,
}

/// Residual of the level-1 Schur complement against D.
pub fn validate_harmonic_structure(ss: &SelfSimilarStructure, hs: &HarmonicStructure) -> Result<Validation> {
    if hs.d.nrows() != ss.n_boundary() || hs.r.len() != ss.alphabet() {
        return Err(Error::Param("harmonic structure does not match the self-similar structure".into()));
    }
    let net = build_level(ss, 1);
    let nv = net.n_vertices();
    let nb = ss.n_boundary();
    let mut q = DMatrix::<f64>::zeros(nv, nv);
    for i in 0..ss.alphabet() {
        let c = net.cell(i);
        for a in 0..nb {
            for b in 0..nb {
                q[(c[a], c[b])] -= hs.d[(a, b)] / hs.r[i];
            }
        }
    }
    let ni = nv - nb;
    let mut extension = DMatrix::zeros(nv, nb);
    for j in 0..nb {
        extension[(j, j)] = 1.0;
    }
    let schur = if ni == 0 {
        q.view((0, 0), (nb, nb)).into_owned()
    } else {
        let q00 = q.view((0, 0), (nb, nb)).into_owned();
        let q0i = q.view((0, nb), (nb, ni)).into_owned();
        let qi0 = q.view((nb, 0), (ni, nb)).into_owned();
        let qii = q.view((nb, nb), (ni, ni)).into_owned();
        let lu = qii.lu();
        let x = lu
            .solve(&qi0)
            .ok_or_else(|| Error::SingularInterior("level-1 interior block".into()))?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularInterior("level-1 interior block".into()));
        }
        for a in 0..ni {
            for b in 0..nb {
                extension[(nb + a, b)] = -x[(a, b)];
            }
        }
        q00 - q0i * x
    };
    let residual = (&schur + &hs.d).amax();
    let norm_d = hs.norm();
    Ok(Validation { residual, norm_d, validated: residual <= 1e-12 * norm_d, extension })
}

/// A validated structure with its extension matrices A_i.
#[derive(Clone, Debug)]
pub struct Pcf {
    pub ss: SelfSimilarStructure,
    pub hs: HarmonicStructure,
    pub ext: Vec<DMatrix<f64>>,
    pub validation: Validation,
}

impl Pcf {
    /// Validate and precompute A_i; rejects structures failing the Schur test.
    pub fn new(ss: SelfSimilarStructure, mut hs: HarmonicStructure) -> Result<Self> {
        let validation = validate_harmonic_structure(&ss, &hs)?;
        if !validation.validated {
            return Err(Error::Param(format!(
                "not a harmonic structure: Schur residual {:.3e}",
                validation.residual
            )));
        }
        hs.validated = true;
        let net = build_level(&ss, 1);
        let nb = ss.n_boundary();
        let ext = (0..ss.alphabet())
            .map(|i| {
                let c = net.cell(i);
                DMatrix::from_fn(nb, nb, |j, k| validation.extension[(c[j], k)])
            })
            .collect();
        Ok(Pcf { ss, hs, ext, validation })
    }

    pub fn sg(n: usize) -> Result<Self> {
        let (ss, hs) = make_sierpinski_gasket(n)?;
        Pcf::new(ss, hs)
    }

    pub fn vicsek(r: f64) -> Result<Self> {
        let (ss, hs) = make_vicsek(r)?;
        Pcf::new(ss, hs)
    }

    pub fn interval() -> Self {
        let (ss, hs) = make_interval();
        Pcf::new(ss, hs).expect("interval is harmonic")
    }

    pub fn alphabet(&self) -> usize {
        self.ss.alphabet()
    }

    pub fn n_boundary(&self) -> usize {
        self.ss.n_boundary()
    }

    /// A_w with h∘F_w|V0 = A_w h|V0.
    pub fn extension_matrix(&self, w: &Word) -> DMatrix<f64> {
        let nb = self.n_boundary();
        let mut a = DMatrix::identity(nb, nb);
        for &c in &w.0 {
            a = &self.ext[c as usize] * a;
        }
        a
    }

    /// r_w for all words of length n, lexicographic.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        let s = self.alphabet();
        let mut cur = vec![1.0];
        for _ in 0..n {
            let mut next = Vec::with_capacity(cur.len() * s);
            for &rw in &cur {
                for &ri in &self.hs.r {
                    next.push(rw * ri);
                }
            }
            cur = next;
        }
        cur
    }

    /// h∘F_w|V0 for every word of length n, flattened word-major.
    pub fn restrictions(&self, u0: &[f64], n: usize) -> Vec<f64> {
        let nb = self.n_boundary();
        let s = self.alphabet();
        let mut cur = u0.to_vec();
        for _ in 0..n {
            let mut next = vec![0.0; cur.len() * s];
            for (idx, v) in cur.chunks(nb).enumerate() {
                for (i, a) in self.ext.iter().enumerate() {
                    let out = &mut next[(idx * s + i) * nb..(idx * s + i + 1) * nb];
                    for j in 0..nb {
                        out[j] = (0..nb).map(|k| a[(j, k)] * v[k]).sum();
                    }
                }
            }
            cur = next;
        }
        cur
    }

    /// Harmonic extension of u0 to V_n (ids of `net`).
    pub fn harmonic_extension(&self, net: &LevelNetwork, u0: &[f64]) -> Vec<f64> {
        let nb = self.n_boundary();
        let vals = self.restrictions(u0, net.level);
        let mut u = vec![0.0; net.n_vertices()];
        for (k, &id) in net.cells.iter().enumerate() {
            u[id] = vals[k];
        }
        u[..nb].copy_from_slice(u0);
        u
    }

    /// E^(n)(u,u) by summation over cells.
    pub fn graph_energy(&self, net: &LevelNetwork, u: &[f64]) -> f64 {
        let nb = self.n_boundary();
        let rw = self.weights(net.level);
        let mut buf = vec![0.0; nb];
        let mut e = 0.0;
        for (idx, r) in rw.iter().enumerate() {
            for (j, &id) in net.cell(idx).iter().enumerate() {
                buf[j] = u[id];
            }
            e += self.hs.energy0(&buf) / r;
        }
        e
    }

    /// Sparse Laplacian of E^(n).
    pub fn laplacian(&self, net: &LevelNetwork) -> Laplacian {
        let nb = self.n_boundary();
        let rw = self.weights(net.level);
        let mut edges = Vec::with_capacity(rw.len() * nb * (nb - 1) / 2);
        for (idx, r) in rw.iter().enumerate() {
            let c = net.cell(idx);
            for p in 0..nb {
                for q in (p + 1)..nb {
                    let d = self.hs.d[(p, q)];
                    if d > 0.0 {
                        edges.push((c[p], c[q], d / r));
                    }
                }
            }
        }
        Laplacian::from_edges(net.n_vertices(), &edges)
    }

    /// Effective resistance between two vertices of the level-n network.
    pub fn resistance(&self, lap: &Laplacian, v1: usize, v2: usize, solver: Solver) -> Result<f64> {
        if v1 == v2 {
            return Ok(0.0);
        }
        let n = lap.n();
        let mut fixed = vec![None; n];
        fixed[v2] = Some(0.0);
        let mut b = vec![0.0; n];
        b[v1] = 1.0;
        let sol = solve_dirichlet(lap, &fixed, Some(&b), solver)?;
        let comp = lap.components();
        if comp[v1] != comp[v2] {
            return Err(Error::Disconnected(format!("vertices {v1} and {v2}")));
        }
        Ok(sol.u[v1])
    }

    /// E(h,h) of the 0-harmonic function with boundary values u0.
    pub fn energy_of_harmonic(&self, u0: &[f64]) -> f64 {
        self.hs.energy0(u0)
    }
}

/// Convenience wrapper for a single resistance query at level n.
pub fn resistance_metric(pcf: &Pcf, n: usize, v1: usize, v2: usize) -> Result<f64> {
    let net = build_level(&pcf.ss, n);
    let lap = pcf.laplacian(&net);
    pcf.resistance(&lap, v1, v2, Solver::Auto)
}

/// Solve Σ r_i^s = 1 by bisection.
pub fn hausdorff_weight_dimension(hs: &HarmonicStructure) -> Result<f64> {
    let f = |s: f64| hs.r.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    if f(0.0) <= 0.0 {
        return Err(Error::Dimension("need at least two weights".into()));
    }
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Dimension("no root below 1e6".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let d = 0.5 * (lo + hi);
    if d < 1.0 - 1e-12 {
        return Err(Error::Dimension(format!("d_H = {d} < 1")));
    }
    Ok(d)
}

/// Spectrum of F_w* on H0 and on H0 modulo constants.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub word: Word,
    /// Eigenvalues of A_w on H0, sorted by decreasing real part: (re, im).
    pub full: Vec<(f64, f64)>,
    /// Eigenvalues on the quotient by constants.
    pub quotient: Vec<(f64, f64)>,
    /// Real eigenvalues of the quotient with V0 representatives of their eigenvectors.
    pub eigenvectors: Vec<(f64, Vec<Vec<f64>>)>,
}

/// Orthonormal basis of the complement of constants (Helmert), as columns.
pub fn helmert_basis(n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n - 1);
    for k in 1..n {
        let c = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            q[(i, k - 1)] = c;
        }
        q[(k, k - 1)] = -(k as f64) * c;
    }
    q
}

fn sorted_eigs(m: &DMatrix<f64>) -> Vec<(f64, f64)> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut e: Vec<(f64, f64)> = m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    e.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    e
}

pub fn fw_star_spectrum(pcf: &Pcf, w: &Word) -> Spectrum {
    let a = pcf.extension_matrix(w);
    let nb = pcf.n_boundary();
    let q = helmert_basis(nb);
    let m = q.transpose() * &a * &q;
    let full = sorted_eigs(&a);
    let quotient = sorted_eigs(&m);
    let mut eigenvectors: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
    let scale = m.amax().max(1.0);
    for &(re, im) in &quotient {
        if im.abs() > 1e-9 * scale || eigenvectors.iter().any(|(l, _)| (l - re).abs() < 1e-8 * scale) {
            continue;
        }
        let shifted = &m - DMatrix::identity(nb - 1, nb - 1) * re;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let mut vecs = Vec::new();
        for (k, &sv) in svd.singular_values.iter().enumerate() {
            if sv <= 1e-8 * scale {
                let y = vt.row(k).transpose();
                let v = &q * y;
                let mut v: Vec<f64> = v.iter().copied().collect();
                let e = pcf.hs.energy0(&v);
                if e > 0.0 {
                    let s = 1.0 / e.sqrt();
                    v.iter_mut().for_each(|x| *x *= s);
                }
                vecs.push(v);
            }
        }
        eigenvectors.push((re, vecs));
    }
    Spectrum { word: w.clone(), full, quotient, eigenvectors }
}
