//! Degeneration witnesses: SG_N for N ≥ 3 and the Vicsek cross.

use super::harmonic::{resistance_metric, Pcf};
use super::measure::CellMeasure;
use super::structure::Word;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct DegenerationReport {
    pub n: usize,
    pub depth: usize,
    pub phi_boundary: Vec<f64>,
    /// (j, max |φ∘F_j − φ/(N+3)| on V0) for j ∉ {0,1}.
    pub phi_pullback_errors: Vec<(usize, f64)>,
    /// E(ψ − h_{0^k}, ψ − h_{0^k}) for k = 1..=depth.
    pub psi_errors: Vec<f64>,
    pub psi_rates: Vec<f64>,
    pub expected_psi_rate: f64,
    /// Σ_{w∈{2,3}^k} √(diam·E(φ∘F_w)) for k = 0..=depth.
    pub chain_sums: Vec<f64>,
    pub chain_ratios: Vec<f64>,
    pub expected_chain_ratio: f64,
    pub diam_surrogate: f64,
}

impl DegenerationReport {
    pub fn max_chain_ratio_error(&self) -> f64 {
        self.chain_ratios
            .iter()
            .map(|r| (r - self.expected_chain_ratio).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_pullback_error(&self) -> f64 {
        self.phi_pullback_errors.iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

pub fn sg_degeneration_probe(n: usize, depth: usize) -> Result<DegenerationReport> {
    if n < 3 {
        return Err(Error::Dimension(format!("degeneration probe needs N >= 3, got {n}")));
    }
    let pcf = Pcf::sg(n)?;
    let nb = n + 1;
    let nf = n as f64;
    let c = 1.0 / (nf.sqrt() * (nf + 3.0));
    let mut phi = vec![0.0; nb];
    phi[0] = c;
    phi[1] = -c;

    let phi_pullback_errors = (2..nb)
        .map(|j| {
            let a = &pcf.ext[j];
            let err = (0..nb)
                .map(|p| {
                    let v: f64 = (0..nb).map(|k| a[(p, k)] * phi[k]).sum();
                    (v - phi[p] / (nf + 3.0)).abs()
                })
                .fold(0.0, f64::max);
            (j, err)
        })
        .collect();

    let mut psi = vec![0.0; nb];
    psi[0] = 1.0 / nf.sqrt();
    let mut h: Vec<f64> = (0..nb).map(|j| 1.0 / (j as f64 + 1.0)).collect();
    let mut psi_errors = Vec::with_capacity(depth);
    for _ in 0..depth {
        h = (0..nb).map(|p| (0..nb).map(|k| pcf.ext[0][(p, k)] * h[k]).sum()).collect();
        let e = pcf.hs.energy0(&h).sqrt();
        h.iter_mut().for_each(|x| *x /= e);
        if pcf.hs.bilinear0(&psi, &h) < 0.0 {
            h.iter_mut().for_each(|x| *x = -*x);
        }
        let diff: Vec<f64> = psi.iter().zip(&h).map(|(a, b)| a - b).collect();
        psi_errors.push(pcf.hs.energy0(&diff));
    }
    let psi_rates = psi_errors.windows(2).map(|w| w[1] / w[0]).collect();

    let diam_surrogate = (0..nb)
        .flat_map(|i| ((i + 1)..nb).map(move |j| (i, j)))
        .map(|(i, j)| resistance_metric(&pcf, 0, i, j))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut chain_sums = Vec::with_capacity(depth + 1);
    let mut layer = vec![phi.clone()];
    for k in 0..=depth {
        let s: f64 = layer.iter().map(|v| (diam_surrogate * pcf.hs.energy0(v)).sqrt()).sum();
        chain_sums.push(s);
        if k == depth {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * 2);
        for v in &layer {
            for j in [2usize, 3] {
                let a = &pcf.ext[j];
                next.push((0..nb).map(|p| (0..nb).map(|q| a[(p, q)] * v[q]).sum()).collect::<Vec<f64>>());
            }
        }
        layer = next;
    }
    let chain_ratios = chain_sums.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(DegenerationReport {
        n,
        depth,
        phi_boundary: phi,
        phi_pullback_errors,
        psi_errors,
        psi_rates,
        expected_psi_rate: 1.0 / ((nf + 1.0) * (nf + 1.0)),
        chain_sums,
        chain_ratios,
        expected_chain_ratio: 2.0 / (nf + 3.0),
        diam_surrogate,
    })
}

/// Mass of level-n Vicsek cells disjoint from both diagonals, and the number of such cells.
pub fn vicsek_off_diagonal_mass(pcf: &Pcf, mu: &CellMeasure) -> Result<(f64, usize)> {
    if pcf.ss.name != "vicsek" || !pcf.ss.is_exact() {
        return Err(Error::Param("diagonal test needs the built-in Vicsek structure".into()));
    }
    let s = pcf.alphabet();
    let mut mass = 0.0;
    let mut cells = 0;
    for (idx, m) in mu.masses.iter().enumerate() {
        let w = Word::from_index(idx, mu.level, s);
        let (_, c) = pcf.ss.exact_image(&w, &[0, 0]).expect("exact structure");
        // cell square has half-width 1 in units of 3^{-n}
        if (c[0] - c[1]).abs() > 2 && (c[0] + c[1]).abs() > 2 {
            mass += m;
            cells += 1;
        }
    }
    Ok((mass, cells))
}
