use super::{
    check_h1, check_h2, check_h3prime, s1_minimum, s2_ratio, FillingGraph, GentleFunction, H1Report, H3Report,
    SigmaFunction, WeightFunction,
};
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};
use serde::Serialize;

/// Relative tolerance of the per-parent normalization.
pub const BALANCE_RTOL: f64 = 1e-10;
/// Level-mass drift tolerated by [`measure_from_weights`].
pub const DRIFT_TOL: f64 = 1e-8;
const BISECTION_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum SynthesisPolicy {
    /// Stop on the first violated hypothesis.
    #[default]
    Strict,
    /// Record violations and carry on.
    Report,
}

#[derive(Clone, Debug, Serialize)]
pub enum Unbalanced {
    /// No non-peripheral child to absorb the correction.
    NoNonPeripheralChild,
    /// Σ ρ̂^β𝒞 already exceeds 𝒞(B).
    Overfull { ratio: f64 },
    /// Even ω → 1 leaves Σ ρ^β𝒞 below 𝒞(B).
    Underfull { ratio: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct SynthesisReport {
    pub beta: f64,
    pub d_h: usize,
    pub d_v: usize,
    pub k_h: f64,
    pub k_v: f64,
    pub eta0: f64,
    pub eta_minus: f64,
    /// (1/2) ∨ (1−δ)^{1/β} when (E) holds.
    pub eta_plus_bound: Option<f64>,
    pub sigma_max: f64,
    pub sigma_over_quarter: usize,
    pub s1_min: Option<f64>,
    pub s1_ok: bool,
    pub s2_ratio: f64,
    pub s2_ok: bool,
    pub e_holds: bool,
    /// β ≤ 2 loses the a^{−(β−2)η} margin of the gradient construction.
    pub beta_margin_flag: bool,
    pub omega: Vec<Option<f64>>,
    pub unbalanced: Vec<(usize, Unbalanced)>,
    /// max over balanced parents of |Σ ρ^β𝒞 − 𝒞(B)|/𝒞(B).
    pub balance_error: f64,
    pub h1: H1Report,
    pub k0: f64,
    pub k0_bound: f64,
    pub h3: H3Report,
    pub k2: f64,
}

fn children_sum(graph: &FillingGraph, gentle: &GentleFunction, rho: &[f64], beta: f64, v: usize) -> f64 {
    graph.children[v].iter().map(|&u| rho[u].powf(beta) * gentle.c[u]).sum()
}

/// Weight synthesis from σ: floor at η₋, smoothing over 2-neighbourhoods, horizontal π correction,
/// then per-parent normalization Σ_{children} ρ^β𝒞 = 𝒞(B) through ω_B on non-peripheral children.
pub fn synthesize_weight(
    graph: &FillingGraph,
    space: &FiniteMetricSpace,
    gentle: &GentleFunction,
    sigma: &SigmaFunction,
    beta: f64,
    policy: SynthesisPolicy,
) -> Result<(WeightFunction, SynthesisReport)> {
    if !(beta > 0.0) {
        return Err(Error::Param(format!("beta must be positive, got {beta}")));
    }
    let n = graph.len();
    let strict = policy == SynthesisPolicy::Strict;
    let (d_h, d_v) = (graph.d_h as f64, graph.d_v.max(1) as f64);
    let (k_h, k_v) = (gentle.k_h, gentle.k_v);
    let eta0 = 1.0 / (2f64.powf(beta + 2.0) * k_h.powi(3) * d_h.powi(3));
    let eta_minus = (eta0 / (k_v * d_v)).powf(1.0 / beta).min(0.25);

    let s1 = s1_minimum(graph, space, &sigma.sigma);
    let s1_ok = s1.map_or(true, |(_, c)| c >= 1.0);
    if strict && !s1_ok {
        let (vertex, sum) = s1.unwrap();
        return Err(Error::S1Violated { vertex, sum });
    }
    let (s2_vertex, s2) = s2_ratio(graph, gentle, &sigma.sigma, beta);
    let s2_ok = s2 <= eta0;
    if strict && !s2_ok {
        return Err(Error::S2Violated { eta0, vertex: s2_vertex, ratio: s2 });
    }
    if strict {
        if let Some(&v) = gentle.no_np_parents.first() {
            return Err(Error::NoNonPeripheralChild(v));
        }
    }

    let tau: Vec<f64> = sigma.sigma.iter().map(|&s| s.max(eta_minus)).collect();
    let tau_t: Vec<f64> = (0..n)
        .map(|v| 2.0 * graph.two_neighbourhood(v).iter().map(|&u| tau[u]).fold(0.0, f64::max))
        .collect();

    // Level-by-level π correction in log space with K = 1/η₋.
    let log_k = -eta_minus.ln();
    let mut rho_hat = vec![0.5; n];
    let mut log_pi_hat = vec![0.5f64.ln(); n];
    for k in 1..=graph.max_level() {
        let ids = &graph.levels[k];
        let log_pi1: Vec<f64> = ids.iter().map(|&v| tau_t[v].ln() + log_pi_hat[graph.parent[v].unwrap()]).collect();
        let base = ids[0];
        for (i, &v) in ids.iter().enumerate() {
            let nb = graph.horizontal[v].iter().map(|&u| log_pi1[u - base]).fold(log_pi1[i], f64::max);
            let lp = log_pi1[i].max(nb - log_k);
            let lp0 = log_pi_hat[graph.parent[v].unwrap()];
            log_pi_hat[v] = lp;
            rho_hat[v] = (lp - lp0).exp();
        }
    }

    let mut rho = rho_hat.clone();
    let mut omega = vec![None; n];
    let mut unbalanced = Vec::new();
    let mut balance_error: f64 = 0.0;
    for v in 0..n {
        if graph.children[v].is_empty() {
            continue;
        }
        let target = gentle.c[v];
        let np: Vec<usize> = graph.children[v]
            .iter()
            .copied()
            .filter(|&u| graph.level(v) == 0 || gentle.non_peripheral[u])
            .collect();
        if np.is_empty() {
            unbalanced.push((v, Unbalanced::NoNonPeripheralChild));
            continue;
        }
        let f = |w: f64| -> f64 {
            graph.children[v]
                .iter()
                .map(|&u| {
                    let r = if np.contains(&u) { rho_hat[u].max(w) } else { rho_hat[u] };
                    r.powf(beta) * gentle.c[u]
                })
                .sum()
        };
        let f0 = f(0.0);
        if f0 > target * (1.0 + BALANCE_RTOL) {
            unbalanced.push((v, Unbalanced::Overfull { ratio: f0 / target }));
            continue;
        }
        let f1 = f(1.0);
        if f1 < target * (1.0 - BALANCE_RTOL) {
            unbalanced.push((v, Unbalanced::Underfull { ratio: f1 / target }));
            continue;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if f(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        let w = 0.5 * (lo + hi);
        omega[v] = Some(w);
        for &u in &np {
            rho[u] = rho_hat[u].max(w);
        }
        balance_error = balance_error.max((children_sum(graph, gentle, &rho, beta, v) - target).abs() / target);
    }

    let weight = WeightFunction::new(graph, rho)?;
    let h1 = check_h1(&weight);
    let k0 = check_h2(graph, &weight);
    let h3 = check_h3prime(graph, space, &weight);
    let k2 = compatibility_check(graph, &weight, gentle, beta);
    let report = SynthesisReport {
        beta,
        d_h: graph.d_h,
        d_v: graph.d_v,
        k_h,
        k_v,
        eta0,
        eta_minus,
        eta_plus_bound: gentle.e_holds.then(|| 0.5f64.max((1.0 - gentle.e_delta).powf(1.0 / beta))),
        sigma_max: sigma.max,
        sigma_over_quarter: sigma.over_quarter,
        s1_min: s1.map(|s| s.1),
        s1_ok,
        s2_ratio: s2,
        s2_ok,
        e_holds: gentle.e_holds,
        beta_margin_flag: beta <= 2.0,
        omega,
        unbalanced,
        balance_error,
        h1,
        k0,
        k0_bound: eta_minus.powi(-3),
        h3,
        k2,
    };
    Ok((weight, report))
}

/// K₂: worst two-sided ratio of Σ_{D_n(B)} π^β𝒞 to π(B)^β𝒞(B) over all B and depths.
pub fn compatibility_check(graph: &FillingGraph, w: &WeightFunction, gentle: &GentleFunction, beta: f64) -> f64 {
    let n = graph.len();
    // ratios[v][j] = Σ_{D_{level+j+1}(v)} π^β𝒞 / π(v)^β𝒞(v)
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut worst: f64 = 1.0;
    for v in (0..n).rev() {
        let depth = graph.max_level() - graph.level(v);
        let mut r = vec![0.0; depth];
        for &c in &graph.children[v] {
            let q = w.rho[c].powf(beta) * gentle.c[c] / gentle.c[v];
            r[0] += q;
            for j in 1..depth {
                r[j] += q * ratios[c][j - 1];
            }
        }
        for &x in &r {
            if x > 0.0 {
                worst = worst.max(x).max(1.0 / x);
            } else {
                worst = f64::INFINITY;
            }
        }
        ratios[v] = r;
    }
    worst
}

/// Atomic measures μ_n = Σ_{B ∈ S_n} π(B)^β 𝒞(B) δ_{x_B}.
#[derive(Clone, Debug, Serialize)]
pub struct LevelMeasures {
    /// Atom masses per level, aligned with `graph.levels`.
    pub atoms: Vec<Vec<f64>>,
    pub totals: Vec<f64>,
    /// max |total_{n+1}/total_n − 1|.
    pub drift: f64,
    pub level: usize,
}

impl LevelMeasures {
    /// Mass of B(x, r) under the deepest μ_n.
    pub fn ball_mass(&self, graph: &FillingGraph, space: &FiniteMetricSpace, x: usize, r: f64) -> f64 {
        graph.levels[self.level]
            .iter()
            .zip(&self.atoms[self.level])
            .filter(|(&v, _)| space.dist(x, graph.center(v)) < r)
            .map(|(_, &m)| m)
            .sum()
    }

    /// Point masses on the space carried by the deepest μ_n.
    pub fn point_masses(&self, graph: &FillingGraph, n_points: usize) -> Vec<f64> {
        let mut m = vec![0.0; n_points];
        for (&v, &a) in graph.levels[self.level].iter().zip(&self.atoms[self.level]) {
            m[graph.center(v)] += a;
        }
        m
    }
}

pub fn measure_from_weights(
    graph: &FillingGraph,
    w: &WeightFunction,
    gentle: &GentleFunction,
    beta: f64,
    tol: f64,
) -> Result<LevelMeasures> {
    let atoms: Vec<Vec<f64>> = graph
        .levels
        .iter()
        .map(|ids| ids.iter().map(|&v| (beta * w.log_pi[v]).exp() * gentle.c[v]).collect())
        .collect();
    let totals: Vec<f64> = atoms.iter().map(|a| a.iter().sum()).collect();
    let mut drift: f64 = 0.0;
    for k in 1..totals.len() {
        let d = (totals[k] / totals[k - 1] - 1.0).abs();
        if d > tol {
            return Err(Error::CompatibilityDrift { level: k, ratio: totals[k] / totals[k - 1] });
        }
        drift = drift.max(d);
    }
    Ok(LevelMeasures { atoms, totals, drift, level: graph.max_level() })
}
