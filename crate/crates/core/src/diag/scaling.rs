use super::{capacity, GraphForm};
use crate::metric::{linear_fit, FiniteMetricSpace};
use crate::{Error, Result};
use serde::Serialize;

/// Fewer octaves than this raise the insufficient-scales flag.
pub const MIN_OCTAVES: f64 = 4.0;
/// Reverse-doubling exponents at or below this count as failure.
pub const RVD_MIN_EXPONENT: f64 = 0.1;
/// |log-log slope| of per-scale constants above which a monotone trend is flagged.
pub const TREND_SLOPE: f64 = 0.25;
/// Largest max/min of per-scale means still called flat.
pub const FLAT_RATIO_MAX: f64 = 3.0;

/// Masses of the open balls B(x, r) for every r in `radii`.
pub fn ball_masses(space: &FiniteMetricSpace, measure: &[f64], x: usize, radii: &[f64]) -> Vec<f64> {
    let mut pairs: Vec<(f64, f64)> = (0..space.len()).map(|y| (space.dist(x, y), measure[y])).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cum = Vec::with_capacity(pairs.len() + 1);
    cum.push(0.0);
    for p in &pairs {
        cum.push(cum.last().unwrap() + p.1);
    }
    radii.iter().map(|&r| cum[pairs.partition_point(|p| p.0 < r)]).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct VdRow {
    pub center: usize,
    pub r: f64,
    pub m_r: f64,
    pub m_2r: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VdReport {
    /// max m(B(x,2r))/m(B(x,r)).
    pub c_d: f64,
    /// min over r < R of [m(B(x,R))/m(B(x,r))]·(r/R)^α.
    pub c_rvd: f64,
    /// Pooled within-center log–log slope of r ↦ m(B(x,r)).
    pub alpha: f64,
    pub octaves: f64,
    pub insufficient_scales: bool,
    pub rvd_ok: bool,
    pub rows: Vec<VdRow>,
}

/// Volume doubling and reverse doubling over sampled centers and radii r ≤ diam/C₂.
pub fn vd_rvd_check(
    space: &FiniteMetricSpace,
    measure: &[f64],
    centers: &[usize],
    radii: &[f64],
    c2: f64,
) -> Result<VdReport> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    let cutoff = space.diameter() / c2;
    let mut rs: Vec<f64> = radii.iter().copied().filter(|&r| r > 0.0 && r <= cutoff).collect();
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    if rs.is_empty() || centers.is_empty() {
        return Err(Error::Param("no admissible (center, radius) samples".into()));
    }
    let all: Vec<f64> = rs.iter().flat_map(|&r| [r, 2.0 * r]).collect();
    let per = crate::par::map(centers, |&x| ball_masses(space, measure, x, &all));
    let mut rows = Vec::new();
    let mut c_d: f64 = 1.0;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    let mut alpha_pts: Vec<Vec<(f64, f64)>> = Vec::new();
    for (ci, &x) in centers.iter().enumerate() {
        let mut pts = Vec::new();
        for (k, &r) in rs.iter().enumerate() {
            let (m_r, m_2r) = (per[ci][2 * k], per[ci][2 * k + 1]);
            rows.push(VdRow { center: x, r, m_r, m_2r });
            if m_r > 0.0 {
                c_d = c_d.max(m_2r / m_r);
                pts.push((r.ln(), m_r.ln()));
            }
        }
        if pts.len() >= 2 {
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            for p in &pts {
                sxy += (p.0 - mx) * (p.1 - my);
                sxx += (p.0 - mx).powi(2);
            }
        }
        alpha_pts.push(pts);
    }
    let alpha = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let mut c_rvd = f64::INFINITY;
    for pts in &alpha_pts {
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                c_rvd = c_rvd.min(((pts[j].1 - pts[i].1) - alpha * (pts[j].0 - pts[i].0)).exp());
            }
        }
    }
    let octaves = (rs[rs.len() - 1] / rs[0]).log2();
    let insufficient_scales = octaves < MIN_OCTAVES;
    Ok(VdReport {
        c_d,
        c_rvd,
        alpha,
        octaves,
        insufficient_scales,
        rvd_ok: alpha >= RVD_MIN_EXPONENT && !insufficient_scales,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendReport {
    /// (scale, geometric mean of the per-sample constant) sorted by scale.
    pub scale_means: Vec<(f64, f64)>,
    pub slope: f64,
    /// max/min of the per-scale means.
    pub flat_ratio: f64,
    pub monotone: bool,
    pub flagged: bool,
}

/// Groups (scale, value) samples by scale and tests for a monotone power-law drift.
pub fn trend(samples: &[(f64, f64)]) -> TrendReport {
    let mut s: Vec<(f64, f64)> = samples.iter().copied().filter(|p| p.1 > 0.0 && p.1.is_finite()).collect();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut means: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let mut j = i;
        let mut acc = 0.0;
        while j < s.len() && s[j].0 == s[i].0 {
            acc += s[j].1.ln();
            j += 1;
        }
        means.push((s[i].0, (acc / (j - i) as f64).exp()));
        i = j;
    }
    let logs: Vec<(f64, f64)> = means.iter().map(|p| (p.0.ln(), p.1.ln())).collect();
    let slope = linear_fit(&logs).map(|f| f.0).unwrap_or(0.0);
    let inc = means.windows(2).all(|w| w[1].1 > w[0].1);
    let dec = means.windows(2).all(|w| w[1].1 < w[0].1);
    let monotone = means.len() >= 2 && (inc || dec);
    let hi = means.iter().map(|p| p.1).fold(0.0, f64::max);
    let lo = means.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    TrendReport {
        flat_ratio: if means.is_empty() { 1.0 } else { hi / lo },
        flagged: monotone && slope.abs() > TREND_SLOPE && means.len() >= MIN_OCTAVES as usize,
        scale_means: means,
        slope,
        monotone,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CapBetaRow {
    pub center: usize,
    pub r: f64,
    pub cap: f64,
    pub mass: f64,
    /// Cap·R^β / m(B(x,R)).
    pub q: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CapBetaReport {
    /// Two-sided constant: max over rows of max(q, 1/q).
    pub c1: f64,
    pub rows: Vec<CapBetaRow>,
    /// Samples skipped because B(x, A₁R)^c is empty.
    pub skipped: usize,
    pub trend: TrendReport,
}

/// Compares Cap(B(x,R), B(x,A₁R)^c) with m(B(x,R))/R^β over the sampled (x, R).
pub fn cap_beta_check(
    form: &GraphForm,
    space: &FiniteMetricSpace,
    beta: f64,
    a1: f64,
    samples: &[(usize, f64)],
) -> Result<CapBetaReport> {
    if !(a1 > 1.0) {
        return Err(Error::Param(format!("A1 must exceed 1, got {a1}")));
    }
    form.check_space(space)?;
    let n = space.len();
    let out = crate::par::map(samples, |&(x, r)| -> Result<Option<CapBetaRow>> {
        let inner: Vec<usize> = (0..n).filter(|&v| space.dist(x, v) < r).collect();
        let outer: Vec<usize> = (0..n).filter(|&v| space.dist(x, v) >= a1 * r).collect();
        if outer.is_empty() {
            return Ok(None);
        }
        let cap = capacity(form, &inner, &outer)?.cap;
        let mass = form.mass(&inner);
        Ok(Some(CapBetaRow { center: x, r, cap, mass, q: cap * r.powf(beta) / mass }))
    });
    let mut rows = Vec::new();
    let mut skipped = 0;
    for o in out {
        match o? {
            Some(r) => rows.push(r),
            None => skipped += 1,
        }
    }
    let c1 = rows.iter().map(|r| r.q.max(1.0 / r.q)).fold(1.0, f64::max);
    let trend = trend(&rows.iter().map(|r| (r.r, r.q)).collect::<Vec<_>>());
    Ok(CapBetaReport { c1, rows, skipped, trend })
}
