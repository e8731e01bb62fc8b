use super::WeightedMeasure1D;
use crate::{Error, Result};
use serde::Serialize;

/// Dyadic levels required for an A∞ verdict.
pub const MIN_DYADIC_LEVELS: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct RhRow {
    pub set: usize,
    pub ratio_p: f64,
    pub ratio_sqrt: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhReport {
    /// max (⨍w^p)^{1/p} / ⨍w.
    pub c_p: f64,
    /// max ⨍w / (⨍√w)².
    pub c_sqrt: f64,
    pub rows: Vec<RhRow>,
}

/// Both reverse-Hölder forms of `w` against `m` on each vertex set.
pub fn reverse_holder_check(m: &[f64], w: &[f64], p: f64, sets: &[Vec<usize>]) -> Result<RhReport> {
    if m.len() != w.len() {
        return Err(Error::Param("measure and weight differ in length".into()));
    }
    if !(p > 1.0) {
        return Err(Error::Param(format!("exponent p must exceed 1, got {p}")));
    }
    let mut rows = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        let mass: f64 = set.iter().map(|&v| m[v]).sum();
        if !(mass > 0.0) {
            continue;
        }
        let avg = |f: &dyn Fn(f64) -> f64| set.iter().map(|&v| m[v] * f(w[v])).sum::<f64>() / mass;
        let a1 = avg(&|x| x);
        let ap = avg(&|x| x.powf(p));
        let ah = avg(&f64::sqrt);
        let ratio_p = if a1 > 0.0 { ap.powf(1.0 / p) / a1 } else { f64::INFINITY };
        let ratio_sqrt = if ah > 0.0 { a1 / (ah * ah) } else { f64::INFINITY };
        rows.push(RhRow { set: i, ratio_p, ratio_sqrt });
    }
    let c_p = rows.iter().map(|r| r.ratio_p).fold(1.0, f64::max);
    let c_sqrt = rows.iter().map(|r| r.ratio_sqrt).fold(1.0, f64::max);
    Ok(RhReport { c_p, c_sqrt, rows })
}

/// Dyadic subintervals of [lo, hi] at `level` as index sets of the points `x` (half-open, last one closed).
pub fn dyadic_sets(x: &[f64], lo: f64, hi: f64, level: usize) -> Vec<Vec<usize>> {
    let k = 1usize << level;
    let mut sets = vec![Vec::new(); k];
    for (i, &t) in x.iter().enumerate() {
        if t < lo || t > hi {
            continue;
        }
        let j = (((t - lo) / (hi - lo)) * k as f64).floor() as usize;
        sets[j.min(k - 1)].push(i);
    }
    sets
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicRh {
    /// (level, c_p, c_sqrt).
    pub per_level: Vec<(usize, f64, f64)>,
    pub c_p: f64,
    pub c_sqrt: f64,
    /// Finite constants across at least MIN_DYADIC_LEVELS levels.
    pub a_infinity: bool,
}

/// Reverse-Hölder constants over dyadic intervals of levels 0..=max_level.
pub fn dyadic_reverse_holder(
    x: &[f64],
    m: &[f64],
    w: &[f64],
    p: f64,
    lo: f64,
    hi: f64,
    max_level: usize,
) -> Result<DyadicRh> {
    let mut per_level = Vec::new();
    for level in 0..=max_level {
        let r = reverse_holder_check(m, w, p, &dyadic_sets(x, lo, hi, level))?;
        per_level.push((level, r.c_p, r.c_sqrt));
    }
    let c_p = per_level.iter().map(|r| r.1).fold(1.0, f64::max);
    let c_sqrt = per_level.iter().map(|r| r.2).fold(1.0, f64::max);
    let a_infinity = per_level.len() >= MIN_DYADIC_LEVELS && c_p.is_finite() && c_sqrt.is_finite();
    Ok(DyadicRh { per_level, c_p, c_sqrt, a_infinity })
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussianReport {
    /// sup over dyadic [a,b] of ((b−a)∫g)^{1/2} / ∫√g.
    pub c: f64,
    pub admissible: bool,
    pub per_level: Vec<f64>,
    pub infinite_intervals: usize,
    /// d_int between the grid endpoints.
    pub d_int_total: f64,
}

/// The 1-D Gaussian-uniformization constant over dyadic subintervals of the grid's span.
pub fn gaussian_1d_check(w: &WeightedMeasure1D, max_level: usize) -> Result<GaussianReport> {
    let (lo, hi) = (w.lo(), w.hi());
    let mut per_level = Vec::with_capacity(max_level + 1);
    let mut infinite_intervals = 0;
    for level in 0..=max_level {
        let k = 1usize << level;
        let mut worst: f64 = 0.0;
        for j in 0..k {
            let a = lo + (hi - lo) * j as f64 / k as f64;
            let b = lo + (hi - lo) * (j + 1) as f64 / k as f64;
            let g = w.integral(a, b);
            let s = w.sqrt_integral(a, b);
            let c = if s > 0.0 { ((b - a) * g).sqrt() / s } else { f64::INFINITY };
            if c.is_infinite() {
                infinite_intervals += 1;
            }
            worst = worst.max(c);
        }
        per_level.push(worst);
    }
    let c = per_level.iter().copied().fold(0.0, f64::max);
    Ok(GaussianReport {
        c,
        admissible: c.is_finite(),
        per_level,
        infinite_intervals,
        d_int_total: w.d_int(lo, hi),
    })
}
