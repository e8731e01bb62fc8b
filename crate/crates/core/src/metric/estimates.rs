use super::FiniteMetricSpace;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashSet;

/// Centers used by the doubling estimate when the space is larger than this.
pub const DOUBLING_MAX_CENTERS: usize = 256;
/// Grid ratio for the uniform perfectness search.
pub const PERFECTNESS_GRID: f64 = 1.05;
pub const PERFECTNESS_MAX_CENTERS: usize = 2000;
pub const DISTORTION_EXHAUSTIVE_BELOW: usize = 100;
pub const DISTORTION_SAMPLES: usize = 200_000;

#[derive(Clone, Debug, Serialize)]
pub struct DoublingEstimate {
    pub k_d: usize,
    pub center: usize,
    pub radius: f64,
}

fn strided(n: usize, cap: usize) -> Vec<usize> {
    if n <= cap {
        return (0..n).collect();
    }
    (0..cap).map(|i| i * n / cap).collect()
}

/// Greedy cover count of the open ball B(x,r) by open r/2-balls centered at points.
pub fn greedy_cover(space: &FiniteMetricSpace, x: usize, r: f64) -> usize {
    let n = space.len();
    let ball: Vec<usize> = (0..n).filter(|&y| space.dist(x, y) < r).collect();
    let candidates: Vec<usize> = (0..n).filter(|&c| space.dist(x, c) < 1.5 * r).collect();
    let sets: Vec<Vec<usize>> = candidates
        .iter()
        .map(|&c| (0..ball.len()).filter(|&i| space.dist(c, ball[i]) < r / 2.0).collect())
        .collect();
    let mut covered = vec![false; ball.len()];
    let mut left = ball.len();
    let mut count = 0;
    while left > 0 {
        let (best, gain) = sets
            .iter()
            .enumerate()
            .map(|(j, s)| (j, s.iter().filter(|&&i| !covered[i]).count()))
            .fold((0, 0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if gain == 0 {
            break;
        }
        for &i in &sets[best] {
            if !covered[i] {
                covered[i] = true;
                left -= 1;
            }
        }
        count += 1;
    }
    count
}

/// Max greedy cover count over sampled centers and the given radii.
pub fn doubling_constant_estimate(space: &FiniteMetricSpace, radii: &[f64]) -> Result<DoublingEstimate> {
    doubling_constant_estimate_at(space, &strided(space.len(), DOUBLING_MAX_CENTERS), radii)
}

/// Same as [`doubling_constant_estimate`] with an explicit center set.
pub fn doubling_constant_estimate_at(
    space: &FiniteMetricSpace,
    centers: &[usize],
    radii: &[f64],
) -> Result<DoublingEstimate> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Param("radii must be nonempty and positive".into()));
    }
    let pairs: Vec<(usize, f64)> = centers.iter().flat_map(|&x| radii.iter().map(move |&r| (x, r))).collect();
    let counts = crate::par::map(&pairs, |&(x, r)| greedy_cover(space, x, r));
    let mut best = DoublingEstimate { k_d: 0, center: pairs[0].0, radius: pairs[0].1 };
    for (c, &(x, r)) in counts.iter().zip(&pairs) {
        if *c > best.k_d {
            best = DoublingEstimate { k_d: *c, center: x, radius: r };
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct PerfectnessEstimate {
    /// Grid value PERFECTNESS_GRID^j reported as K_P.
    pub k_p: f64,
    /// Largest consecutive distance ratio seen.
    pub raw: f64,
    pub center: usize,
}

/// Largest gap ratio between consecutive distinct distances from each sampled center.
/// Radii at or below the nearest-neighbour distance have an empty annulus for every K and are skipped.
pub fn uniform_perfectness_estimate(space: &FiniteMetricSpace) -> Result<PerfectnessEstimate> {
    let n = space.len();
    if n < 2 {
        return Err(Error::Degenerate("uniform perfectness needs at least two points".into()));
    }
    let centers = strided(n, PERFECTNESS_MAX_CENTERS);
    let per = crate::par::map(&centers, |&x| {
        let mut d: Vec<f64> = (0..n).filter(|&y| y != x).map(|y| space.dist(x, y)).collect();
        d.sort_by(f64::total_cmp);
        d.windows(2).map(|w| w[1] / w[0]).fold(1.0, f64::max)
    });
    let (i, raw) = per.iter().enumerate().fold((0, 1.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let j = ((raw.ln() / PERFECTNESS_GRID.ln()) - 1e-9).ceil().max(0.0);
    Ok(PerfectnessEstimate { k_p: PERFECTNESS_GRID.powf(j), raw, center: centers[i] })
}

/// Monotone envelope of observed distortion ratios.
#[derive(Clone, Debug, Serialize)]
pub struct DistortionProfile {
    /// (t, η̂(t)) breakpoints, t strictly increasing, η̂ nondecreasing.
    pub samples: Vec<(f64, f64)>,
    pub triples: usize,
    pub exhaustive: bool,
}

impl DistortionProfile {
    /// η̂ at the largest breakpoint ≤ t, or 0 below the first breakpoint.
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.samples.partition_point(|s| s.0 <= t);
        if k == 0 {
            0.0
        } else {
            self.samples[k - 1].1
        }
    }

    /// Least-squares fit η̂(t) ≈ c·max(t^α, t^{1/α}) restricted to t ≤ 1: returns (α, c).
    pub fn power_fit(&self) -> Option<(f64, f64)> {
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .filter(|s| s.0 > 0.0 && s.0 <= 1.0 && s.1 > 0.0)
            .map(|s| (s.0.ln(), s.1.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let (slope, icpt) = linear_fit(&pts)?;
        Some((slope, icpt.exp()))
    }
}

/// Ordinary least squares y = slope·x + intercept.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Empirical distortion of the identity map (X,d1) → (X,d2).
pub fn quasisymmetry_distortion_estimate(
    d1: &FiniteMetricSpace,
    d2: &FiniteMetricSpace,
    seed: u64,
) -> Result<DistortionProfile> {
    if d1.ids() != d2.ids() {
        return Err(Error::MetricMismatch("the two metrics are defined on different id sets".into()));
    }
    let n = d1.len();
    if n < 2 {
        return Err(Error::Degenerate("distortion needs at least two points".into()));
    }
    let ratio = |x: usize, a: usize, b: usize| (d1.dist(x, a) / d1.dist(x, b), d2.dist(x, a) / d2.dist(x, b));
    let exhaustive = n < DISTORTION_EXHAUSTIVE_BELOW;
    let mut raw: Vec<(f64, f64)> = if exhaustive {
        crate::par::map_range(n, |x| {
            let mut v = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    if b != x {
                        v.push(ratio(x, a, b));
                    }
                }
            }
            v
        })
        .concat()
    } else {
        let total = (n as u128) * (n as u128) * ((n - 1) as u128);
        let want = (DISTORTION_SAMPLES as u128).min(total) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = HashSet::with_capacity(want);
        let mut out = Vec::with_capacity(want);
        while out.len() < want {
            let (x, a, b) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            if b == x || !seen.insert((x, a, b)) {
                continue;
            }
            out.push(ratio(x, a, b));
        }
        out
    };
    let triples = raw.len();
    raw.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut run = 0.0f64;
    for (t, s) in raw {
        run = run.max(s);
        match samples.last_mut() {
            Some(last) if last.0 == t => last.1 = run,
            _ => samples.push((t, run)),
        }
    }
    Ok(DistortionProfile { samples, triples, exhaustive })
}
