use crate::linalg;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// All-pairs maximal semi-metric below h̃ = min(h(x,y), h(y,x)), row-major.
pub fn max_semimetric(n: usize, h: impl Fn(usize, usize) -> f64 + Sync + Send) -> Vec<f64> {
    let mut d = crate::par::map_range(n, |i| {
        (0..n).map(|j| if i == j { 0.0 } else { h(i, j).min(h(j, i)) }).collect::<Vec<f64>>()
    })
    .concat();
    linalg::floyd_warshall(n, &mut d);
    d
}

/// Distances d_h(src, ·) by dense Dijkstra, for point sets too large for all pairs.
pub fn max_semimetric_from(n: usize, h: impl Fn(usize, usize) -> f64, src: usize) -> Vec<f64> {
    linalg::dense_dijkstra(n, |i, j| h(i, j).min(h(j, i)), src)
}

const GL_NODES: usize = 48;

fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| {
        let n = GL_NODES;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    let (mut q0, mut q1) = (1.0, z);
                    for k in 2..=n {
                        let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                        q0 = q1;
                        q1 = q2;
                    }
                    let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                    x[i] = z;
                    w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                    break;
                }
            }
        }
        (x, w)
    })
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gauss_legendre();
    let (c, r) = ((a + b) / 2.0, (b - a) / 2.0);
    x.iter().zip(w).map(|(&t, &wt)| wt * f(c + r * t)).sum::<f64>() * r
}

/// The plane with μ = |x₁|^t dm and the pair function h(x,y) = (μ(B)·d^γ / m(B))^{1/2}, B = B(x, d(x,y)).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerWeightPlane {
    pub t: f64,
    pub gamma: f64,
}

impl PowerWeightPlane {
    /// μ(B(x, d)) for a center with first coordinate x1.
    pub fn ball_mass(&self, x1: f64, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        let f = |th: f64| 2.0 * d * d * th.cos().powi(2) * (x1 + d * th.sin()).abs().powf(self.t);
        let (lo, hi) = (-PI / 2.0, PI / 2.0);
        if x1.abs() < d {
            let th0 = (-x1 / d).asin();
            integrate(f, lo, th0) + integrate(f, th0, hi)
        } else {
            integrate(f, lo, hi)
        }
    }

    pub fn h(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        if d == 0.0 {
            return 0.0;
        }
        (self.ball_mass(x[0], d) * d.powf(self.gamma) / (PI * d * d)).sqrt()
    }

    /// d_h between (0,0) and (0,1) through the grid {(i·s, j·s) : |i| ≤ columns, 0 ≤ j ≤ 2^k}, s = 2^{-k}.
    pub fn axis_distance(&self, k: u32, columns: i64) -> f64 {
        let m = 1i64 << k;
        let s = 1.0 / m as f64;
        let pts: Vec<(i64, i64)> = (-columns..=columns).flat_map(|i| (0..=m).map(move |j| (i, j))).collect();
        let src = pts.iter().position(|&p| p == (0, 0)).unwrap();
        let dst = pts.iter().position(|&p| p == (0, m)).unwrap();
        let mut cache: HashMap<(i64, i64), f64> = HashMap::new();
        let mut h_of = |a: (i64, i64), b: (i64, i64)| -> f64 {
            let (di, dj) = (a.0 - b.0, a.1 - b.1);
            let q = di * di + dj * dj;
            if q == 0 {
                return 0.0;
            }
            let key = (a.0.abs(), q);
            let d = s * (q as f64).sqrt();
            let mass = *cache.entry(key).or_insert_with(|| self.ball_mass(s * a.0.abs() as f64, d));
            (mass * d.powf(self.gamma) / (PI * d * d)).sqrt()
        };
        let n = pts.len();
        let mut table = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                table[i * n + j] = h_of(pts[i], pts[j]);
            }
        }
        max_semimetric_from(n, |i, j| table[i * n + j], src)[dst]
    }
}
