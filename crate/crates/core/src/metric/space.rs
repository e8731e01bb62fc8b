use crate::{Error, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Triples checked exhaustively for the triangle inequality below this size.
pub const TRIANGLE_EXHAUSTIVE_MAX: usize = 60;
pub const TRIANGLE_SAMPLES: usize = 200_000;

#[derive(Clone, Debug, Serialize)]
enum Dist {
    Euclidean(Vec<Vec<f64>>),
    Matrix(Vec<f64>),
}

/// Finite metric space given by coordinates or an explicit distance matrix.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteMetricSpace {
    ids: Vec<String>,
    dist: Dist,
    scale: f64,
}

impl FiniteMetricSpace {
    /// Euclidean distances between coordinate rows; duplicate points are rejected.
    pub fn euclidean(ids: Vec<String>, coords: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != coords.len() {
            return Err(Error::Param("ids and coordinates differ in length".into()));
        }
        if let Some(first) = coords.first() {
            let d = first.len();
            if let Some(i) = coords.iter().position(|c| c.len() != d) {
                return Err(Error::Invariant { row: i + 1, col: d + 1, msg: "ragged coordinate row".into() });
            }
            if let Some((i, j)) = coords
                .iter()
                .enumerate()
                .find_map(|(i, c)| c.iter().position(|x| !x.is_finite()).map(|j| (i, j)))
            {
                return Err(Error::Invariant { row: i + 1, col: j + 2, msg: "non-finite coordinate".into() });
            }
        }
        let mut order: Vec<usize> = (0..coords.len()).collect();
        order.sort_by(|&a, &b| {
            coords[a]
                .iter()
                .zip(&coords[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for w in order.windows(2) {
            if coords[w[0]] == coords[w[1]] {
                return Err(Error::Invariant {
                    row: w[0].max(w[1]) + 1,
                    col: 0,
                    msg: format!("points {} and {} coincide", ids[w[0]], ids[w[1]]),
                });
            }
        }
        Ok(FiniteMetricSpace { ids, dist: Dist::Euclidean(coords), scale: 1.0 })
    }

    /// Coordinates without explicit ids (ids are row numbers).
    pub fn from_coords(coords: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..coords.len()).map(|i| i.to_string()).collect();
        Self::euclidean(ids, coords)
    }

    /// Explicit matrix, row-major; validated for symmetry, zero diagonal, positivity and sampled triangles.
    pub fn from_matrix(ids: Vec<String>, matrix: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if matrix.len() != n * n {
            return Err(Error::Param(format!("distance matrix must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                let v = matrix[i * n + j];
                let inv = |msg: String| Error::Invariant { row: i + 1, col: j + 1, msg };
                if !v.is_finite() || v < 0.0 {
                    return Err(inv(format!("d({},{}) = {v} is not a nonnegative real", ids[i], ids[j])));
                }
                if i == j && v != 0.0 {
                    return Err(inv(format!("d({0},{0}) = {v} must be 0", ids[i])));
                }
                if i != j && v == 0.0 {
                    return Err(inv(format!("d({},{}) = 0 for distinct points", ids[i], ids[j])));
                }
                if v != matrix[j * n + i] {
                    return Err(inv(format!(
                        "asymmetric entry: d({},{}) = {v} but d({},{}) = {}",
                        ids[i],
                        ids[j],
                        ids[j],
                        ids[i],
                        matrix[j * n + i]
                    )));
                }
            }
        }
        let space = FiniteMetricSpace { ids, dist: Dist::Matrix(matrix), scale: 1.0 };
        if let Some((x, y, z)) = space.triangle_violation(0) {
            return Err(Error::Invariant {
                row: x + 1,
                col: y + 1,
                msg: format!("triangle inequality fails through point {}", space.ids[z]),
            });
        }
        Ok(space)
    }

    /// Equispaced points on [lo, hi].
    pub fn grid_1d(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n == 1 {
            return Self::from_coords(vec![vec![lo]]);
        }
        let h = (hi - lo) / (n - 1) as f64;
        Self::from_coords((0..n).map(|i| vec![lo + h * i as f64]).collect())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        match &self.dist {
            Dist::Euclidean(c) => Some(c),
            Dist::Matrix(_) => None,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        let d = match &self.dist {
            Dist::Euclidean(c) => c[i].iter().zip(&c[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            Dist::Matrix(m) => m[i * self.ids.len() + j],
        };
        d * self.scale
    }

    /// Distances from `i` to every point.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.len()).map(|j| self.dist(i, j)).collect()
    }

    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let rows = crate::par::map_range(n, |i| ((i + 1)..n).map(|j| self.dist(i, j)).fold(0.0, f64::max));
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        FiniteMetricSpace { scale: self.scale * factor, ..self.clone() }
    }

    /// Rescale so that the diameter equals `target` (½ for fillings).
    pub fn normalized_diameter(&self, target: f64) -> Result<Self> {
        let d = self.diameter();
        if d <= 0.0 {
            return Err(Error::Degenerate("diameter is zero".into()));
        }
        Ok(self.scaled(target / d))
    }

    /// First triple (x, y, z) with d(x,y) > d(x,z) + d(z,y), exhaustive for small spaces, sampled otherwise.
    pub fn triangle_violation(&self, seed: u64) -> Option<(usize, usize, usize)> {
        let n = self.len();
        let tol = 1e-12;
        let bad = |x: usize, y: usize, z: usize| {
            let dxy = self.dist(x, y);
            dxy > (self.dist(x, z) + self.dist(z, y)) * (1.0 + tol) + tol * dxy
        };
        if n <= TRIANGLE_EXHAUSTIVE_MAX {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if bad(x, y, z) {
                            return Some((x, y, z));
                        }
                    }
                }
            }
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..TRIANGLE_SAMPLES {
            let t = sample(&mut rng, n, 3);
            let (x, y, z) = (t.index(0), t.index(1), t.index(2));
            if bad(x, y, z) {
                return Some((x, y, z));
            }
        }
        None
    }

    /// Same point set under another distance matrix.
    pub fn with_matrix(&self, matrix: Vec<f64>) -> Result<Self> {
        Self::from_matrix(self.ids.clone(), matrix)
    }

    /// Dense distance matrix (row-major).
    pub fn to_matrix(&self) -> Vec<f64> {
        let n = self.len();
        crate::par::map_range(n, |i| self.row(i)).concat()
    }
}
