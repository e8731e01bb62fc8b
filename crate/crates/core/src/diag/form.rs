use crate::linalg::Laplacian;
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};
use serde::Serialize;

/// Weighted graph carrying the quadratic form E(u,u) = Σ c_e (u_x − u_y)².
#[derive(Clone, Debug)]
pub struct GraphForm {
    ids: Vec<String>,
    edges: Vec<(usize, usize, f64)>,
    measure: Vec<f64>,
    lap: Laplacian,
}

impl GraphForm {
    pub fn new(ids: Vec<String>, edges: Vec<(usize, usize, f64)>, measure: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if measure.len() != n {
            return Err(Error::Param(format!("{} measure weights for {n} vertices", measure.len())));
        }
        if let Some(i) = measure.iter().position(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::Invariant { row: i + 1, col: 2, msg: format!("vertex measure {} must be positive", measure[i]) });
        }
        for (k, &(i, j, c)) in edges.iter().enumerate() {
            if i >= n || j >= n {
                return Err(Error::Invariant { row: k + 1, col: 1, msg: format!("edge ({i},{j}) names an unknown vertex") });
            }
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::Invariant { row: k + 1, col: 3, msg: format!("conductance {c} must be nonnegative") });
            }
        }
        let lap = Laplacian::from_edges(n, &edges);
        Ok(GraphForm { ids, edges, measure, lap })
    }

    /// Unlabelled form with ids 0..n.
    pub fn from_parts(n: usize, edges: Vec<(usize, usize, f64)>, measure: Vec<f64>) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges, measure)
    }

    /// Path on `n + 1` equispaced vertices of [0, len]: conductance 1/h, measure h.
    pub fn path(n: usize, len: f64) -> Result<Self> {
        let h = len / n as f64;
        let edges = (0..n).map(|i| (i, i + 1, 1.0 / h)).collect();
        Self::from_parts(n + 1, edges, vec![h; n + 1])
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

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.lap
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        self.lap.energy(u)
    }

    pub fn mass(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.measure[i]).sum()
    }

    /// Errors unless `space` has one point per vertex.
    pub fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        if space.len() != self.len() {
            return Err(Error::Dimension(format!("{} points for a graph on {} vertices", space.len(), self.len())));
        }
        Ok(())
    }
}

/// Open ball with its realized vertex set.
#[derive(Clone, Debug, Serialize)]
pub struct BallSpec {
    pub center: usize,
    pub radius: f64,
    pub vertices: Vec<usize>,
}

impl BallSpec {
    pub fn new(space: &FiniteMetricSpace, center: usize, radius: f64) -> Self {
        let vertices = (0..space.len()).filter(|&v| space.dist(center, v) < radius).collect();
        BallSpec { center, radius, vertices }
    }

    /// Concentric ball with radius scaled by `f`.
    pub fn scaled(&self, space: &FiniteMetricSpace, f: f64) -> Self {
        Self::new(space, self.center, self.radius * f)
    }
}

/// Density on a 1-D grid with trapezoid cumulative integrals of g and √g.
#[derive(Clone, Debug, Serialize)]
pub struct WeightedMeasure1D {
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    cum_g: Vec<f64>,
    cum_sqrt: Vec<f64>,
}

impl WeightedMeasure1D {
    pub fn new(x: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if x.len() != g.len() || x.len() < 2 {
            return Err(Error::Param("need at least two matching (x, g) samples".into()));
        }
        for i in 0..x.len() {
            if !g[i].is_finite() || g[i] < 0.0 {
                return Err(Error::Invariant { row: i + 1, col: 2, msg: format!("density {} must be a nonnegative real", g[i]) });
            }
            if i > 0 && !(x[i] > x[i - 1]) {
                return Err(Error::Invariant { row: i + 1, col: 1, msg: "grid must be strictly increasing".into() });
            }
        }
        let cum = |f: &dyn Fn(f64) -> f64| {
            let mut c = vec![0.0; x.len()];
            for i in 1..x.len() {
                c[i] = c[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f(g[i]) + f(g[i - 1]));
            }
            c
        };
        let cum_g = cum(&|v| v);
        let cum_sqrt = cum(&f64::sqrt);
        Ok(WeightedMeasure1D { x, g, cum_g, cum_sqrt })
    }

    /// Samples `g` at `n + 1` equispaced nodes of [lo, hi].
    pub fn sample(lo: f64, hi: f64, n: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        let x: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let gv = x.iter().map(|&t| g(t)).collect();
        Self::new(x, gv)
    }

    pub fn lo(&self) -> f64 {
        self.x[0]
    }

    pub fn hi(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn cumulative(&self, cum: &[f64], f: impl Fn(f64) -> f64, t: f64) -> f64 {
        let t = t.clamp(self.lo(), self.hi());
        let k = self.x.partition_point(|&v| v <= t).saturating_sub(1).min(self.x.len() - 2);
        let (x0, x1) = (self.x[k], self.x[k + 1]);
        let (f0, f1) = (f(self.g[k]), f(self.g[k + 1]));
        let ft = f0 + (f1 - f0) * (t - x0) / (x1 - x0);
        cum[k] + 0.5 * (t - x0) * (f0 + ft)
    }

    /// ∫_a^b g.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.cumulative(&self.cum_g, |v| v, b) - self.cumulative(&self.cum_g, |v| v, a)
    }

    /// ∫_a^b √g, the intrinsic distance d_int(a, b).
    pub fn sqrt_integral(&self, a: f64, b: f64) -> f64 {
        self.cumulative(&self.cum_sqrt, f64::sqrt, b) - self.cumulative(&self.cum_sqrt, f64::sqrt, a)
    }

    pub fn d_int(&self, a: f64, b: f64) -> f64 {
        self.sqrt_integral(a.min(b), a.max(b))
    }
}
