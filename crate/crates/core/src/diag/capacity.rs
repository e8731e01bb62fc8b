use super::{BallSpec, GraphForm};
use crate::linalg::{self, Solver};
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Nonnegative random combinations tried per ball on top of the basis.
pub const EHI_COMBINATIONS: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct CapacityResult {
    pub cap: f64,
    /// Equilibrium potential: 1 on A, 0 on B, harmonic elsewhere.
    pub potential: Vec<f64>,
    /// No path joins A and B; `cap` is 0.
    pub disconnected: bool,
    pub iterations: usize,
    pub residual: f64,
}

pub fn capacity(form: &GraphForm, a: &[usize], b: &[usize]) -> Result<CapacityResult> {
    capacity_with(form, a, b, Solver::Auto)
}

/// Cap(A,B) as the energy of the equilibrium potential.
pub fn capacity_with(form: &GraphForm, a: &[usize], b: &[usize], solver: Solver) -> Result<CapacityResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Param("capacity sets must be nonempty".into()));
    }
    let n = form.len();
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for &i in a {
        fixed[i] = Some(1.0);
    }
    for &i in b {
        if fixed[i].is_some() {
            return Err(Error::Overlap(format!("vertex {} lies in both sets", form.ids()[i])));
        }
        fixed[i] = Some(0.0);
    }
    let lap = form.laplacian();
    let comp = lap.components();
    let mut in_a = vec![false; n];
    for &i in a {
        in_a[comp[i]] = true;
    }
    let disconnected = !b.iter().any(|&i| in_a[comp[i]]);
    let sol = linalg::solve_dirichlet(lap, &fixed, None, solver)?;
    let cap = if disconnected { 0.0 } else { lap.energy(&sol.u) };
    Ok(CapacityResult { cap, potential: sol.u, disconnected, iterations: sol.iterations, residual: sol.residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct EhiBall {
    pub center: usize,
    pub radius: f64,
    pub n_ball: usize,
    pub n_boundary: usize,
    pub n_inner: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EhiReport {
    /// Largest sup/inf ratio seen: a lower bound for the EHI constant.
    pub worst: f64,
    pub balls: Vec<EhiBall>,
}

/// Harmonic measures of a ball: column j is the harmonic function in the ball with boundary data 1 at boundary vertex j.
fn harmonic_basis(form: &GraphForm, ball: &[usize]) -> Result<(Vec<usize>, DMatrix<f64>)> {
    let n = form.len();
    let lap = form.laplacian();
    let mut local = vec![usize::MAX; n];
    for (k, &i) in ball.iter().enumerate() {
        local[i] = k;
    }
    let mut bnd_local = vec![usize::MAX; n];
    let mut boundary = Vec::new();
    for &i in ball {
        for (j, _) in lap.neighbors(i) {
            if local[j] == usize::MAX && bnd_local[j] == usize::MAX {
                bnd_local[j] = boundary.len();
                boundary.push(j);
            }
        }
    }
    if boundary.is_empty() {
        return Err(Error::Param("ball has no graph boundary".into()));
    }
    let m = ball.len();
    let mut rhs = DMatrix::zeros(m, boundary.len());
    for (k, &i) in ball.iter().enumerate() {
        for (j, c) in lap.neighbors(i) {
            if bnd_local[j] != usize::MAX {
                rhs[(k, bnd_local[j])] += c;
            }
        }
    }
    let sub = lap.submatrix(ball, &local);
    let x = if m <= 4 * linalg::DENSE_AUTO_MAX {
        let chol = sub
            .to_dense()
            .cholesky()
            .ok_or_else(|| Error::SingularInterior("ball block is singular".into()))?;
        chol.solve(&rhs)
    } else {
        let cols: Vec<usize> = (0..boundary.len()).collect();
        let solved = crate::par::map(&cols, |&j| {
            let b: Vec<f64> = rhs.column(j).iter().copied().collect();
            linalg::cg(&sub, &b, linalg::CG_TOL, 20 * m + 200).map(|r| r.0)
        });
        let mut x = DMatrix::zeros(m, boundary.len());
        for (j, col) in solved.into_iter().enumerate() {
            x.set_column(j, &DVector::from_vec(col?));
        }
        x
    };
    Ok((boundary, x))
}

fn sup_inf(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > 0.0) {
        return None;
    }
    Some(if lo > 0.0 { hi / lo } else { f64::INFINITY })
}

/// Worst sup/inf ratio on δ-balls over harmonic measures and random nonnegative combinations.
pub fn ehi_constant_probe(
    form: &GraphForm,
    space: &FiniteMetricSpace,
    balls: &[BallSpec],
    delta: f64,
    seed: u64,
) -> Result<EhiReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Param(format!("delta must lie in (0,1), got {delta}")));
    }
    form.check_space(space)?;
    let idx: Vec<usize> = (0..balls.len()).collect();
    let rows = crate::par::map(&idx, |&bi| -> Result<EhiBall> {
        let ball = &balls[bi];
        let pos: Vec<usize> = ball
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, &v)| space.dist(ball.center, v) < delta * ball.radius)
            .map(|(k, _)| k)
            .collect();
        if pos.is_empty() {
            return Err(Error::EmptyInterior(format!("δ-ball at {} has no vertices", ball.center)));
        }
        let (boundary, x) = harmonic_basis(form, &ball.vertices)?;
        let mut worst: f64 = 1.0;
        for j in 0..boundary.len() {
            if let Some(r) = sup_inf(pos.iter().map(|&k| x[(k, j)])) {
                worst = worst.max(r);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (bi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for _ in 0..EHI_COMBINATIONS {
            let c: Vec<f64> = (0..boundary.len()).map(|_| rng.random::<f64>()).collect();
            let vals = pos.iter().map(|&k| (0..boundary.len()).map(|j| c[j] * x[(k, j)]).sum::<f64>());
            if let Some(r) = sup_inf(vals) {
                worst = worst.max(r);
            }
        }
        Ok(EhiBall {
            center: ball.center,
            radius: ball.radius,
            n_ball: ball.vertices.len(),
            n_boundary: boundary.len(),
            n_inner: pos.len(),
            ratio: worst,
        })
    });
    let balls: Vec<EhiBall> = rows.into_iter().collect::<Result<_>>()?;
    let worst = balls.iter().map(|b| b.ratio).fold(1.0, f64::max);
    Ok(EhiReport { worst, balls })
}
