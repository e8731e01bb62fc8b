use super::{BallSpec, GraphForm};
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::collections::VecDeque;

pub const POWER_MAX_ITER: usize = 2000;
pub const POWER_RTOL: f64 = 1e-13;

#[derive(Clone, Debug, Serialize)]
pub struct PoincareBall {
    pub center: usize,
    pub radius: f64,
    pub n_ball: usize,
    pub n_inflated: usize,
    /// max Var(f)/energy on the inflated ball.
    pub rayleigh: f64,
    pub c_p: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareReport {
    pub c_p: f64,
    /// Some ball is disconnected inside its inflation (zero energy, positive variance).
    pub infinite: bool,
    pub balls: Vec<PoincareBall>,
}

/// Vertices of `set` reachable from `start` through edges inside `set`.
fn reachable(form: &GraphForm, set: &[bool], start: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; set.len()];
    let mut q: VecDeque<usize> = VecDeque::new();
    for &s in start {
        if !seen[s] {
            seen[s] = true;
            q.push_back(s);
        }
    }
    while let Some(v) = q.pop_front() {
        for (w, _) in form.laplacian().neighbors(v) {
            if set[w] && !seen[w] {
                seen[w] = true;
                q.push_back(w);
            }
        }
    }
    seen
}

/// Largest Var_m(f)/f^T S f over f on `ball`, where S is the Schur complement onto
/// `ball` of the Laplacian of the subgraph induced by `inflated`.
pub fn ball_rayleigh(form: &GraphForm, ball: &[usize], inflated: &[usize]) -> Result<f64> {
    let n = form.len();
    let k = ball.len();
    if k <= 1 {
        return Ok(0.0);
    }
    let mut in_inf = vec![false; n];
    for &v in inflated.iter().chain(ball) {
        in_inf[v] = true;
    }
    let reach = reachable(form, &in_inf, &ball[..1]);
    if ball.iter().any(|&v| !reach[v]) {
        return Ok(f64::INFINITY);
    }
    let mut in_ball = vec![false; n];
    for &v in ball {
        in_ball[v] = true;
    }
    let reach_all = reachable(form, &in_inf, ball);
    let outer: Vec<usize> = inflated.iter().copied().filter(|&v| !in_ball[v] && reach_all[v]).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in ball.iter().chain(&outer).enumerate() {
        pos[v] = i;
    }
    let t = k + outer.len();
    let mut l = DMatrix::<f64>::zeros(t, t);
    for (i, &v) in ball.iter().chain(&outer).enumerate() {
        for (w, c) in form.laplacian().neighbors(v) {
            if pos[w] != usize::MAX {
                l[(i, pos[w])] -= c;
                l[(i, i)] += c;
            }
        }
    }
    let mut s = l.view((0, 0), (k, k)).into_owned();
    if !outer.is_empty() {
        let loo = l.view((k, k), (t - k, t - k)).into_owned();
        let lob = l.view((k, 0), (t - k, k)).into_owned();
        let chol = loo.cholesky().ok_or_else(|| Error::SingularInterior("inflated block is singular".into()))?;
        let x = chol.solve(&lob);
        s -= l.view((0, k), (k, t - k)) * x;
    }
    let m: Vec<f64> = ball.iter().map(|&v| form.measure()[v]).collect();
    let mt: f64 = m.iter().sum();
    let center = |x: &DVector<f64>| -> DVector<f64> {
        let mean = x.iter().zip(&m).map(|(a, b)| a * b).sum::<f64>() / mt;
        DVector::from_iterator(k, x.iter().zip(&m).map(|(a, b)| b * (a - mean)))
    };
    let var = |x: &DVector<f64>| -> f64 {
        let mean = x.iter().zip(&m).map(|(a, b)| a * b).sum::<f64>() / mt;
        x.iter().zip(&m).map(|(a, b)| b * (a - mean).powi(2)).sum()
    };
    let grounded = s.view((1, 1), (k - 1, k - 1)).into_owned();
    let chol = grounded.cholesky().ok_or_else(|| Error::SingularInterior("ball form is singular".into()))?;
    let mut x = DVector::from_iterator(k, (0..k).map(|i| i as f64 - (k as f64 - 1.0) / 2.0));
    let mut prev = 0.0;
    let mut rq = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let b = center(&x);
        let y1 = chol.solve(&b.rows(1, k - 1).into_owned());
        let mut y = DVector::zeros(k);
        y.rows_mut(1, k - 1).copy_from(&y1);
        let e = (y.transpose() * &s * &y)[(0, 0)];
        rq = var(&y) / e;
        let nrm = y.norm();
        x = y / nrm;
        if (rq - prev).abs() <= POWER_RTOL * rq {
            break;
        }
        prev = rq;
    }
    Ok(rq)
}

/// max over balls of Var(f)·s^{−γ}/E_{AB}(f) for the ball radius s and inflation A.
pub fn poincare_constant_estimate(
    form: &GraphForm,
    space: &FiniteMetricSpace,
    balls: &[BallSpec],
    inflation: f64,
    gamma: f64,
) -> Result<PoincareReport> {
    if !(inflation >= 1.0) {
        return Err(Error::Param(format!("inflation must be at least 1, got {inflation}")));
    }
    form.check_space(space)?;
    let out = crate::par::map(balls, |b| -> Result<PoincareBall> {
        let inflated = b.scaled(space, inflation);
        let rayleigh = ball_rayleigh(form, &b.vertices, &inflated.vertices)?;
        Ok(PoincareBall {
            center: b.center,
            radius: b.radius,
            n_ball: b.vertices.len(),
            n_inflated: inflated.vertices.len(),
            rayleigh,
            c_p: rayleigh * b.radius.powf(-gamma),
        })
    });
    let balls: Vec<PoincareBall> = out.into_iter().collect::<Result<_>>()?;
    let c_p = balls.iter().map(|b| b.c_p).fold(0.0, f64::max);
    Ok(PoincareReport { c_p, infinite: c_p.is_infinite(), balls })
}
