use cwdlab::diag::*;
use cwdlab::metric::FiniteMetricSpace;
use cwdlab::pcf::{hausdorff_weight_dimension, resistance_metric, Pcf};
use nalgebra::{DMatrix, SymmetricEigen};

fn path_space(n: usize) -> (GraphForm, FiniteMetricSpace) {
    (GraphForm::path(n, 1.0).unwrap(), FiniteMetricSpace::grid_1d(n + 1, 0.0, 1.0).unwrap())
}

#[test]
fn series_path_capacity_is_one() {
    let n = 50;
    let edges = (0..n).map(|i| (i, i + 1, n as f64)).collect();
    let form = GraphForm::from_parts(n + 1, edges, vec![1.0; n + 1]).unwrap();
    let c = capacity(&form, &[0], &[n]).unwrap();
    assert!((c.cap - 1.0).abs() < 1e-10);
    assert!(c.potential.iter().all(|&u| (-1e-12..=1.0 + 1e-12).contains(&u)));
}

#[test]
fn single_edge_limit() {
    let c = 3.0;
    for eps in [1e-1, 1e-3, 1e-6] {
        // direct edge plus a two-edge detour of conductance eps
        let form = GraphForm::from_parts(3, vec![(0, 1, c), (0, 2, eps), (2, 1, eps)], vec![1.0; 3]).unwrap();
        let cap = capacity(&form, &[0], &[1]).unwrap().cap;
        assert!(cap >= c && cap <= c + eps);
    }
}

#[test]
fn disconnected_capacity_is_zero() {
    let form = GraphForm::from_parts(4, vec![(0, 1, 1.0), (2, 3, 1.0)], vec![1.0; 4]).unwrap();
    let c = capacity(&form, &[0], &[3]).unwrap();
    assert!(c.disconnected);
    assert_eq!(c.cap, 0.0);
    assert!(capacity(&form, &[0], &[0]).is_err());
}

#[test]
fn sg_capacity_matches_resistance() {
    let pcf = Pcf::sg(2).unwrap();
    let net = pcf_resistance_network(&pcf, 3).unwrap();
    let cap = capacity(&net.form, &[0], &[1]).unwrap().cap;
    let r = resistance_metric(&pcf, 3, 0, 1).unwrap();
    assert!((cap * r - 1.0).abs() < 1e-10);
}

#[test]
fn path_ehi_bound() {
    let (form, space) = path_space(400);
    let delta = 0.5;
    let balls: Vec<BallSpec> = [100, 200, 300].iter().map(|&c| BallSpec::new(&space, c, 0.1)).collect();
    let rep = ehi_constant_probe(&form, &space, &balls, delta, 1).unwrap();
    // affine harmonic functions: sup/inf on the δ-ball ≤ (1+δ)/(1−δ)
    assert!(rep.worst <= (1.0 + delta) / (1.0 - delta) + 1e-9, "{}", rep.worst);
    assert!(rep.worst >= 1.0);
}

#[test]
fn sg_ehi_is_finite_across_scales() {
    let pcf = Pcf::sg(2).unwrap();
    let net = pcf_resistance_network(&pcf, 5).unwrap();
    let mut worst = Vec::new();
    for r in [0.3, 0.15, 0.075] {
        let balls: Vec<BallSpec> = [10, 50, 100].iter().map(|&c| BallSpec::new(&net.space, c, r)).collect();
        let rep = ehi_constant_probe(&net.form, &net.space, &balls, 0.5, 3).unwrap();
        assert!(rep.worst.is_finite());
        worst.push(rep.worst);
    }
    let (lo, hi) = worst.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &w| (l.min(w), h.max(w)));
    assert!(hi / lo < 10.0, "{worst:?}");
}

#[test]
fn ehi_rejects_bad_delta() {
    let (form, space) = path_space(10);
    assert!(ehi_constant_probe(&form, &space, &[BallSpec::new(&space, 5, 0.3)], 1.0, 0).is_err());
}

#[test]
fn interval_doubling() {
    let n = 2001;
    let space = FiniteMetricSpace::grid_1d(n, 0.0, 1.0).unwrap();
    let m = vec![1.0 / n as f64; n];
    let radii: Vec<f64> = (2..9).map(|j| 0.5f64.powi(j)).collect();
    let rep = vd_rvd_check(&space, &m, &[1000, 700, 1300], &radii, 2.0).unwrap();
    // lattice rounding: ⌊2r/h⌋ points, so ratios drift slightly above 2
    assert!((rep.c_d - 2.0).abs() < 0.1, "{}", rep.c_d);
    assert!((rep.alpha - 1.0).abs() < 0.05, "{}", rep.alpha);
    assert!(rep.c_d.is_finite() && rep.c_rvd > 0.0);
}

#[test]
fn sg_volume_exponent() {
    let pcf = Pcf::sg(2).unwrap();
    let d_h = hausdorff_weight_dimension(&pcf.hs).unwrap();
    let net = pcf_resistance_network(&pcf, 6).unwrap();
    let radii = [0.4, 0.2, 0.1];
    let centers: Vec<usize> = (0..net.form.len()).step_by(37).collect();
    let rep = vd_rvd_check(&net.space, net.form.measure(), &centers, &radii, 2.0).unwrap();
    // finite level: balls near cell scale or the boundary pull the slope down
    assert!(rep.c_d.is_finite() && rep.c_rvd > 0.0);
    assert!((rep.alpha / d_h - 1.0).abs() < 0.1, "alpha {} vs {d_h}", rep.alpha);
}

#[test]
fn point_mass_fails_rvd() {
    let n = 513;
    let space = FiniteMetricSpace::grid_1d(n, 0.0, 1.0).unwrap();
    let mut m = vec![0.0; n];
    m[256] = 1.0;
    let radii: Vec<f64> = (2..9).map(|j| 0.5f64.powi(j)).collect();
    let rep = vd_rvd_check(&space, &m, &[256], &radii, 2.0).unwrap();
    assert!(!rep.rvd_ok);
    assert!(rep.alpha.abs() < 1e-9);
}

#[test]
fn path_cap_beta_is_exact() {
    let (form, space) = path_space(512);
    let samples: Vec<(usize, f64)> = (3..7).map(|j| (256, 0.5f64.powi(j))).collect();
    let rep = cap_beta_check(&form, &space, 2.0, 2.0, &samples).unwrap();
    let h = 1.0 / 512.0;
    for r in &rep.rows {
        // two series chains of (first outer − last inner) edges, conductance 1/h each
        let last_in = ((r.r / h) - 1e-9).floor();
        let first_out = (2.0 * r.r / h - 1e-9).ceil();
        let want = 2.0 / ((first_out - last_in) * h);
        assert!((r.cap / want - 1.0).abs() < 1e-9, "{} {} {want}", r.r, r.cap);
        assert!((r.q - 1.0).abs() < 0.1, "{}", r.q);
    }
    assert!(!rep.trend.flagged);
}

#[test]
fn wrong_beta_trend_is_flagged() {
    let (form, space) = path_space(1024);
    let samples: Vec<(usize, f64)> = (3..8).map(|j| (512, 0.5f64.powi(j))).collect();
    assert!(cap_beta_check(&form, &space, 2.5, 2.0, &samples).unwrap().trend.flagged);
    assert!(cap_beta_check(&form, &space, 1.5, 2.0, &samples).unwrap().trend.flagged);
}

#[test]
fn poincare_examples() {
    let (form, space) = path_space(100);
    let single = BallSpec { center: 3, radius: 1e-9, vertices: vec![3] };
    assert_eq!(poincare_constant_estimate(&form, &space, &[single], 1.0, 2.0).unwrap().c_p, 0.0);

    let split = GraphForm::from_parts(4, vec![(0, 1, 1.0), (2, 3, 1.0)], vec![1.0; 4]).unwrap();
    let s4 = FiniteMetricSpace::grid_1d(4, 0.0, 1.0).unwrap();
    let ball = BallSpec::new(&s4, 1, 0.5);
    assert!(poincare_constant_estimate(&split, &s4, &[ball], 1.0, 2.0).unwrap().infinite);
}

#[test]
fn poincare_matches_dense_neumann_eigenvalue() {
    let (form, _) = path_space(300);
    let ball: Vec<usize> = (100..160).collect();
    let k = ball.len();
    let got = ball_rayleigh(&form, &ball, &ball).unwrap();
    // max Var_m/E = 1/λ₂ of M^{-1/2} L M^{-1/2} for the induced path
    let m: Vec<f64> = ball.iter().map(|&v| form.measure()[v]).collect();
    let mut l = DMatrix::<f64>::zeros(k, k);
    for i in 0..k - 1 {
        let c = 300.0;
        l[(i, i)] += c;
        l[(i + 1, i + 1)] += c;
        l[(i, i + 1)] -= c;
        l[(i + 1, i)] -= c;
    }
    let a = DMatrix::from_fn(k, k, |i, j| l[(i, j)] / (m[i] * m[j]).sqrt());
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    let want = 1.0 / ev[1];
    assert!((got / want - 1.0).abs() < 1e-6, "{got} {want}");
}

#[test]
fn reverse_holder_examples() {
    let n = 4096;
    let x: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / n as f64).collect();
    let m = vec![2.0 / n as f64; n];
    for p in [1.5, 2.0, 4.0] {
        let r = dyadic_reverse_holder(&x, &m, &vec![3.0; n], p, -1.0, 1.0, 6).unwrap();
        assert!((r.c_p - 1.0).abs() < 1e-12 && (r.c_sqrt - 1.0).abs() < 1e-12);
    }
    let w: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let r = dyadic_reverse_holder(&x, &m, &w, 2.0, -1.0, 1.0, 6).unwrap();
    // worst intervals touch 0, where |x| on [0,b] gives 2/√3
    assert!((r.c_p - 2.0 / 3f64.sqrt()).abs() < 1e-3, "{}", r.c_p);
    assert!(r.a_infinity);
    assert!(reverse_holder_check(&m, &w, 1.0, &[vec![0, 1]]).is_err());
}

#[test]
fn metric_h_is_its_own_semimetric() {
    let pts: Vec<f64> = vec![0.0, 0.1, 0.35, 0.4, 0.9];
    let n = pts.len();
    let d = max_semimetric(n, |i, j| (pts[i] - pts[j]).abs());
    for i in 0..n {
        for j in 0..n {
            assert!((d[i * n + j] - (pts[i] - pts[j]).abs()).abs() < 1e-15);
        }
    }
}

#[test]
fn squared_distance_collapses() {
    for k in 3..8u32 {
        let n = (1usize << k) + 1;
        let h = 1.0 / (n - 1) as f64;
        let d = max_semimetric_from(n, |i, j| (h * (i as f64 - j as f64)).powi(2), 0);
        // n − 1 steps of length h² each
        assert!((d[n - 1] - h).abs() < 1e-12);
    }
}

#[test]
fn power_weight_axis_distance_decreases() {
    let plane = PowerWeightPlane { t: 1.0, gamma: 2.0 };
    let d: Vec<f64> = (2..6).map(|k| plane.axis_distance(k, 2)).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn gaussian_examples() {
    let one = gaussian_1d_check(&WeightedMeasure1D::sample(0.0, 1.0, 1025, |_| 1.0).unwrap(), 8).unwrap();
    assert!((one.c - 1.0).abs() < 1e-12);
    let abs = gaussian_1d_check(&WeightedMeasure1D::sample(-1.0, 1.0, 1 << 14, f64::abs).unwrap(), 6).unwrap();
    // on [0,b]: √(b·b²/2)/((2/3)b^{3/2}) = 3/(2√2)
    assert!((abs.c - 3.0 / (2.0 * 2f64.sqrt())).abs() < 1e-3, "{}", abs.c);
    let half = gaussian_1d_check(&WeightedMeasure1D::sample(0.0, 1.0, 1025, |x| if x <= 0.5 { 1.0 } else { 0.0 }).unwrap(), 8)
        .unwrap();
    assert!(!half.admissible);
    assert!(half.infinite_intervals > 0);
}

#[test]
fn gaussian_is_scale_invariant() {
    let g = |x: f64| 1.0 + x * x;
    let a = gaussian_1d_check(&WeightedMeasure1D::sample(0.0, 2.0, 2049, g).unwrap(), 8).unwrap();
    let b = gaussian_1d_check(&WeightedMeasure1D::sample(0.0, 2.0, 2049, |x| 7.5 * g(x)).unwrap(), 8).unwrap();
    assert!((a.c - b.c).abs() < 1e-12);
}

#[test]
fn negative_density_is_rejected() {
    assert!(WeightedMeasure1D::new(vec![0.0, 1.0, 2.0], vec![1.0, -1.0, 1.0]).is_err());
}

#[test]
fn mismatched_space_is_rejected() {
    let (form, _) = path_space(10);
    let other = FiniteMetricSpace::grid_1d(5, 0.0, 1.0).unwrap();
    let ball = BallSpec::new(&other, 2, 0.3);
    assert!(matches!(
        ehi_constant_probe(&form, &other, &[ball], 0.5, 0),
        Err(cwdlab::Error::Dimension(_))
    ));
    assert!(cap_beta_check(&form, &other, 2.0, 2.0, &[(2, 0.1)]).is_err());
}

#[test]
fn resistance_space_of_a_path() {
    let (form, _) = path_space(8);
    let s = resistance_space(&form).unwrap();
    assert!((s.dist(0, 8) - 1.0).abs() < 1e-12);
    assert!((s.dist(2, 5) - 3.0 / 8.0).abs() < 1e-12);
}
