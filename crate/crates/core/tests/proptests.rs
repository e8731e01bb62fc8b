use cwdlab::diag::*;
use cwdlab::filling::*;
use cwdlab::metric::*;
use cwdlab::pcf::*;
use cwdlab::report::{Cell, ColumnKind, Report, RunConfig, Table};
use proptest::prelude::*;

fn points(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 2), 3..max).prop_filter("distinct", |p| {
        p.iter().enumerate().all(|(i, a)| p[..i].iter().all(|b| (a[0] - b[0]).abs() + (a[1] - b[1]).abs() > 1e-6))
    })
}

fn space(p: &[Vec<f64>]) -> FiniteMetricSpace {
    FiniteMetricSpace::from_coords(p.to_vec()).unwrap().normalized_diameter(0.5).unwrap()
}

/// Path 0..n plus extra chords, so always connected.
fn graph() -> impl Strategy<Value = GraphForm> {
    (4usize..20).prop_flat_map(|n| {
        let path = prop::collection::vec(0.1..10.0f64, n - 1);
        let chords = prop::collection::vec((0..n, 0..n, 0.1..10.0f64), 0..n);
        (Just(n), path, chords)
    })
    .prop_map(|(n, path, chords)| {
        let mut edges: Vec<(usize, usize, f64)> = path.into_iter().enumerate().map(|(i, c)| (i, i + 1, c)).collect();
        edges.extend(chords.into_iter().filter(|(i, j, _)| i != j));
        GraphForm::from_parts(n, edges, vec![1.0; n]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nets_satisfy_invariants(p in points(40), a in 3.0..12.0f64, shift in 0usize..40) {
        let s = space(&p);
        let nets = build_net_hierarchy(&s, a, 4).unwrap();
        prop_assert_eq!(nets.levels[0].len(), 1);
        prop_assert_eq!(check_net_invariants(&s, &nets), None);
        // a relabelled copy is still a valid hierarchy
        let mut q = p.clone();
        q.rotate_left(shift % p.len());
        let s2 = space(&q);
        prop_assert_eq!(check_net_invariants(&s2, &build_net_hierarchy(&s2, a, 4).unwrap()), None);
    }

    #[test]
    fn filling_structure(p in points(30), a in 4.0..10.0f64) {
        let s = space(&p);
        let nets = build_net_hierarchy(&s, a, 3).unwrap();
        let g = build_filling(&s, &nets, 3.0, None, false).unwrap();
        for v in 0..g.len() {
            for &u in &g.horizontal[v] {
                prop_assert!(g.horizontal[u].contains(&v));
                prop_assert_eq!(g.level(u), g.level(v));
            }
            if let Some(q) = g.parent[v] {
                prop_assert_eq!(g.level(q) + 1, g.level(v));
                prop_assert!(g.children[q].contains(&v));
            }
            prop_assert!(g.horizontal[v].len() < g.d_h);
        }
    }

    #[test]
    fn pi_is_multiplicative(p in points(30), seed in any::<u64>()) {
        let s = space(&p);
        let g = build_filling(&s, &build_net_hierarchy(&s, 6.0, 3).unwrap(), 3.0, None, false).unwrap();
        let rho: Vec<f64> = (0..g.len()).map(|i| 0.05 + 0.4 * (((seed >> (i % 60)) & 7) as f64) / 7.0).collect();
        let w = WeightFunction::new(&g, rho.clone()).unwrap();
        for v in 0..g.len() {
            let prod: f64 = g.genealogy(v).iter().map(|&u| rho[u]).product();
            prop_assert!((w.pi(v) / prod - 1.0).abs() < 1e-12);
            if let Some(q) = g.parent[v] {
                prop_assert!((w.pi(v) / (w.pi(q) * rho[v]) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn drho_is_a_metric(p in points(20), c in 0.05..0.45f64, i in 0usize..1000, j in 0usize..1000, k in 0usize..1000) {
        let s = space(&p);
        let g = build_filling(&s, &build_net_hierarchy(&s, 6.0, 2).unwrap(), 3.0, None, false).unwrap();
        let w = WeightFunction::constant(&g, c).unwrap();
        let (i, j, k) = (i % g.len(), j % g.len(), k % g.len());
        let d = |x, y| filling_metric_drho(&g, &w, x, y).unwrap();
        prop_assert_eq!(d(i, i), 0.0);
        prop_assert!((d(i, j) - d(j, i)).abs() <= 1e-12 * d(i, j).max(1e-300));
        prop_assert!(d(i, k) <= d(i, j) + d(j, k) + 1e-12);
    }

    #[test]
    fn identity_distortion_is_the_diagonal(p in points(25), c in 0.1..10.0f64) {
        let s = space(&p);
        let prof = quasisymmetry_distortion_estimate(&s, &s.scaled(c), 0).unwrap();
        for w in prof.samples.windows(2) {
            prop_assert!(w[0].0 < w[1].0 && w[0].1 <= w[1].1);
        }
        for &(t, e) in &prof.samples {
            prop_assert!((e - t).abs() <= 1e-9 * t.max(1.0));
        }
    }

    #[test]
    fn capacity_maximum_principle_and_monotonicity(g in graph(), extra in 0.1..5.0f64) {
        let n = g.len();
        let c = capacity(&g, &[0], &[n - 1]).unwrap();
        prop_assert!(c.cap > 0.0);
        prop_assert!(c.potential.iter().all(|&u| (-1e-9..=1.0 + 1e-9).contains(&u)));
        let bigger = capacity(&g, &[0, 1], &[n - 1]).unwrap().cap;
        prop_assert!(bigger >= c.cap * (1.0 - 1e-9));
        let mut edges = g.edges().to_vec();
        edges.push((1, n - 2, extra));
        let g2 = GraphForm::from_parts(n, edges, g.measure().to_vec()).unwrap();
        prop_assert!(capacity(&g2, &[0], &[n - 1]).unwrap().cap >= c.cap * (1.0 - 1e-9));
    }

    #[test]
    fn constant_weight_is_reverse_holder_one(
        m in prop::collection::vec(0.01..5.0f64, 8..40),
        w0 in 0.1..100.0f64,
        p in 1.1..6.0f64,
    ) {
        let n = m.len();
        let sets: Vec<Vec<usize>> = (1..n).step_by(3).map(|k| (0..k).collect()).chain([(n / 2..n).collect()]).collect();
        let r = reverse_holder_check(&m, &vec![w0; n], p, &sets).unwrap();
        prop_assert!((r.c_p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_constant_is_scale_invariant(k in prop::collection::vec(0.1..4.0f64, 4), c in 0.01..100.0f64) {
        let g = |x: f64| k[0] + k[1] * x + k[2] * (3.0 * x).sin().abs() + k[3] * x * x;
        let a = gaussian_1d_check(&WeightedMeasure1D::sample(0.0, 1.0, 257, g).unwrap(), 6).unwrap();
        let b = gaussian_1d_check(&WeightedMeasure1D::sample(0.0, 1.0, 257, |x| c * g(x)).unwrap(), 6).unwrap();
        prop_assert!((a.c / b.c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn max_semimetric_is_dominated_and_triangular(h in prop::collection::vec(0.01..3.0f64, 64)) {
        let n = 8;
        let d = max_semimetric(n, |i, j| h[i * n + j]);
        for i in 0..n {
            prop_assert_eq!(d[i * n + i], 0.0);
            for j in 0..n {
                prop_assert_eq!(d[i * n + j], d[j * n + i]);
                if i != j {
                    prop_assert!(d[i * n + j] <= h[i * n + j].min(h[j * n + i]) + 1e-12);
                }
                for k in 0..n {
                    prop_assert!(d[i * n + k] <= d[i * n + j] + d[j * n + k] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn harmonic_energy_is_level_independent(u in prop::collection::vec(-2.0..2.0f64, 3)) {
        let pcf = Pcf::sg(2).unwrap();
        let e0 = pcf.hs.energy0(&u);
        for n in 0..4 {
            let net = build_level(&pcf.ss, n);
            let e = pcf.graph_energy(&net, &pcf.harmonic_extension(&net, &u));
            prop_assert!((e - e0).abs() <= 1e-10 * e0.max(1.0));
        }
    }

    #[test]
    fn m2_is_invariant_under_joint_rescaling(c in 0.01..100.0f64) {
        let pcf = Pcf::sg(2).unwrap();
        let hb = helmert_basis(3);
        let b1: Vec<f64> = hb.column(0).iter().copied().collect();
        let b2: Vec<f64> = hb.column(1).iter().copied().collect();
        let (h1, h2) = (HarmonicFunction::new(&pcf, &b1, 3).unwrap(), HarmonicFunction::new(&pcf, &b2, 3).unwrap());
        let mu = kusuoka_pair_measure(&pcf, &h1, &h2, 3).unwrap();
        let theta = cell_graph_metric(&pcf, &mu, 3).unwrap().diameters;
        let base = m2_constant(&theta, &mu, &pcf, 3).unwrap().c_star;
        let mut t2 = theta.clone();
        t2.diam.iter_mut().flatten().for_each(|d| *d *= c.sqrt());
        let scaled = m2_constant(&t2, &mu.scaled(c), &pcf, 3).unwrap().c_star;
        prop_assert!((scaled / base - 1.0).abs() < 1e-9);
    }

    #[test]
    fn report_round_trips(xs in prop::collection::vec(prop_oneof![
        any::<f64>(), Just(f64::INFINITY), Just(f64::NEG_INFINITY), Just(f64::NAN)
    ], 1..20), texts in prop::collection::vec("[ -~]{0,12}", 1..20)) {
        let mut t = Table::new("t", &[("x", ColumnKind::Float), ("s", ColumnKind::Text)]);
        for (x, s) in xs.iter().zip(&texts) {
            t.push(vec![Cell::Float(*x), Cell::Text(s.clone())]);
        }
        let cfg = RunConfig { group: "pcf".into(), verb: "spectrum".into(), normalized: true, ..Default::default() };
        let mut rep = cwdlab::report::run(&cfg).unwrap();
        rep.tables.push(t);
        let text = rep.to_json().unwrap();
        let back = Report::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), text);
        let col = back.table("t").unwrap().column("x").unwrap();
        for (c, x) in col.iter().zip(&xs) {
            let y = c.as_f64().unwrap();
            prop_assert!(y.to_bits() == x.to_bits() || (y.is_nan() && x.is_nan()));
        }
    }
}
