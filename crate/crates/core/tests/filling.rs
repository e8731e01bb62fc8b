use cwdlab::diag::GraphForm;
use cwdlab::filling::*;
use cwdlab::metric::{build_net_hierarchy, FiniteMetricSpace};
use cwdlab::report::line_form;

fn grid_filling(n: usize, a: f64, lambda: f64, levels: usize) -> (FiniteMetricSpace, FillingGraph) {
    let s = FiniteMetricSpace::grid_1d(n, 0.0, 0.5).unwrap();
    let nets = build_net_hierarchy(&s, a, levels).unwrap();
    let g = build_filling(&s, &nets, lambda, None, false).unwrap();
    (s, g)
}

fn uniform_gentle(s: &FiniteMetricSpace, g: &FillingGraph, gamma: f64) -> GentleFunction {
    let pm = vec![1.0 / s.len() as f64; s.len()];
    gentle_capacity_function(g, &vertex_ball_masses(g, s, &pm), gamma).unwrap()
}

#[test]
fn singleton_filling() {
    let s = FiniteMetricSpace::from_coords(vec![vec![0.0]]).unwrap();
    let nets = build_net_hierarchy(&s, 4.0, 0).unwrap();
    let g = build_filling(&s, &nets, 8.0, None, false).unwrap();
    assert_eq!(g.len(), 1);
    assert_eq!(g.horizontal_edge_count(), 0);
    assert!(g.children[0].is_empty());
    let gentle = gentle_capacity_function(&g, &[1.0], 2.0).unwrap();
    assert_eq!((gentle.k_h, gentle.k_v), (1.0, 1.0));
    assert_eq!(check_h2(&g, &WeightFunction::constant(&g, 0.3).unwrap()), 1.0);
}

#[test]
fn grid_filling_structure() {
    let (s, g) = grid_filling(1000, 40.0, 32.0, 2);
    for k in 0..2 {
        assert!(g.levels[k].iter().all(|&v| !g.children[v].is_empty()));
    }
    for k in 0..=2 {
        let ids = &g.levels[k];
        for (i, &u) in ids.iter().enumerate() {
            for &v in &ids[i + 1..] {
                let d = s.dist(g.center(u), g.center(v));
                let want = d < 32.0 * (g.radius(u) + g.radius(v));
                assert_eq!(g.horizontal[u].contains(&v), want, "level {k}: {u} {v}");
            }
        }
        let mut by_pos = ids.clone();
        by_pos.sort_by(|&u, &v| s.dist(0, g.center(u)).total_cmp(&s.dist(0, g.center(v))));
        assert!(by_pos.windows(2).all(|w| g.horizontal[w[0]].contains(&w[1])));
    }
}

#[test]
fn distant_vertices_have_no_edge() {
    let s = FiniteMetricSpace::from_coords(vec![vec![0.0], vec![0.5]]).unwrap();
    let nets = build_net_hierarchy(&s, 100.0, 1).unwrap();
    let g = build_filling(&s, &nets, 3.0, None, false).unwrap();
    let lvl = &g.levels[1];
    assert_eq!(lvl.len(), 2);
    assert!(g.horizontal[lvl[0]].is_empty());
}

#[test]
fn h1_examples() {
    let (_, g) = grid_filling(200, 10.0, 8.0, 2);
    let h = check_h1(&WeightFunction::constant(&g, 0.1).unwrap());
    assert_eq!((h.eta_minus, h.eta_plus, h.pass), (0.1, 0.1, true));
    let mut rho = vec![0.1; g.len()];
    rho[3] = 0.999;
    let h = check_h1(&WeightFunction::new(&g, rho.clone()).unwrap());
    assert!(h.pass && h.eta_plus == 0.999);
    rho[3] = 1.0;
    assert!(!check_h1(&WeightFunction::new(&g, rho).unwrap()).pass);
}

#[test]
fn h2_perturbation() {
    let (_, g) = grid_filling(200, 10.0, 8.0, 2);
    assert_eq!(check_h2(&g, &WeightFunction::constant(&g, 0.2).unwrap()), 1.0);
    let v = g.levels[1][1];
    assert!(!g.horizontal[v].is_empty());
    let mut rho = vec![0.2; g.len()];
    rho[v] = 0.4;
    assert!(check_h2(&g, &WeightFunction::new(&g, rho).unwrap()) >= 2.0 * (1.0 - 1e-12));
}

#[test]
fn small_constant_weight_fails_h3prime() {
    let (s, g) = grid_filling(120, 12.0, 4.0, 3);
    let w = WeightFunction::constant(&g, 1.0 / 12.0).unwrap();
    let fast = check_h3prime(&g, &s, &w);
    let slow = check_h3prime_exhaustive(&g, &s, &w);
    assert!(!fast.no_crossing_paths);
    assert!(fast.min_cost < 1.0);
    assert!((fast.min_cost - slow.min_cost).abs() <= 1e-12);
    assert_eq!(fast.nonvacuous, slow.nonvacuous);
}

#[test]
fn half_weight_passes_h3prime() {
    // a ≥ 2λ: a single horizontal edge cannot leave 2B from inside B
    let (s, g) = grid_filling(200, 8.0, 3.0, 3);
    let w = WeightFunction::constant(&g, 0.5).unwrap();
    let fast = check_h3prime(&g, &s, &w);
    let slow = check_h3prime_exhaustive(&g, &s, &w);
    assert!(fast.pass, "{}", fast.min_cost);
    assert_eq!(fast.min_cost, slow.min_cost);
}

#[test]
fn boundary_estimates() {
    let a = 10.0;
    let (s, g) = grid_filling(300, a, 8.0, 3);
    let w = WeightFunction::constant(&g, 1.0 / a).unwrap();
    let e = boundary_metric_estimate(&g, &s, &w, 2.0, &[(5, 5)]).unwrap();
    assert!(e[0].unseparated);
    assert_eq!(e[0].level, 3);
    assert!((e[0].theta - w.pi(g.levels[3][0])).abs() < 1e-15);
    let far = boundary_metric_estimate(&g, &s, &w, 2.0, &[(0, 299)]).unwrap();
    assert!(far[0].level <= 1);
    let pairs: Vec<(usize, usize)> = (0..300).step_by(7).flat_map(|x| [(x, (x + 13) % 300), (x, (x * 5 + 1) % 300)]).collect();
    let ratios: Vec<f64> = boundary_metric_estimate(&g, &s, &w, 2.0, &pairs)
        .unwrap()
        .iter()
        .filter(|e| !e.unseparated && e.x != e.y)
        .map(|e| e.theta / s.dist(e.x, e.y))
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(hi / lo <= 4.0 * a, "{lo} {hi}");
}

#[test]
fn drho_examples() {
    let (_, g) = grid_filling(300, 10.0, 8.0, 3);
    let c: f64 = 0.2;
    let w = WeightFunction::constant(&g, c).unwrap();
    let leaf = g.levels[3][17];
    let parent = g.parent[leaf].unwrap();
    assert!((filling_metric_drho(&g, &w, leaf, parent).unwrap() + c.ln()).abs() < 1e-12);
    assert!((filling_metric_drho(&g, &w, g.root(), leaf).unwrap() + 3.0 * c.ln()).abs() < 1e-12);
    let kids = &g.children[g.levels[1][1]];
    let (u, v) = (kids[0], kids[1]);
    assert!(g.horizontal[u].contains(&v));
    let want = horizontal_length(&g, &w).min(-2.0 * c.ln());
    assert!((filling_metric_drho(&g, &w, u, v).unwrap() - want).abs() < 1e-12);
}

#[test]
fn gentle_examples() {
    let a = 40.0;
    let (s, g) = grid_filling(1000, a, 32.0, 2);
    let gentle = uniform_gentle(&s, &g, 2.0);
    // m(B) ≈ 2r so 𝒞 ≈ 2/r and child/parent ratios ≈ a below the root, whose ball saturates
    for &p in &g.levels[1] {
        for &c in &g.children[p] {
            let q = gentle.c[c] / gentle.c[p];
            assert!(q >= a / 4.0 && q <= 4.0 * a, "{p} -> {c}: {q}");
        }
    }
    let pm = vec![1.0 / 1000.0; 1000];
    let masses = vertex_ball_masses(&g, &s, &pm);
    let g0 = gentle_capacity_function(&g, &masses, 0.0).unwrap();
    assert_eq!(g0.c, masses);
    if g0.e_holds {
        for v in 0..g.len() {
            let np: f64 = g.children[v].iter().filter(|&&u| g0.non_peripheral[u]).map(|&u| g0.c[u]).sum();
            let all: f64 = g.children[v].iter().map(|&u| g0.c[u]).sum();
            assert!(all - np <= (1.0 - g0.e_delta) * g0.c[v] + 1e-12);
        }
    }
}

#[test]
fn gradient_sigma_crossing_sums() {
    let (s, g) = grid_filling(400, 20.0, 8.0, 3);
    let form = line_form(&s).unwrap();
    for &b in g.levels[1].iter().chain(&g.levels[2]) {
        let l = discrete_gradient_sigma(&g, &s, &form, b).unwrap();
        if l.vacuous {
            assert!(l.values.is_empty());
            continue;
        }
        if let Some(c) = min_crossing_cost(&g, &s, b, &|_, _| 0.0, &|v| l.get(v)) {
            assert!(c >= 1.0 - 1e-9, "B = {b}: {c}");
        }
    }
}

#[test]
fn patch_sigma_is_pointwise_max() {
    let mk = |b, values: Vec<(usize, f64)>| LocalSigma { b, values, vacuous: false, cutoff_energy: 0.0 };
    let one = patch_sigma(5, &[mk(0, vec![(1, 0.5), (2, 0.25)])]);
    assert_eq!(one.sigma, vec![0.0, 0.5, 0.25, 0.0, 0.0]);
    let two = patch_sigma(5, &[mk(0, vec![(1, 0.5)]), mk(1, vec![(3, 0.7)])]);
    assert_eq!(two.sigma, vec![0.0, 0.5, 0.0, 0.7, 0.0]);
    let locals = [mk(0, vec![(1, 0.5), (2, 0.1)]), mk(1, vec![(2, 0.3), (4, 0.2)]), mk(2, vec![(1, 0.2)])];
    let p = patch_sigma(5, &locals);
    for v in 0..5 {
        let want = locals.iter().map(|l| l.get(v)).fold(0.0, f64::max);
        assert_eq!(p.sigma[v], want);
    }
    assert_eq!(p.over_quarter, 2);
}

/// Grid on [0, 1/2] with a = 100, λ = 3: every parent has a non-peripheral child.
fn feasible() -> (FiniteMetricSpace, FillingGraph, GentleFunction) {
    let (s, g) = grid_filling(1000, 100.0, 3.0, 2);
    let gentle = uniform_gentle(&s, &g, 2.0);
    (s, g, gentle)
}

#[test]
fn zero_sigma_synthesis_balances_every_parent() {
    let (s, g, gentle) = feasible();
    assert!(gentle.e_holds);
    let beta = 2.5;
    let (w, rep) = synthesize_weight(&g, &s, &gentle, &SigmaFunction::zero(&g), beta, SynthesisPolicy::Report).unwrap();
    assert!(rep.unbalanced.is_empty());
    assert!(rep.h1.pass);
    assert!(rep.k0 <= rep.k0_bound);
    for v in (0..g.len()).filter(|&v| !g.children[v].is_empty()) {
        let sum: f64 = g.children[v].iter().map(|&u| w.rho[u].powf(beta) * gentle.c[u]).sum();
        assert!((sum - gentle.c[v]).abs() <= 1e-10 * gentle.c[v], "parent {v}");
    }
    assert!(rep.k2 <= 1.0 + 1e-8);
    assert_eq!(compatibility_check(&g, &w, &gentle, beta), rep.k2);
    let m = measure_from_weights(&g, &w, &gentle, beta, DRIFT_TOL).unwrap();
    assert!(m.drift <= 1e-8);
    // μ_n of the descendants of B equals π(B)^β 𝒞(B)
    for &b in &g.levels[1] {
        let own = (beta * w.log_pi[b]).exp() * gentle.c[b];
        let deep: f64 = g.levels[2]
            .iter()
            .zip(&m.atoms[2])
            .filter(|(&v, _)| g.ancestor(v, 1) == b)
            .map(|(_, &x)| x)
            .sum();
        assert!((deep - own).abs() <= 1e-9 * own);
    }
}

#[test]
fn perturbed_weight_breaks_compatibility() {
    let (s, g, gentle) = feasible();
    let (w, _) = synthesize_weight(&g, &s, &gentle, &SigmaFunction::zero(&g), 2.5, SynthesisPolicy::Report).unwrap();
    let mut rho = w.rho.clone();
    let v = g.levels[2][10];
    rho[v] *= 1.5;
    let bad = WeightFunction::new(&g, rho).unwrap();
    assert!(compatibility_check(&g, &bad, &gentle, 2.5) > 1.0 + 1e-6);
    assert!(measure_from_weights(&g, &bad, &gentle, 2.5, 1e-12).is_err());
}

#[test]
fn counting_measure_at_beta_zero() {
    let (_, g) = grid_filling(200, 10.0, 8.0, 2);
    let ones = gentle_from_values(&g, vec![1.0; g.len()], 0.0).unwrap();
    let w = WeightFunction::constant(&g, 0.3).unwrap();
    let m = measure_from_weights(&g, &w, &ones, 0.0, f64::INFINITY).unwrap();
    for (k, a) in m.atoms.iter().enumerate() {
        assert!(a.iter().all(|&x| x == 1.0));
        assert_eq!(m.totals[k], g.levels[k].len() as f64);
    }
}

#[test]
fn beta_two_is_flagged() {
    let (s, g, gentle) = feasible();
    let (_, rep) = synthesize_weight(&g, &s, &gentle, &SigmaFunction::zero(&g), 2.0, SynthesisPolicy::Report).unwrap();
    assert!(rep.beta_margin_flag);
}

#[test]
fn strict_mode_stops_on_violations() {
    let s = FiniteMetricSpace::grid_1d(1000, 0.0, 1.0).unwrap().normalized_diameter(0.5).unwrap();
    let nets = build_net_hierarchy(&s, 40.0, 3).unwrap();
    let g = build_filling(&s, &nets, 32.0, None, false).unwrap();
    let form: GraphForm = line_form(&s).unwrap();
    let gentle = gentle_capacity_function(&g, &vertex_ball_masses(&g, &s, form.measure()), 2.0).unwrap();
    let (sigma, _) = gradient_sigma(&g, &s, &form).unwrap();
    let err = synthesize_weight(&g, &s, &gentle, &sigma, 2.5, SynthesisPolicy::Strict).unwrap_err();
    assert!(matches!(err, cwdlab::Error::S2Violated { .. }), "{err}");
}
