use cwdlab::linalg::*;

fn path(n: usize, c: f64) -> Laplacian {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, c)).collect();
    Laplacian::from_edges(n, &edges)
}

#[test]
fn path_dirichlet_is_affine() {
    let lap = path(11, 1.0);
    let mut fixed = vec![None; 11];
    fixed[0] = Some(1.0);
    fixed[10] = Some(0.0);
    for solver in [Solver::Cg, Solver::Dense] {
        let sol = solve_dirichlet(&lap, &fixed, None, solver).unwrap();
        for (i, u) in sol.u.iter().enumerate() {
            assert!((u - (1.0 - i as f64 / 10.0)).abs() < 1e-12);
        }
    }
}

#[test]
fn duplicate_edges_sum() {
    let lap = Laplacian::from_edges(2, &[(0, 1, 1.0), (1, 0, 2.0)]);
    assert_eq!(lap.energy(&[1.0, 0.0]), 3.0);
    assert_eq!(lap.diag(), vec![3.0, 3.0]);
}

#[test]
fn floating_component_is_zeroed() {
    let lap = Laplacian::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
    let fixed = vec![Some(1.0), None, None, None];
    let sol = solve_dirichlet(&lap, &fixed, None, Solver::Auto).unwrap();
    assert_eq!(sol.floating, 2);
    assert_eq!(sol.u, vec![1.0, 1.0, 0.0, 0.0]);
}

#[test]
fn dijkstra_and_floyd_agree() {
    let adj = vec![vec![(1, 1.0), (2, 5.0)], vec![(0, 1.0), (2, 1.5)], vec![(0, 5.0), (1, 1.5)]];
    let d = dijkstra(&adj, &[(0, 0.0)]);
    let mut m = vec![f64::INFINITY; 9];
    for (i, row) in adj.iter().enumerate() {
        m[i * 3 + i] = 0.0;
        for &(j, l) in row {
            m[i * 3 + j] = l;
        }
    }
    floyd_warshall(3, &mut m);
    assert_eq!(d, vec![0.0, 1.0, 2.5]);
    assert_eq!(&m[0..3], &d[..]);
}
