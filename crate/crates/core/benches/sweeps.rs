use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cwdlab::diag::{cap_beta_check, pcf_resistance_network, GraphForm};
use cwdlab::metric::{doubling_constant_estimate, FiniteMetricSpace};
use cwdlab::pcf::Pcf;
use std::hint::black_box;

/// Runs `f` on the global pool and, with the `parallel` feature, on a one-thread pool.
fn modes(c: &mut Criterion, name: &str, f: impl Fn() + Sync) {
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    let label = if cwdlab::par::is_parallel() { "parallel" } else { "sequential-build" };
    g.bench_function(BenchmarkId::from_parameter(label), |b| b.iter(&f));
    #[cfg(feature = "parallel")]
    {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        g.bench_function(BenchmarkId::from_parameter("one-thread"), |b| b.iter(|| one.install(&f)));
    }
    g.finish();
}

fn sweeps(c: &mut Criterion) {
    let pcf = Pcf::sg(2).unwrap();
    modes(c, "sg_network_level5", || {
        black_box(pcf_resistance_network(&pcf, 5).unwrap());
    });

    let grid = FiniteMetricSpace::grid_1d(600, 0.0, 1.0).unwrap();
    let radii: Vec<f64> = (1..8).map(|j| 0.5f64.powi(j)).collect();
    modes(c, "doubling_grid600", || {
        black_box(doubling_constant_estimate(&grid, &radii).unwrap());
    });

    let form = GraphForm::path(1024, 1.0).unwrap();
    let line = FiniteMetricSpace::grid_1d(1025, 0.0, 1.0).unwrap();
    let samples: Vec<(usize, f64)> =
        (2..7).flat_map(|j| [256, 512, 700].map(|x| (x, 0.5f64.powi(j)))).collect();
    modes(c, "cap_beta_path1024", || {
        black_box(cap_beta_check(&form, &line, 2.0, 2.0, &samples).unwrap());
    });
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
