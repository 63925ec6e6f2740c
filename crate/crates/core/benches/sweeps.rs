use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hellylat::affine::AffineLattice;
use hellylat::catalog::{generate, CatalogRecipe};
use hellylat::helly::{helly_check_window, Graph};
use hellylat::suites::{run_suites, SuiteConfig};
use hellylat::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for name in ["ball-interval", "garside-helly", "coxeter-local"] {
        let names = vec![name.to_string()];
        for (label, exec) in MODES {
            let config = SuiteConfig { exec, ..SuiteConfig::default() };
            group.bench_with_input(BenchmarkId::new(name, label), &config, |b, config| {
                b.iter(|| run_suites(&names, config).unwrap())
            });
        }
    }
    group.finish();
}

fn affine_joins(c: &mut Criterion) {
    let m = AffineLattice::new(generate(&CatalogRecipe::Boolean { n: 3 }).unwrap(), 1).unwrap();
    let points = m.points_in_box(-1, 1);
    let mut group = c.benchmark_group("affine-join-sweep");
    group.sample_size(10);
    for (label, exec) in MODES {
        group.bench_function(label, |b| {
            b.iter(|| exec.map(&points, |x| points.iter().map(|y| m.join(x, y)).collect::<Vec<_>>()))
        });
    }
    group.finish();
}

fn king_window(c: &mut Criterion) {
    let w = 12usize;
    let g = Graph::king_grid(w, w);
    let core: Vec<usize> = (0..w * w).filter(|i| (3..9).contains(&(i % w)) && (3..9).contains(&(i / w))).collect();
    let mut group = c.benchmark_group("king-window");
    group.sample_size(10);
    for (label, exec) in MODES {
        group.bench_function(label, |b| b.iter(|| helly_check_window(&g, &core, 2, 10_000_000, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, suites, affine_joins, king_window);
criterion_main!(benches);
