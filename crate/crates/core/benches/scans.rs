use std::hint::black_box;

use compactnet::nets::{bw_extract_with, net_of, probe_universe, verify_coverage_with};
use compactnet::rational::{int, rat};
use compactnet::{Exec, Point, ProductPoint, Probes, Space};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn cycle(n: usize) -> Space {
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let table = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = i.abs_diff(j);
                    int(k.min(n - k) as i64)
                })
                .collect()
        })
        .collect();
    Space::finite("cycle", labels, table).unwrap()
}

fn coverage(c: &mut Criterion) {
    let s = Space::cantor();
    let probes = probe_universe(&s, 10).unwrap();
    let cert = net_of(&s, &rat(1, 16)).unwrap();
    let mut g = c.benchmark_group("verify_coverage");
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::new(name, probes.len()), |b| {
            b.iter(|| verify_coverage_with(&s, &cert, black_box(&probes), exec).unwrap())
        });
    }
    g.finish();
}

fn axioms(c: &mut Criterion) {
    let s = cycle(64);
    let mut g = c.benchmark_group("check_axioms");
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::new(name, 64), |b| {
            b.iter(|| s.check_axioms_with(black_box(Probes::Exhaustive), exec).unwrap())
        });
    }
    g.finish();
}

fn extraction(c: &mut Criterion) {
    let s = Space::cantor();
    let term = |k: usize| {
        let mut prefix = vec![Point::Discrete(0); k - 1];
        prefix.push(Point::Discrete(1));
        Point::Sequence(ProductPoint::new(prefix, 0))
    };
    let mut g = c.benchmark_group("bw_extract");
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::new(name, 256), |b| {
            b.iter(|| bw_extract_with(&s, term, black_box(256), 4, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, coverage, axioms, extraction);
criterion_main!(benches);
