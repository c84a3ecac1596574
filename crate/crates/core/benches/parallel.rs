use std::hint::black_box;
use std::time::Duration;

use carleman_core::carleman::lambda_sweep;
use carleman_core::fields::Interval;
use carleman_core::par;
use carleman_core::plate::{assemble, clamped_modes, resolvent_scan, DampingProfile};
use carleman_core::suite::SuiteConfig;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, usize); 2] = [("sequential", 1), ("pool", 0)];

fn resolvent(c: &mut Criterion) {
    let basis = clamped_modes(32, 1.0).unwrap();
    let damping = DampingProfile::Indicator {
        omega: vec![Interval::new(0.4, 0.6)],
        d0: 1.0,
    };
    let op = assemble(&basis, &damping).unwrap();
    let mut g = c.benchmark_group("resolvent_scan");
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    for (name, workers) in MODES {
        g.bench_function(BenchmarkId::new(name, 32), |b| {
            b.iter(|| par::with_workers(workers, || resolvent_scan(black_box(&op), 200.0, 40).unwrap()))
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut cfg = SuiteConfig::default().carleman_beta_neg.sweep;
    cfg.fields = 4;
    cfg.lambdas = vec![8.0, 16.0, 32.0];
    let mut g = c.benchmark_group("carleman_sweep");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, workers) in MODES {
        g.bench_function(name, |b| b.iter(|| par::with_workers(workers, || lambda_sweep(black_box(&cfg)).unwrap())));
    }
    g.finish();
}

fn map_kernel(c: &mut Criterion) {
    let f = |i: usize| (0..2_000).map(|k| ((i * k) as f64).sin()).sum::<f64>();
    let mut g = c.benchmark_group("map_range");
    g.bench_function("map_range_seq", |b| b.iter(|| par::map_range_seq(black_box(512), f)));
    g.bench_function("map_range", |b| b.iter(|| par::map_range(black_box(512), f)));
    g.finish();
}

criterion_group!(benches, resolvent, sweep, map_kernel);
criterion_main!(benches);
