use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use robinwall::infomeasures::{info_record, measure};
use robinwall::oracle::{fd_energies, GridSpec};
use robinwall::spectrum::energy;
use robinwall::states::build_state;
use robinwall::{BoundarySpec, ToleranceConfig};

fn spectrum(c: &mut Criterion) {
    c.bench_function("energy robin- n=3", |b| {
        b.iter(|| energy(BoundarySpec::RobinMinus, black_box(3), black_box(1.7)).unwrap())
    });
    let grid = GridSpec::default_for(1.0, 6).unwrap();
    c.bench_function("fd_energies 6 levels", |b| {
        b.iter(|| fd_energies(BoundarySpec::RobinPlus, black_box(1.0), 6, &grid).unwrap())
    });
}

fn measures(c: &mut Criterion) {
    let cfg = ToleranceConfig::default();
    c.bench_function("build_state robin- n=1", |b| {
        b.iter(|| build_state(energy(BoundarySpec::RobinMinus, 1, black_box(0.5)).unwrap(), &cfg).unwrap())
    });
    c.bench_function("info_record robin- n=1", |b| {
        b.iter(|| {
            let sf = build_state(energy(BoundarySpec::RobinMinus, 1, black_box(0.5)).unwrap(), &cfg).unwrap();
            info_record(&sf).unwrap()
        })
    });
    c.bench_function("measure dirichlet n=5", |b| {
        b.iter(|| measure(BoundarySpec::Dirichlet, black_box(5), 1.0, &cfg).unwrap())
    });
}

criterion_group!(benches, spectrum, measures);
criterion_main!(benches);
