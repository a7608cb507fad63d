use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use nusat_core::alias::AliasTable;
use nusat_core::generator::{ClauseSampler, GeneratorConfig};
use nusat_core::rng::Stream;
use nusat_core::solver::TwoSatSolver;
use nusat_core::{instantiate, EnsembleSpec, Formula};

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample");
    for (name, spec) in [
        ("uniform", EnsembleSpec::Uniform),
        ("powerlaw-2.5", EnsembleSpec::PowerLaw { beta: 2.5 }),
        ("geometric-2", EnsembleSpec::Geometric { b: 2.0 }),
    ] {
        let n = 10_000;
        let d = instantiate(&spec, n).unwrap();
        let sampler = ClauseSampler::new(&d, 2).unwrap();
        let m = d.n();
        let mut f = Formula::with_arity(n, 2);
        let mut seed = 0;
        group.throughput(Throughput::Elements(m as u64));
        group.bench_function(BenchmarkId::new(name, n), |b| {
            b.iter(|| {
                seed += 1;
                sampler.sample_into(m, &GeneratorConfig::new(seed), &mut f).unwrap();
                black_box(f.num_clauses())
            })
        });
    }
    group.finish();
}

fn solving(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve2");
    for n in [1_000usize, 10_000, 100_000] {
        let d = instantiate(&EnsembleSpec::Uniform, n).unwrap();
        let f = ClauseSampler::new(&d, 2).unwrap().sample(n, &GeneratorConfig::new(7)).unwrap();
        let mut solver = TwoSatSolver::new();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| black_box(solver.is_satisfiable(&f).unwrap()))
        });
    }
    group.finish();
}

fn alias(c: &mut Criterion) {
    let d = instantiate(&EnsembleSpec::PowerLaw { beta: 2.5 }, 100_000).unwrap();
    let table = AliasTable::new(d.probabilities());
    let mut stream = Stream::new(1);
    c.bench_function("alias/sample", |b| b.iter(|| black_box(table.sample(&mut stream))));
    c.bench_function("alias/build-1e5", |b| {
        b.iter(|| black_box(AliasTable::new(d.probabilities()).len()))
    });
}

criterion_group!(benches, sampling, solving, alias);
criterion_main!(benches);
