use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use spinrank::netgen::{generate, GenSpec};
use spinrank::{spin, Execution, SpinConfig, Variant};

fn variants(c: &mut Criterion) {
    let mut group = c.benchmark_group("spin_iteration");
    group.sample_size(20);
    for (nodes, edges) in [(10_000, 100_000), (100_000, 1_000_000)] {
        let net = generate(&GenSpec::new(nodes, edges, 7)).expect("valid grid entry");
        group.throughput(Throughput::Elements(net.edge_count() as u64));
        for exec in [Execution::Sequential, Execution::Parallel] {
            let cfg = SpinConfig { tau: 1e-300, max_iterations: 1, execution: exec, ..SpinConfig::default() };
            for v in Variant::ALL {
                let id = BenchmarkId::new(format!("{}/{}", v.name(), exec.label()), format!("{nodes}x{edges}"));
                group.bench_with_input(id, &net, |b, net| b.iter(|| black_box(spin(net, &cfg, v).unwrap())));
            }
        }
    }
    group.finish();
}

fn degree(c: &mut Criterion) {
    let net = generate(&GenSpec::new(100_000, 1_000_000, 7)).expect("valid grid entry");
    c.bench_function("indegree/100000x1000000", |b| {
        b.iter(|| black_box(spinrank::centrality::degree(&net, spinrank::centrality::DegreeMode::In, false)))
    });
}

criterion_group!(benches, variants, degree);
criterion_main!(benches);
