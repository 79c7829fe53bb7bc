use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qlocal::gallery::{random_channel, random_product_channel};
use qlocal::locality::{theorem1_factorize, theorem3_factorize};
use qlocal::tensorlab::PureState;
use qlocal::{BipartiteDims, Exec, PipelineConfig};

const STRATEGIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn slice_probes(c: &mut Criterion) {
    let dims = BipartiteDims::new(3, 3).unwrap();
    let n = random_product_channel(3, 3, 3, 1).unwrap().channel;
    let xi = PureState::basis(3, 0).unwrap();
    let mut group = c.benchmark_group("theorem1_probes_3x3");
    for probes in [16, 128] {
        for (name, exec) in STRATEGIES {
            let cfg = PipelineConfig::default()
                .with_probes(probes)
                .with_exec(exec);
            group.bench_with_input(BenchmarkId::new(name, probes), &cfg, |b, cfg| {
                b.iter(|| theorem1_factorize(black_box(&n), &xi, dims, cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn certification_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("theorem3_scan");
    for (da, db) in [(2, 3), (3, 3)] {
        let dims = BipartiteDims::new(da, db).unwrap();
        let product = random_product_channel(da, db, 2, 2).unwrap().channel;
        let generic = random_channel(da * db, da * db, 1, 3).unwrap();
        for (name, exec) in STRATEGIES {
            let cfg = PipelineConfig::default().with_exec(exec);
            let id = format!("{da}x{db}");
            group.bench_with_input(
                BenchmarkId::new(format!("{name}/product"), &id),
                &cfg,
                |b, cfg| b.iter(|| theorem3_factorize(black_box(&product), dims, cfg).unwrap()),
            );
            group.bench_with_input(
                BenchmarkId::new(format!("{name}/generic"), &id),
                &cfg,
                |b, cfg| b.iter(|| theorem3_factorize(black_box(&generic), dims, cfg).unwrap()),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, slice_probes, certification_scan);
criterion_main!(benches);
