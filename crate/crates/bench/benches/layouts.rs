use std::collections::BTreeMap;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use treemap_core::baseline::hill_climb_realize;
use treemap_core::classify::{classify, DataClass};
use treemap_core::harness::{evaluate_pair, normalized_steps};
use treemap_core::layout::layout_tree;
use treemap_core::synth::generate_synthetic;
use treemap_core::{Algorithm, Rect};

fn root() -> Rect {
    Rect::new(0.0, 0.0, 1000.0, 1000.0)
}

fn stateless(c: &mut Criterion) {
    let class: DataClass = "2/3L-HWV-RWC-LID".parse().unwrap();
    let tree = generate_synthetic(class, 300, 2, 11).unwrap();
    let step = &normalized_steps(&tree, &root()).unwrap()[0];
    let mut group = c.benchmark_group("layout_300_leaves");
    for alg in Algorithm::ALL.into_iter().filter(|a| !a.is_stateful()) {
        group.bench_with_input(BenchmarkId::from_parameter(alg), &alg, |b, &alg| {
            b.iter(|| layout_tree(black_box(&tree), step, root(), alg))
        });
    }
    group.finish();
}

fn realizer(c: &mut Criterion) {
    let class: DataClass = "1L-HWV-SWC-LID".parse().unwrap();
    let tree = generate_synthetic(class, 100, 2, 3).unwrap();
    let steps = normalized_steps(&tree, &root()).unwrap();
    let layout = layout_tree(&tree, &steps[0], root(), Algorithm::Sqr);
    let targets: BTreeMap<String, f64> = steps[1].areas.clone();
    c.bench_function("realize_100_cells", |b| {
        b.iter(|| hill_climb_realize(black_box(&layout), &targets).unwrap())
    });
}

fn pairs(c: &mut Criterion) {
    let class: DataClass = "2/3L-LWV-RWC-RID".parse().unwrap();
    let tree = generate_synthetic(class, 60, 8, 5).unwrap();
    let mut group = c.benchmark_group("evaluate_pair_60x8");
    group.sample_size(10);
    for alg in [Algorithm::Sqr, Algorithm::Lm0, Algorithm::Lm4, Algorithm::Git] {
        group.bench_with_input(BenchmarkId::from_parameter(alg), &alg, |b, &alg| {
            b.iter(|| evaluate_pair(black_box(&tree), alg, root(), 0).unwrap())
        });
    }
    group.finish();
    c.bench_function("classify_60x8", |b| b.iter(|| classify(black_box(&tree))));
}

criterion_group!(benches, stateless, realizer, pairs);
criterion_main!(benches);
