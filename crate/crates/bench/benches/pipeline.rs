use criterion::{black_box, criterion_group, criterion_main, Criterion};

use coalsim_core::auction::allocate;
use coalsim_core::coalition::{enumerate_partitions, merge_and_split, Partition};
use coalsim_core::oracle::exhaustive_best_partition;
use coalsim_core::ScenarioConfig;

fn baseline() -> ScenarioConfig {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/paper_baseline.toml"
    ))
    .expect("baseline scenario file");
    coalsim_core::load_scenario(&text).expect("baseline scenario is valid")
}

fn bench_allocate(c: &mut Criterion) {
    let sc = baseline();
    let singles = Partition::singletons(&sc.uav_ids());
    c.bench_function("allocate_singletons_6x3", |b| {
        b.iter(|| allocate(black_box(&singles), &sc).unwrap())
    });
}

fn bench_merge_and_split(c: &mut Criterion) {
    let sc = baseline();
    c.bench_function("merge_and_split_6x3", |b| {
        b.iter(|| {
            let singles = Partition::singletons(&sc.uav_ids());
            merge_and_split(black_box(singles), &sc).unwrap()
        })
    });
}

fn bench_enumerate_partitions(c: &mut Criterion) {
    let ids: Vec<u32> = (1..=8).collect();
    c.bench_function("enumerate_partitions_8", |b| {
        b.iter(|| enumerate_partitions(black_box(&ids)).unwrap().count())
    });
}

fn bench_oracle(c: &mut Criterion) {
    let sc = baseline();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(20);
    group.bench_function("exhaustive_best_partition_6", |b| {
        b.iter(|| exhaustive_best_partition(black_box(&sc)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_allocate,
    bench_merge_and_split,
    bench_enumerate_partitions,
    bench_oracle
);
criterion_main!(benches);
