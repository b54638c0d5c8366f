use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use strata_core::analytic::{sweep_b0_matching, sweep_one_matching};
use strata_core::dynamics::{take_initiative, InitiativeStrategy, StrategyKind};
use strata_core::generators::{gen_complete, gen_erdos_renyi, sample_capacities_normal};
use strata_core::{stable_configuration, Configuration, Instance, Seed, SlotCapacities};

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("stable_configuration");
    for n in [1_000usize, 10_000] {
        let inst = Instance::new(
            gen_erdos_renyi(n, 20.0, Seed(1)).unwrap(),
            SlotCapacities::constant(n, 3),
        )
        .unwrap();
        g.bench_with_input(BenchmarkId::new("er_d20_b3", n), &inst, |b, inst| {
            b.iter(|| stable_configuration(black_box(inst)))
        });
    }
    let n = 2_000;
    let inst = Instance::new(
        gen_complete(n),
        sample_capacities_normal(n, 3.0, 0.2, Seed(2)).unwrap(),
    )
    .unwrap();
    g.bench_function("complete_2000_normal_b3", |b| {
        b.iter(|| stable_configuration(black_box(&inst)))
    });
    g.finish();
}

fn recurrences(c: &mut Criterion) {
    let mut g = c.benchmark_group("recurrence");
    g.sample_size(10);
    for n in [500usize, 2_000] {
        let p = 20.0 / (n - 1) as f64;
        g.bench_with_input(BenchmarkId::new("one_matching", n), &n, |b, &n| {
            b.iter(|| {
                let mut acc = 0.0;
                sweep_one_matching(n, p, |_, _, d| acc += d).unwrap();
                acc
            })
        });
        g.bench_with_input(BenchmarkId::new("b0_matching_3", n), &n, |b, &n| {
            b.iter(|| {
                let mut acc = 0.0;
                sweep_b0_matching(n, p, 3, |blk| acc += blk.total()).unwrap();
                acc
            })
        });
    }
    g.finish();
}

fn initiatives(c: &mut Criterion) {
    let n = 1_000;
    let inst = Instance::new(
        gen_erdos_renyi(n, 10.0, Seed(3)).unwrap(),
        SlotCapacities::constant(n, 1),
    )
    .unwrap();
    let mut g = c.benchmark_group("take_initiative");
    for kind in [
        StrategyKind::BestMate,
        StrategyKind::Decremental,
        StrategyKind::Random,
    ] {
        g.bench_function(format!("{kind:?}"), |b| {
            let mut rng = Seed(4).rng();
            let mut strategy = InitiativeStrategy::new(kind, n);
            let mut config = Configuration::empty(n);
            let mut p = 0;
            b.iter(|| {
                p = (p + 7919) % n;
                take_initiative(&mut config, &inst, p, &mut strategy, &mut rng).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, solver, recurrences, initiatives);
criterion_main!(benches);
