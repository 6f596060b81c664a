use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vrp_qaoa::ansatz::{evolve_density, evolve_statevector, Engine};
use vrp_qaoa::optimize::{objective, ObjectiveKind, OptimizerConfig};
use vrp_qaoa::sim::sample;
use vrp_qaoa::{build_constraints, penalize, NoiseModel, PenaltyRule, VrpInstance};

fn encoding(c: &mut Criterion) {
    let inst = VrpInstance::three_node();
    c.bench_function("encode/three_node", |b| {
        b.iter(|| {
            let cs = build_constraints(black_box(&inst)).unwrap();
            penalize(&inst, &cs, PenaltyRule::default()).unwrap()
        })
    });
}

fn evolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve");
    for p in [1, 2, 3] {
        let fx = vrp_qaoa_bench::three_node(p);
        group.bench_with_input(BenchmarkId::new("statevector_exact", p), &fx, |b, fx| {
            b.iter(|| {
                evolve_statevector(&fx.hybrid, &fx.cost, black_box(&fx.params), Engine::Exact)
                    .unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("statevector_gates", p), &fx, |b, fx| {
            b.iter(|| {
                evolve_statevector(&fx.hybrid, &fx.cost, black_box(&fx.params), Engine::Gates)
                    .unwrap()
            })
        });
        let noise = NoiseModel::reference();
        group.bench_with_input(BenchmarkId::new("density_noisy", p), &fx, |b, fx| {
            b.iter(|| {
                evolve_density(&fx.hybrid, &fx.cost, black_box(&fx.params), Some(&noise)).unwrap()
            })
        });
    }
    group.finish();
}

fn objectives(c: &mut Criterion) {
    let fx = vrp_qaoa_bench::three_node(2);
    let cfg = OptimizerConfig::default();
    let mut group = c.benchmark_group("objective");
    for (name, kind) in [
        ("exact", ObjectiveKind::Exact),
        ("shots", ObjectiveKind::Shots),
        (
            "noisy_shots",
            ObjectiveKind::NoisyShots(NoiseModel::reference()),
        ),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        group.bench_function(name, |b| {
            b.iter(|| {
                objective(
                    black_box(&fx.params),
                    &fx.standard,
                    &fx.cost,
                    &kind,
                    &cfg,
                    &mut rng,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let probs = vec![1.0 / 64.0; 64];
    c.bench_function("sample/4096_of_64", |b| {
        b.iter(|| sample(black_box(&probs), 4096, 7).unwrap())
    });
}

criterion_group!(benches, encoding, evolution, objectives, sampling);
criterion_main!(benches);
