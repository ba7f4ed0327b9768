use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use interphase::evolution::{initial_state, simulate_mode0, EvolutionOptions, InitKind};
use interphase::materials::reference_pair;
use interphase::spectrum::{classify, ClassifyOptions};
use interphase_bench::{reference_context, reference_equilibrium};

fn symbols(c: &mut Criterion) {
    let mut g = c.benchmark_group("symbols");
    for order in [24, 48, 96] {
        let ctx = reference_context(2.0, order);
        g.bench_with_input(BenchmarkId::new("heat", order), &ctx, |b, ctx| {
            b.iter(|| ctx.heat(black_box(2), black_box(1.0)).unwrap().value)
        });
        g.bench_with_input(BenchmarkId::new("stokes", order), &ctx, |b, ctx| {
            b.iter(|| ctx.stokes(black_box(2), black_box(1.0)).unwrap().value)
        });
    }
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let ctx = reference_context(2.0, 48);
    let mut g = c.benchmark_group("spectrum");
    g.sample_size(10);
    g.bench_function("unstable_eigenvalue", |b| b.iter(|| ctx.find_unstable_eigenvalue().unwrap()));
    let pair = reference_pair(0.5);
    let eq = reference_equilibrium(1.2);
    let opts = ClassifyOptions::default();
    g.bench_function("classify", |b| b.iter(|| classify(black_box(&eq), &pair, &opts).unwrap()));
    g.finish();
}

fn evolution(c: &mut Criterion) {
    let ctx = reference_context(2.0, 48);
    let init = initial_state(&ctx, &InitKind::Bump).unwrap();
    let opts = EvolutionOptions { t_end: 0.5, dt: 0.005 };
    let mut g = c.benchmark_group("evolution");
    g.sample_size(10);
    g.bench_function("mode0_100_steps", |b| b.iter(|| simulate_mode0(&ctx, &init, opts).unwrap().q_drift));
    g.finish();
}

criterion_group!(benches, symbols, spectrum, evolution);
criterion_main!(benches);
