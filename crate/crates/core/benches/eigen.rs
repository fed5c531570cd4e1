use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dirac_stability::par::map_collect;
use dirac_stability::{assemble, build_grid, eigvals, ComplexMatrix, Exec, Form, ModelKind};

fn random(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn single_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigvals_random");
    for n in [32, 64, 128] {
        let a = random(n, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| eigvals(a).unwrap())
        });
    }
    group.finish();

    let grid = build_grid(50, 10.0).unwrap();
    let op = assemble(
        ModelKind::MassiveThirring,
        0.0,
        0.3,
        &grid,
        Form::BlockDiagonalized,
    )
    .unwrap();
    c.bench_function("eigvals_mtm_operator_n50", |b| {
        b.iter(|| eigvals(&op.matrix).unwrap())
    });
}

fn batch(c: &mut Criterion) {
    let batch: Vec<ComplexMatrix> = (0..16).map(|s| random(48, s)).collect();
    let mut group = c.benchmark_group("eigvals_batch16_n48");
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| b.iter(|| map_collect(exec, &batch, |a| eigvals(a).unwrap())),
        );
    }
    group.finish();
}

criterion_group!(benches, single_solve, batch);
criterion_main!(benches);
