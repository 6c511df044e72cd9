//! Sequential against parallel execution of the enumeration-heavy kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use csskit::boolfn::{fwht_with, BooleanFunction};
use csskit::cssgame::{GameSpec, InputSets, NamedCode};
use csskit::quantum::{build_state, pauli_strategy_score, StateKind};
use csskit::statmech;
use csskit::strategy::{omega_exact_with, OmegaBudget};
use csskit::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn xor_game(code: NamedCode) -> GameSpec {
    GameSpec::xor(code.build().unwrap(), InputSets::unrestricted()).unwrap()
}

fn bench_fwht(c: &mut Criterion) {
    let mut group = c.benchmark_group("fwht");
    let signs: Vec<i64> = (0..1u64 << 20).map(|x| if (x * 2654435761) >> 7 & 1 == 1 { -1 } else { 1 }).collect();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "2^20"), |b| {
            b.iter(|| {
                let mut buf = signs.clone();
                fwht_with(&mut buf, exec);
                black_box(buf)
            })
        });
    }
    group.finish();
}

fn bench_omega(c: &mut Criterion) {
    let mut group = c.benchmark_group("omega_exact");
    group.sample_size(10);
    let game = xor_game(NamedCode::Cluster1D(8));
    let budget = OmegaBudget::default();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "cluster8"), |b| {
            b.iter(|| omega_exact_with(black_box(&game), &budget, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_nonquadraticity(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonquadraticity");
    group.sample_size(10);
    let f = BooleanFunction::from_fn(6, |x| (x & (x >> 1) & (x >> 2)).count_ones() % 2 == 1);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "cubic6"), |b| {
            b.iter(|| black_box(&f).nonquadraticity(15, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_pauli_score(c: &mut Criterion) {
    let mut group = c.benchmark_group("pauli_strategy_score");
    group.sample_size(10);
    let game = xor_game(NamedCode::Ghz(10));
    let state = build_state(&StateKind::CssCodeword(game.code().clone())).unwrap();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "ghz10"), |b| {
            b.iter(|| pauli_strategy_score(black_box(&state), &game, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_statmech(c: &mut Criterion) {
    let mut group = c.benchmark_group("statmech");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "loop_4x3"), |b| {
            b.iter(|| statmech::loop_partition(4, 3, 2f64.sqrt(), 2.0, exec).unwrap())
        });
        group.bench_function(BenchmarkId::new(name, "cluster_w00_brute_18"), |b| {
            b.iter(|| statmech::cluster_w00_brute(black_box(18), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_fwht, bench_omega, bench_nonquadraticity, bench_pauli_score, bench_statmech);
criterion_main!(benches);
