use criterion::{black_box, criterion_group, criterion_main, Criterion};
use epgaps::ept::{
    derive_params, simulate, verify_monotonicity, ExponentModel, MonotonicityMode,
    SimulationConfig, SimulationMode, DEFAULT_PAIR_BUDGET,
};

fn monotonicity(c: &mut Criterion) {
    let model = ExponentModel::from_params(&derive_params(1, 1).unwrap()).unwrap();
    c.bench_function("monotonicity_exhaustive_ell1", |b| {
        b.iter(|| {
            verify_monotonicity(
                black_box(&model),
                MonotonicityMode::Exhaustive {
                    budget: DEFAULT_PAIR_BUDGET,
                },
            )
            .unwrap()
        })
    });
}

fn simulation(c: &mut Criterion) {
    let params = derive_params(1, 1).unwrap();
    let cfg = SimulationConfig::full_scale(
        &params,
        SimulationMode::Random {
            trials: 1_000,
            seed: 7,
        },
    )
    .unwrap();
    c.bench_function("simulate_random_1000", |b| {
        b.iter(|| simulate(black_box(&cfg)).unwrap())
    });

    let toy = SimulationConfig::toy(4, 4, 1, 3, SimulationMode::Exhaustive).unwrap();
    c.bench_function("simulate_toy_exhaustive_16_parts", |b| {
        b.iter(|| simulate(black_box(&toy)).unwrap())
    });
}

criterion_group!(benches, monotonicity, simulation);
criterion_main!(benches);
