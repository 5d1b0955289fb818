use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tubersg_core::{
    estimate_sg, fit_all_frequencies, fit_poly4, gen_inverse_model, published_model, FrequencyGrid,
    SynthConfig,
};

fn bench_pipeline(c: &mut Criterion) {
    let m = published_model();
    let grid = FrequencyGrid::default_band();
    let cfg = SynthConfig::default().with_seed(1);
    let ds = gen_inverse_model(&cfg, &m, &grid).unwrap();
    let coeffs = fit_all_frequencies(&ds).unwrap();

    c.bench_function("gen_inverse_model 250x283", |b| {
        b.iter(|| gen_inverse_model(black_box(&cfg), &m, &grid).unwrap())
    });
    c.bench_function("fit_all_frequencies 250x283", |b| {
        b.iter(|| fit_all_frequencies(black_box(&ds)).unwrap())
    });
    c.bench_function("fit_poly4 283", |b| {
        b.iter(|| fit_poly4(&grid, black_box(&coeffs.c1)).unwrap())
    });
    c.bench_function("estimate_sg", |b| {
        b.iter(|| estimate_sg(&m, black_box(62.5), black_box(1.37)).unwrap())
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
