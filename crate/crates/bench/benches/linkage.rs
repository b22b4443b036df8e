use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use linkscan_bench::{bench_bundle, bench_spec};
use linkscan_core::{
    estimate_linkage, filter_world_returns, fit_curve, fit_ols, run_pipeline, serial_correlation_test,
    white_test, DiagnosticsPolicy, KernelSpec, RunConfig,
};

fn bench_ols(c: &mut Criterion) {
    let bundle = bench_bundle();
    let spec = bench_spec(&bundle);
    let fit = fit_ols(&spec).unwrap();

    let mut group = c.benchmark_group("ols");
    group.bench_function("fit_176x3", |b| b.iter(|| fit_ols(black_box(&spec)).unwrap()));
    group.bench_function("white_test", |b| {
        b.iter(|| white_test(black_box(&fit), true).unwrap())
    });
    group.bench_function("breusch_godfrey", |b| {
        b.iter(|| serial_correlation_test(black_box(&fit), 1).unwrap())
    });
    group.finish();
}

fn bench_kernel(c: &mut Criterion) {
    let bundle = bench_bundle();
    let spec = KernelSpec::default();
    let country = &bundle.countries[0];

    let mut group = c.benchmark_group("kernel");
    group.bench_function("curve_176_obs_100_grid", |b| {
        b.iter(|| {
            fit_curve(
                black_box(&bundle.oil.values),
                black_box(&country.values),
                &spec,
                100,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let bundle = bench_bundle();
    let config = RunConfig::default();
    let filter = filter_world_returns(&bundle.world, &bundle.oil).unwrap();
    let policy = DiagnosticsPolicy::default();

    let mut group = c.benchmark_group("pipeline");
    group.bench_function("estimate_one_country", |b| {
        b.iter(|| {
            estimate_linkage(
                black_box(&bundle.countries[0]),
                &filter,
                &bundle.oil,
                &policy,
            )
            .unwrap()
        })
    });
    group.sample_size(20);
    group.bench_function("full_report_six_countries", |b| {
        b.iter(|| run_pipeline(black_box(&bundle), &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_ols, bench_kernel, bench_pipeline);
criterion_main!(benches);
