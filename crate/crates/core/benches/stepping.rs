//! Compare stepping kernels. Run once with default features and once with
//! `--no-default-features`; ids carry the build's mode so the reports line
//! up side by side.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use dmaxwell::lattice::Backend;
use dmaxwell::maxwell::{self, light_cone_bounds, CouplingFactor, FieldState, MaxwellStepper, StepBackend};
use dmaxwell::engine::Stepper;
use dmaxwell::PrunePolicy;
use std::hint::black_box;

const MODE: &str = if cfg!(feature = "parallel") { "parallel" } else { "sequential" };

fn warmed(steps: u64, backend: Backend) -> FieldState {
    let mut st = FieldState::canonical_with(backend);
    maxwell::run(
        &mut st,
        CouplingFactor::sqrt_alpha(),
        StepBackend::Direct,
        steps,
        &[],
        PrunePolicy::disabled(),
    )
    .unwrap();
    st
}

fn step_backends(c: &mut Criterion) {
    let p = CouplingFactor::sqrt_alpha();
    let mut g = c.benchmark_group(format!("step/{MODE}"));
    for steps in [24u64, 60] {
        let st = warmed(steps, Backend::Sparse);
        g.throughput(Throughput::Elements(st.total_nonzero() as u64));
        for backend in [StepBackend::Table, StepBackend::Direct] {
            let stepper = MaxwellStepper::new(p, backend);
            g.bench_with_input(BenchmarkId::new(format!("{backend:?}"), steps), &st, |b, st| {
                b.iter(|| stepper.step(black_box(st.engine())).unwrap())
            });
        }
    }
    g.finish();
}

fn storage_backends(c: &mut Criterion) {
    let p = CouplingFactor::sqrt_alpha();
    let steps = 24u64;
    let mut g = c.benchmark_group(format!("storage/{MODE}"));
    let sparse = warmed(steps, Backend::Sparse);
    let dense = warmed(steps, Backend::Dense(light_cone_bounds(steps as u32 + 1)));
    let stepper = MaxwellStepper::new(p, StepBackend::Table);
    g.bench_function("sparse", |b| b.iter(|| stepper.step(black_box(sparse.engine())).unwrap()));
    g.bench_function("dense", |b| b.iter(|| stepper.step(black_box(dense.engine())).unwrap()));
    g.finish();
}

fn thread_pools(c: &mut Criterion) {
    let p = CouplingFactor::sqrt_alpha();
    let st = warmed(60, Backend::Sparse);
    let stepper = MaxwellStepper::new(p, StepBackend::Direct);
    let mut g = c.benchmark_group(format!("threads/{MODE}"));
    let max = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut counts = vec![1, max];
    counts.dedup();
    for n in counts {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            pool.install(|| b.iter(|| stepper.step(black_box(st.engine())).unwrap()))
        });
    }
    g.finish();
}

fn pruned_run(c: &mut Criterion) {
    let mut g = c.benchmark_group(format!("run/{MODE}"));
    g.sample_size(10);
    g.bench_function("origin_series_60_budget_5000", |b| {
        b.iter(|| {
            maxwell::origin_series(CouplingFactor::sqrt_alpha(), 60, PrunePolicy::budget(5000).unwrap()).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, step_backends, storage_backends, thread_pools, pruned_run);
criterion_main!(benches);
