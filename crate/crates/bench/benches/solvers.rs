use criterion::{black_box, criterion_group, criterion_main, Criterion};
use korteweg_bench::{full_data, half_space, model, smooth_samples};
use korteweg_core::grid::BoxGrid;
use korteweg_core::half::solve_reduced;
use korteweg_core::resolvent::{solve_gamma_zero, solve_general, NeumannOptions};
use korteweg_core::scan::{scan_lower_bound, ScanGrid, ScanTarget};
use korteweg_core::whole::{solve_whole, BoxSpace};
use korteweg_core::{Complex64 as C, NormalSamples, Sector, TangentialGrid};

fn whole(c: &mut Criterion) {
    let m = model();
    let space = BoxSpace::new(BoxGrid::cube(2, 256, std::f64::consts::TAU).unwrap());
    let d = smooth_samples(space.grid.len(), 0.1);
    let f = vec![smooth_samples(space.grid.len(), 0.7), smooth_samples(space.grid.len(), 1.3)];
    c.bench_function("whole_256x256", |b| b.iter(|| solve_whole(&space, black_box(&d), &f, C::new(5.0, 1.0), &m)));
}

fn reduced(c: &mut Criterion) {
    let m = model();
    let grid = TangentialGrid::new(1, 256, 20.0 * std::f64::consts::PI).unwrap();
    let normal = NormalSamples::clustered(10.0, 64);
    let g = vec![smooth_samples(256, 0.2), smooth_samples(256, 0.9)];
    let h = smooth_samples(256, 1.7);
    c.bench_function("reduced_256_modes", |b| {
        b.iter(|| solve_reduced(black_box(&g), &h, C::new(5.0, 1.0), &grid, &normal, &m))
    });
}

fn full(c: &mut Criterion) {
    let m = model();
    let space = half_space(16, 16.0, 1024);
    let lambda = C::new(20.0, 3.0);
    let data = full_data(&space, lambda, &m);
    c.bench_function("full_gamma_zero", |b| b.iter(|| solve_gamma_zero(black_box(&data), lambda, &m)));
    let mg = m.with_gamma(0.1);
    let data = full_data(&space, C::new(100.0, 0.0), &mg);
    c.bench_function("full_gamma_0.1", |b| {
        b.iter(|| solve_general(black_box(&data), C::new(100.0, 0.0), &mg, NeumannOptions::default()))
    });
}

fn scan(c: &mut Criterion) {
    let m = model();
    let sector = Sector::new(m.consts.sigma_w + 0.2, 0.0);
    let grid = ScanGrid::default();
    c.bench_function("scan_l1_40x9x40", |b| b.iter(|| scan_lower_bound(ScanTarget::L1, &sector, &grid, &m)));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = whole, reduced, full, scan
}
criterion_main!(benches);
