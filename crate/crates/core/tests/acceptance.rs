//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and asserts the outcome.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use korteweg_core::field::HalfSpace;
use korteweg_core::grid::BoxGrid;
use korteweg_core::half::{coefficients_closed_form, coefficients_direct, residual_reduced, solve_reduced, ModeSolution};
use korteweg_core::kernel::{div_diff, div_diff_direct, div_diff_quadrature, kernel_m, EPS_SWITCH};
use korteweg_core::resolvent::{
    contraction_probe, residual_full, select_lambda0, solve_gamma_zero, solve_general, solve_general_from,
    FullData, NeumannOptions,
};
use korteweg_core::scan::{
    certify_multiplier, empirical_sigma_star, scan_lower_bound, standard_memberships, CertGrid, ScanGrid, ScanTarget,
};
use korteweg_core::symbols::{lopatinskii, FrakSymbols, RootSet};
use korteweg_core::verification::{
    bump_pair, estimate_rbounds, homogeneous_pair, manufactured_data, random_data, rademacher_average, relative_error,
    rng, BumpShape, FamilyKind, RBoundConfig, RademacherMode,
};
use korteweg_core::whole::{residual_whole, solve_whole, whole_operator, BoxSpace};
use korteweg_core::{Complex64 as C, HalfGrid, MaterialParams, Model, NormalSamples, Sector, TangentialGrid};
use rand::Rng;

fn model(mu: f64, nu: f64, kappa: f64) -> Model {
    Model::new(MaterialParams::new(mu, nu, kappa)).unwrap()
}

/// Three sets with complex roots and two with real roots.
fn parameter_sets() -> Vec<Model> {
    vec![model(1.0, 1.0, 2.0), model(0.5, 1.0, 3.0), model(1.0, 1.0, 3.0), model(2.0, 3.0, 0.5), model(1.0, 5.0, 2.0)]
}

/// Writes straight to stderr so the line survives output capture.
fn report(id: usize, name: &str, pass: bool, detail: String) {
    let line = format!("criterion {id:>2} {name}: {} ({detail})\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} failed: {detail}");
}

fn random_c(r: &mut impl Rng) -> C {
    C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Random point of the open sector with log-uniform modulus.
fn sector_point(r: &mut impl Rng, sector: &Sector, lo: f64, hi: f64) -> C {
    let modulus = (lo.ln() + (hi.ln() - lo.ln()) * r.gen::<f64>()).exp();
    let half = sector.half_angle() * 0.999;
    C::from_polar(modulus.max(sector.delta * 1.001), r.gen_range(-half..half))
}

fn seconds(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[test]
fn criterion_01_whole_space_exactness() {
    let start = Instant::now();
    let space = BoxSpace::new(BoxGrid::cube(2, 256, 2.0 * PI).unwrap());
    let m = model(1.0, 1.0, 2.0);
    let mut r = rng(101);
    let (mut worst_err, mut worst_res) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let lambda = sector_point(&mut r, &Sector::new(m.consts.sigma_w + 0.2, 0.1), 0.1, 1e3);
        let len = space.grid.len();
        let mut band = |_: usize| -> Vec<C> {
            (0..len).map(|f| if space.xi_sq(f) <= 100.0 { random_c(&mut r) } else { C::default() }).collect()
        };
        let rho_hat = band(0);
        let u_hat = vec![band(1), band(2)];
        let (d_hat, f_hat) = whole_operator(&space, &rho_hat, &u_hat, lambda, &m.params);
        let d = space.samples(&d_hat);
        let f: Vec<Vec<C>> = f_hat.iter().map(|c| space.samples(c)).collect();
        let sol = solve_whole(&space, &d, &f, lambda, &m).unwrap();
        let exact_rho = space.samples(&rho_hat);
        let exact_u: Vec<Vec<C>> = u_hat.iter().map(|c| space.samples(c)).collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in std::iter::once((&sol.rho, &exact_rho)).chain(sol.u.iter().zip(&exact_u)) {
            num += a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>();
            den += b.iter().map(|y| y.norm_sqr()).sum::<f64>();
        }
        worst_err = worst_err.max((num / den).sqrt());
        worst_res = worst_res.max(residual_whole(&space, &sol, &d, &f, lambda, &m.params).max_relative);
    }
    let t = seconds(start.elapsed());
    report(
        1,
        "whole-space multiplier exactness",
        worst_err <= 1e-10 && worst_res <= 1e-10 && t <= 2.0,
        format!("max error {worst_err:.2e}, max residual {worst_res:.2e}, {t:.2} s"),
    );
}

fn amplitude_gap(a: &ModeSolution, b: &ModeSolution) -> f64 {
    let flat = |s: &ModeSolution| -> Vec<C> {
        let mut v = s.alpha.clone();
        v.extend(&s.beta);
        v.extend(&s.gamma);
        v.extend(s.rho_amp);
        v
    };
    let (x, y) = (flat(a), flat(b));
    let scale = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    x.iter().zip(&y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max) / scale
}

#[test]
fn criterion_02_half_space_representation() {
    let start = Instant::now();
    let m = model(1.0, 1.0, 2.0);
    let grid = TangentialGrid::new(1, 256, 20.0 * PI).unwrap();
    let normal = NormalSamples::clustered(10.0, 64);
    let sector = Sector::new(m.consts.sigma_w + 0.2, 0.1);
    let mut r = rng(202);
    let mut worst_res = 0.0f64;
    for _ in 0..20 {
        let lambda = sector_point(&mut r, &sector, 0.1, 1e3);
        let g: Vec<Vec<C>> = (0..2).map(|_| (0..256).map(|_| random_c(&mut r)).collect()).collect();
        let h: Vec<C> = (0..256).map(|_| random_c(&mut r)).collect();
        let sol = solve_reduced(&g, &h, lambda, &grid, &normal, &m).unwrap();
        let res = residual_reduced(&sol.modal, &g, &h, lambda, &normal, &m);
        worst_res = worst_res.max(res.max_relative);
    }
    let mut worst_gap = 0.0f64;
    for _ in 0..10_000 {
        let xi = [10f64.powf(r.gen_range(-3.0..3.0)) * if r.gen::<bool>() { 1.0 } else { -1.0 }];
        let lambda = sector_point(&mut r, &sector, 1e-3, 1e6);
        let g = [random_c(&mut r), random_c(&mut r)];
        let h = random_c(&mut r);
        let a = coefficients_direct(&xi, lambda, &g, h, &m).unwrap();
        let b = coefficients_closed_form(&xi, lambda, &g, h, &m).unwrap();
        worst_gap = worst_gap.max(amplitude_gap(&a, &b));
    }
    let t = seconds(start.elapsed());
    report(
        2,
        "half-space representation",
        worst_res <= 1e-10 && worst_gap <= 1e-12 && t <= 5.0,
        format!("max residual {worst_res:.2e}, direct vs closed form {worst_gap:.2e}, {t:.2} s"),
    );
}

#[test]
fn criterion_03_determinant_factorization() {
    let mut r = rng(303);
    let mut worst = [0.0f64; 2];
    for m in parameter_sets() {
        let sector = Sector::new(m.consts.sigma_w + 0.05, 0.0);
        for _ in 0..10_000 {
            let xi = [10f64.powf(r.gen_range(-3.0..3.0))];
            let lambda = sector_point(&mut r, &sector, 1e-3, 1e6);
            let k2 = xi[0] * xi[0];
            let roots = RootSet::new(k2, lambda, &m).unwrap();
            let fr = FrakSymbols::with_roots(k2, lambda, &roots, &m);
            let lp = lopatinskii(&xi, lambda, &m).unwrap();
            for j in 0..2 {
                let t = roots.t(j + 1);
                let factored = lambda * fr.t2_minus_t1 * fr.l[j] / (t * (t + roots.omega));
                worst[j] = worst[j].max((factored - lp.det_direct).norm() / lp.det_direct.norm());
            }
        }
    }
    report(
        3,
        "determinant factorization",
        worst.iter().all(|w| *w <= 1e-12),
        format!("max relative gap j=1 {:.2e}, j=2 {:.2e}", worst[0], worst[1]),
    );
}

fn refinement_change(target: ScanTarget, sector: &Sector, m: &Model) -> (f64, f64) {
    let grid = ScanGrid::default();
    let coarse = scan_lower_bound(target, sector, &grid, m).unwrap().constant;
    let fine = scan_lower_bound(target, sector, &grid.refined(), m).unwrap().constant;
    (coarse, (coarse - fine).abs() / coarse)
}

#[test]
fn criterion_04_boundary_symbol_nondegeneracy() {
    let mut pass = true;
    let mut detail = Vec::new();
    for m in parameter_sets() {
        let sector = Sector::new(m.consts.sigma_w + 0.2, 0.0);
        for target in [ScanTarget::L1, ScanTarget::L2] {
            let (c, change) = refinement_change(target, &sector, &m);
            pass &= c > 0.0 && change <= 0.10;
            detail.push(format!("{} {c:.2e}/{:.1}%", target.name(), 100.0 * change));
        }
    }
    report(4, "boundary-symbol lower bound", pass, detail.join(", "));
}

#[test]
fn criterion_05_whole_space_symbol_lower_bound() {
    let mut pass = true;
    let mut detail = Vec::new();
    for m in parameter_sets() {
        for sigma in [m.consts.sigma_w + 0.1, PI / 3.0] {
            let (c, change) = refinement_change(ScanTarget::P, &Sector::new(sigma, 0.0), &m);
            pass &= c > 0.0 && change <= 0.10;
            detail.push(format!("{c:.2e}/{:.1}%", 100.0 * change));
        }
    }
    report(5, "whole-space symbol lower bound", pass, detail.join(", "));
}

#[test]
fn criterion_06_kernel_stability() {
    let mut r = rng(606);
    let mut dual = 0.0f64;
    for _ in 0..2000 {
        let a = C::from_polar(10f64.powf(r.gen_range(-1.0..1.0)), r.gen_range(-1.2..1.2));
        let rel = EPS_SWITCH * 10f64.powf(r.gen_range(0.0..1.0));
        let dir = C::from_polar(1.0, r.gen_range(-PI..PI));
        // |b - a| = rel (|a| + |b|) solved for |b - a| along `dir`, to first order.
        let b = a + dir * rel * 2.0 * a.norm() / (1.0 - rel);
        let x = r.gen_range(0.0..5.0);
        let (p, q) = (div_diff_direct(a, b, x), div_diff_quadrature(a, b, x));
        dual = dual.max((p - q).norm() / q.norm().max(1e-300));
    }
    // Near coincidence the kernel is -x e^{-t1 x} plus a correction linear in the gap.
    let mut limit = 0.0f64;
    let mut first_order = 0.0f64;
    for _ in 0..200 {
        let t1 = C::from_polar(10f64.powf(r.gen_range(-1.0..1.0)), r.gen_range(-1.2..1.2));
        let delta = C::from_polar(1e-6, r.gen_range(-PI..PI));
        let x = r.gen_range(0.0..5.0);
        let k = div_diff(t1, t1 + delta, x);
        let lim = -x * (-t1 * x).exp();
        limit = limit.max((k - lim).norm());
        first_order = first_order.max((k - lim * (1.0 - 0.5 * delta * x)).norm());
    }
    // The assembled kernel agrees with the bare divided difference at a generic point.
    let m = model(1.0, 1.0, 2.0);
    let roots = RootSet::new(0.49, C::new(2.0, 1.0), &m).unwrap();
    let fr = FrakSymbols::with_roots(0.49, C::new(2.0, 1.0), &roots, &m);
    let kernel = (kernel_m(0, 1.3, &roots, &fr) - div_diff(roots.t1, roots.t2, 1.3)).norm();
    report(
        6,
        "kernel stability",
        dual <= 1e-10 && first_order <= 1e-9 && kernel == 0.0,
        format!(
            "dual-path gap {dual:.2e}, coincidence gap {first_order:.2e} after the linear term ({limit:.2e} before)"
        ),
    );
}

fn half_space(points: usize, depth: f64, n_box: usize) -> Arc<HalfSpace> {
    let t = TangentialGrid::new(1, points, 2.0 * PI).unwrap();
    HalfSpace::new(HalfGrid::new(t, depth, n_box).unwrap())
}

#[test]
fn criterion_07_full_pipeline() {
    let space = half_space(16, 16.0, 1024);
    let mut worst = 0.0f64;
    for (m, lambda) in [(model(1.0, 1.0, 2.0), C::new(20.0, 3.0)), (model(2.0, 3.0, 0.5), C::new(15.0, -8.0))] {
        let mut r = rng(707);
        let mut exact = bump_pair(&space, BumpShape::default(), &mut r);
        let hom = homogeneous_pair(&space, &[0, 1, 15], lambda, &m, &mut r).unwrap();
        exact.rho.modal.add_assign(&hom.rho.modal, C::new(1.0, 0.0));
        for (a, b) in exact.u.iter_mut().zip(&hom.u) {
            a.modal.add_assign(&b.modal, C::new(1.0, 0.0));
        }
        let data = manufactured_data(&exact, lambda, &m.params);
        let sol = solve_gamma_zero(&data, lambda, &m).unwrap();
        worst = worst.max(relative_error(&sol, &exact));
    }
    let small = half_space(8, 16.0, 512);
    let m = model(1.0, 1.0, 2.0);
    let lambda = C::new(10.0, 2.0);
    let zero = solve_gamma_zero(&FullData::zero(&small), lambda, &m).unwrap();
    let norm = |s: &korteweg_core::resolvent::FullSolution| {
        s.samples().iter().map(|c| small.norm(c).powi(2)).sum::<f64>().sqrt()
    };
    let zero_norm = norm(&zero);
    let mut r = rng(708);
    let start = random_data(&small, BumpShape::default(), &mut r);
    let (from_random, _) =
        solve_general_from(&FullData::zero(&small), start, lambda, &m.with_gamma(0.1), NeumannOptions::default())
            .unwrap();
    let random_norm = norm(&from_random);
    report(
        7,
        "full pipeline",
        worst <= 1e-8 && zero_norm <= 1e-10 && random_norm <= 1e-10,
        format!("recovery {worst:.2e}, zero data {zero_norm:.2e}, zero data from a random iterate {random_norm:.2e}"),
    );
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|a, b| v[*a].total_cmp(&v[*b]));
        let mut out = vec![0.0; v.len()];
        for (rnk, i) in idx.into_iter().enumerate() {
            out[i] = rnk as f64;
        }
        out
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn criterion_08_pressure_perturbation() {
    let space = half_space(8, 16.0, 512);
    let base = model(1.0, 1.0, 2.0);
    let mut pass = true;
    let mut detail = Vec::new();
    for gamma in [0.05, 0.1, 0.5] {
        let m = base.with_gamma(gamma);
        let mut r = rng(808);
        let exact = bump_pair(&space, BumpShape::default(), &mut r);
        let probe_data = manufactured_data(&exact, C::new(1.0, 0.0), &m.params);
        let sel = select_lambda0(&probe_data, 0.0, &m, 0.5, 0.45, 3, 30).unwrap();
        let data = manufactured_data(&exact, sel.lambda, &m.params);
        let (sol, state) = solve_general(&data, sel.lambda, &m, NeumannOptions::default()).unwrap();
        let res = residual_full(&sol, &data, sel.lambda, &m.params).max_relative;
        let max_ratio = state.ratios.iter().copied().fold(0.0, f64::max);
        pass &= max_ratio <= 0.5 && res <= 1e-8;
        detail.push(format!("gamma {gamma}: lambda0 {}, max ratio {max_ratio:.3}, residual {res:.1e}", sel.lambda0));
    }
    let fine = half_space(8, 4.0, 4096);
    let m = base.with_gamma(0.1);
    let mut r = rng(809);
    let data = random_data(&fine, BumpShape { center: 2.0, width: 0.35, max_wavenumber: 2 }, &mut r);
    let mods = [1.0, 10.0, 1e2, 1e3, 1e4];
    let lambdas: Vec<C> = mods.iter().map(|&v| C::new(v, 0.0)).collect();
    let rows = contraction_probe(&data, &lambdas, &m).unwrap();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let rho = spearman(&mods, &ratios);
    pass &= rho <= -0.9;
    detail.push(format!("probe Spearman {rho:.2}"));
    report(8, "pressure perturbation", pass, detail.join("; "));
}

#[test]
fn criterion_09_rbound_estimator() {
    let start = Instant::now();
    let mut r = rng(909);
    let orth: Vec<Vec<C>> = (0..6)
        .map(|i| {
            let mut v = vec![C::default(); 6];
            v[i] = random_c(&mut r);
            v
        })
        .collect();
    let closed = orth.iter().map(|v| v[0..].iter().map(|c| c.norm_sqr()).sum::<f64>()).sum::<f64>().sqrt();
    let exact = rademacher_average(&orth, RademacherMode::Exact).unwrap();
    let orth_gap = (exact - closed).abs() / closed;
    let dense: Vec<Vec<C>> = (0..6).map(|_| (0..12).map(|_| random_c(&mut r)).collect()).collect();
    let e = rademacher_average(&dense, RademacherMode::Exact).unwrap();
    let mc = rademacher_average(&dense, RademacherMode::MonteCarlo { draws: 10_000, seed: 9 }).unwrap();
    let mc_gap = (mc - e).abs() / e;

    let m = model(1.0, 1.0, 2.0);
    let config = RBoundConfig { sector: Sector::new(1.2, 0.5), trials: 400, m_max: 8, ..RBoundConfig::default() };
    let wanted = [(FamilyKind::Density, 0), (FamilyKind::Velocity, 0), (FamilyKind::Density, 1), (FamilyKind::Velocity, 1)];
    let estimates = estimate_rbounds(&config, &m, &wanted).unwrap();
    let mut pass = orth_gap <= 1e-12 && mc_gap <= 0.02;
    let mut detail = vec![format!("orthogonality {orth_gap:.1e}, Monte Carlo {:.2}%", 100.0 * mc_gap)];
    for est in &estimates {
        let half = est.prefix_bound(200);
        let full = est.estimated_bound;
        let change = (full - half) / half;
        pass &= full.is_finite() && change <= 0.25;
        detail.push(format!("{} {half:.3} -> {full:.3}", est.family_id));
    }
    let t = seconds(start.elapsed());
    pass &= t <= 60.0;
    detail.push(format!("{t:.1} s"));
    report(9, "R-bound estimator", pass, detail.join(", "));
}

#[test]
fn criterion_10_multiplier_certificates() {
    let grid = CertGrid::default();
    let mut failed = Vec::new();
    let mut worst = 0.0f64;
    let mut count = 0;
    for m in parameter_sets() {
        let star = empirical_sigma_star(&m, 1e-8).sigma_star;
        let sector = Sector::new(star + 0.1, 0.0);
        for member in standard_memberships(&m) {
            let cert = certify_multiplier(&member.id, &member.symbol, member.order, member.kind, &sector, &grid).unwrap();
            count += 1;
            worst = worst.max(cert.estimated_constant);
            if !cert.passed {
                failed.push(format!("{}@({},{},{})", cert.symbol_id, m.params.mu, m.params.nu, m.params.kappa));
            }
        }
    }
    report(
        10,
        "multiplier certificates",
        failed.is_empty(),
        format!("{count} certificates, largest constant {worst:.2e}, failures {failed:?}"),
    );
}
