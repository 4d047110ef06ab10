use std::sync::Arc;

use korteweg_core::field::HalfSpace;
use korteweg_core::resolvent::contraction_probe;
use korteweg_core::symbols::{FrakSymbols, RootSet};
use korteweg_core::verification::{
    lambda_derivative_family, rademacher_ratio, random_data, rng, BumpShape, RademacherMode,
};
use korteweg_core::{derive_constants, Complex64 as C, HalfGrid, MaterialParams, Model, Sector, TangentialGrid};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = MaterialParams> {
    (0.1f64..5.0, 0.1f64..5.0, 0.1f64..5.0)
        .prop_filter("admissible", |&(mu, nu, kappa)| {
            let eta = ((mu + nu) / (2.0 * kappa)).powi(2) - 1.0 / kappa;
            eta.abs() > 1e-3 && (kappa - mu * nu).abs() > 1e-3
        })
        .prop_map(|(mu, nu, kappa)| MaterialParams::new(mu, nu, kappa))
}

fn vectors(m: usize, len: usize) -> impl Strategy<Value = Vec<Vec<C>>> {
    prop::collection::vec(prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C::new(a, b)), len), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vieta_identities(p in params()) {
        let d = derive_constants(&p).unwrap();
        let sum = (p.mu + p.nu) / p.kappa;
        prop_assert!((d.s1 + d.s2 - sum).norm() <= 1e-14 * sum);
        prop_assert!((d.s1 * d.s2 - 1.0 / p.kappa).norm() <= 1e-14 / p.kappa);
        if d.eta_w >= 0.0 {
            prop_assert_eq!(d.sigma_w, 0.0);
        }
    }

    #[test]
    fn roots_have_positive_real_parts(p in params(), xi in 1e-3f64..1e3, r in 1e-3f64..1e4, frac in -0.99f64..0.99) {
        let m = Model::new(p).unwrap();
        let lambda = C::from_polar(r, frac * (std::f64::consts::PI - m.consts.sigma_w));
        let roots = RootSet::new(xi * xi, lambda, &m).unwrap();
        prop_assert!(roots.omega.re > 0.0 && roots.t1.re > 0.0 && roots.t2.re > 0.0);
        let fr = FrakSymbols::with_roots(xi * xi, lambda, &roots, &m);
        let direct = roots.t2 - roots.t1;
        prop_assert!((fr.t2_minus_t1 - direct).norm() <= 1e-10 * (roots.t1.norm() + roots.t2.norm()));
    }

    #[test]
    fn rademacher_ratio_is_homogeneous_and_permutation_invariant(
        out in vectors(5, 4), inp in vectors(5, 4), s in 0.1f64..10.0, shift in 0usize..5
    ) {
        let base = rademacher_ratio(&out, &inp, RademacherMode::Exact).unwrap();
        let scaled: Vec<Vec<C>> = inp.iter().map(|v| v.iter().map(|c| c * s).collect()).collect();
        let scaled_out: Vec<Vec<C>> = out.iter().map(|v| v.iter().map(|c| c * s).collect()).collect();
        let again = rademacher_ratio(&scaled_out, &scaled, RademacherMode::Exact).unwrap();
        prop_assert!((again - base).abs() <= 1e-12 * base);
        let mut po = out.clone();
        let mut pi = inp.clone();
        po.rotate_left(shift);
        pi.rotate_left(shift);
        let permuted = rademacher_ratio(&po, &pi, RademacherMode::Exact).unwrap();
        prop_assert!((permuted - base).abs() <= 1e-12 * base);
    }

    #[test]
    fn single_pair_ratio_is_an_operator_norm_sample(out in vectors(1, 6), inp in vectors(1, 6)) {
        let norm = |v: &[C]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let r = rademacher_ratio(&out, &inp, RademacherMode::Exact).unwrap();
        prop_assert!((r - norm(&out[0]) / norm(&inp[0])).abs() <= 1e-12 * r.max(1e-300));
    }

    #[test]
    fn lambda_derivative_of_a_linear_map(re in 1.0f64..50.0, im in -20.0f64..20.0, a in -3.0f64..3.0) {
        let sector = Sector::new(0.3, 0.5);
        let lambda = C::new(re, im);
        let field = [C::new(a, 1.0), C::new(-0.5, a)];
        let d = lambda_derivative_family(|z| Ok(field.iter().map(|f| z * f).collect()), lambda, 1e-5, &sector).unwrap();
        for (x, f) in d.iter().zip(&field) {
            prop_assert!((x - lambda * f).norm() <= 1e-10 * (lambda * f).norm().max(1.0));
        }
        let square = |step: f64| lambda_derivative_family(|z| Ok(vec![z * z]), lambda, step, &sector).unwrap()[0];
        let (s5, s6) = (square(1e-5), square(1e-6));
        prop_assert!((s5 - s6).norm() <= 1e-7 * s5.norm());
    }
}

fn space() -> Arc<HalfSpace> {
    let t = TangentialGrid::new(1, 8, 2.0 * std::f64::consts::PI).unwrap();
    HalfSpace::new(HalfGrid::new(t, 8.0, 256).unwrap())
}

#[test]
fn probe_ratios_are_linear_in_the_pressure_coefficient() {
    let sp = space();
    let base = Model::new(MaterialParams::new(1.0, 1.0, 2.0)).unwrap();
    let mut r = rng(12);
    let data = random_data(&sp, BumpShape { center: 4.0, width: 0.4, max_wavenumber: 2 }, &mut r);
    let lambdas = [C::new(1.0, 0.0), C::new(10.0, 5.0)];
    let zero = contraction_probe(&data, &lambdas, &base).unwrap();
    assert!(zero.iter().all(|row| row.ratio == 0.0));
    let one = contraction_probe(&data, &lambdas, &base.with_gamma(0.2)).unwrap();
    let two = contraction_probe(&data, &lambdas, &base.with_gamma(0.4)).unwrap();
    for (a, b) in one.iter().zip(&two) {
        assert!((b.ratio - 2.0 * a.ratio).abs() <= 1e-12 * b.ratio);
    }
}
