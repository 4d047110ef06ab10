//! Lower-bound scans of symbols over sectors, the empirical non-degeneracy angle, and
//! multiplier certificates by finite differences.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, Sector};
use crate::symbols::{lopatinskii_with, whole_space_symbol_p, FrakSymbols, RootSet};

type C = Complex64;

/// Quantities whose scaled modulus is bounded below on a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanTarget {
    P,
    L1,
    L2,
    ReOmega,
    ReT1,
    ReT2,
    Det,
}

impl ScanTarget {
    pub const ALL: [ScanTarget; 7] = [
        ScanTarget::P,
        ScanTarget::L1,
        ScanTarget::L2,
        ScanTarget::ReOmega,
        ScanTarget::ReT1,
        ScanTarget::ReT2,
        ScanTarget::Det,
    ];

    /// Homogeneity degree in `(|lambda|^{1/2}, |xi|)`.
    pub fn power(self) -> i32 {
        match self {
            ScanTarget::P => 4,
            ScanTarget::L1 | ScanTarget::L2 | ScanTarget::Det => 6,
            ScanTarget::ReOmega | ScanTarget::ReT1 | ScanTarget::ReT2 => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScanTarget::P => "p",
            ScanTarget::L1 => "l1",
            ScanTarget::L2 => "l2",
            ScanTarget::ReOmega => "re_omega",
            ScanTarget::ReT1 => "re_t1",
            ScanTarget::ReT2 => "re_t2",
            ScanTarget::Det => "det",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }

    /// Unscaled magnitude at `(|xi|^2, lambda)`. The determinant is divided by
    /// `lambda (t2 - t1) / (t1 (t1 + omega))`, which leaves a degree-6 quantity.
    pub fn magnitude(self, k2: f64, lambda: C, model: &Model) -> Result<f64> {
        if self == ScanTarget::P {
            return Ok(whole_space_symbol_p(k2, lambda, &model.params).norm());
        }
        let r = RootSet::new(k2, lambda, model)?;
        Ok(match self {
            ScanTarget::ReOmega => r.omega.re,
            ScanTarget::ReT1 => r.t1.re,
            ScanTarget::ReT2 => r.t2.re,
            _ => {
                let fr = FrakSymbols::with_roots(k2, lambda, &r, model);
                match self {
                    ScanTarget::L1 => fr.l[0].norm(),
                    ScanTarget::L2 => fr.l[1].norm(),
                    _ => {
                        let lp = lopatinskii_with(k2, lambda, &r, &fr, model);
                        (lp.det_direct * r.t1 * (r.t1 + r.omega) / (lambda * fr.t2_minus_t1)).norm()
                    }
                }
            }
        })
    }
}

/// Log-spaced `|lambda|` and `|xi|` with uniformly spaced arguments across the sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    pub n_lambda: usize,
    pub n_angle: usize,
    pub n_xi: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub xi_min: f64,
    pub xi_max: f64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self { n_lambda: 40, n_angle: 9, n_xi: 40, lambda_min: 1e-3, lambda_max: 1e6, xi_min: 1e-3, xi_max: 1e3 }
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

impl ScanGrid {
    /// Grid with every spacing halved; contains all points of `self`.
    pub fn refined(&self) -> Self {
        Self {
            n_lambda: 2 * self.n_lambda - 1,
            n_angle: 2 * self.n_angle - 1,
            n_xi: 2 * self.n_xi - 1,
            ..*self
        }
    }

    pub fn len(&self) -> usize {
        self.n_lambda * self.n_angle * self.n_xi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lambdas(&self, half_angle: f64) -> Vec<C> {
        let mods = log_space(self.lambda_min.max(f64::MIN_POSITIVE), self.lambda_max, self.n_lambda);
        let args: Vec<f64> = if self.n_angle == 1 {
            vec![0.0]
        } else {
            (0..self.n_angle)
                .map(|i| -half_angle + 2.0 * half_angle * i as f64 / (self.n_angle - 1) as f64)
                .collect()
        };
        mods.iter().flat_map(|&r| args.iter().map(move |&a| C::from_polar(r, a))).collect()
    }

    pub fn xis(&self) -> Vec<f64> {
        log_space(self.xi_min, self.xi_max, self.n_xi)
    }
}

/// Infimum of the scaled target over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub target: ScanTarget,
    pub sigma: f64,
    pub delta: f64,
    pub power: i32,
    pub constant: f64,
    pub argmin_xi: f64,
    pub argmin_lambda: [f64; 2],
    pub grid: ScanGrid,
}

/// `min |target| / (|lambda|^{1/2} + |xi|)^power` over the grid in the closed sector.
pub fn scan_lower_bound(target: ScanTarget, sector: &Sector, grid: &ScanGrid, model: &Model) -> Result<ScanResult> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let lambdas = grid.lambdas(sector.half_angle());
    let xis = grid.xis();
    let power = target.power();
    let best = lambdas
        .par_iter()
        .filter(|l| l.norm() >= sector.delta)
        .map(|&lambda| {
            let mut best = (f64::INFINITY, 0.0, lambda);
            for &xi in &xis {
                let scale = (lambda.norm().sqrt() + xi).powi(power);
                let v = target.magnitude(xi * xi, lambda, model)? / scale;
                if v < best.0 {
                    best = (v, xi, lambda);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(None::<(f64, f64, C)>, |acc, b| match acc {
            Some(a) if a.0 <= b.0 => Some(a),
            _ => Some(b),
        })
        .ok_or(Error::EmptyGrid)?;
    Ok(ScanResult {
        target,
        sigma: sector.sigma,
        delta: sector.delta,
        power,
        constant: best.0,
        argmin_xi: best.1,
        argmin_lambda: [best.2.re, best.2.im],
        grid: *grid,
    })
}

/// Scaled target as a function of the shape `tau = |lambda|^{1/2} / (|lambda|^{1/2} + |xi|)`
/// and `theta = arg lambda`; homogeneity makes this the whole picture.
fn shape_value(target: ScanTarget, tau: f64, theta: f64, model: &Model) -> f64 {
    let xi = 1.0 - tau;
    let lambda = C::from_polar(tau * tau, theta);
    target.magnitude(xi * xi, lambda, model).unwrap_or(0.0)
}

/// Smallest scaled value of `target` over the sector of half-angle `pi - sigma`, from a
/// coarse shape grid followed by pattern search around the smallest samples.
pub fn sector_minimum(target: ScanTarget, sigma: f64, model: &Model) -> f64 {
    let half = PI - sigma;
    let (nt, na) = (48usize, 97usize);
    let mut samples: Vec<(f64, f64, f64)> = (1..=nt)
        .flat_map(|i| {
            let tau = i as f64 / nt as f64;
            (0..na).map(move |k| (tau, -half + 2.0 * half * k as f64 / (na - 1) as f64))
        })
        .map(|(tau, th)| (shape_value(target, tau, th, model), tau, th))
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples
        .iter()
        .take(6)
        .map(|&(v, tau, th)| {
            let (mut v, mut tau, mut th) = (v, tau, th);
            let (mut st, mut sa) = (0.5 / nt as f64, half / na as f64);
            while st > 1e-12 {
                let mut moved = false;
                for (dt, da) in [(st, 0.0), (-st, 0.0), (0.0, sa), (0.0, -sa)] {
                    let (t2, a2) = ((tau + dt).clamp(1e-9, 1.0), (th + da).clamp(-half, half));
                    let v2 = shape_value(target, t2, a2, model);
                    if v2 < v {
                        (v, tau, th) = (v2, t2, a2);
                        moved = true;
                    }
                }
                if !moved {
                    st *= 0.5;
                    sa *= 0.5;
                }
            }
            v
        })
        .fold(f64::INFINITY, f64::min)
}

/// Empirical non-degeneracy angle: the smallest `sigma >= sigma_w` for which both
/// boundary symbols stay above `threshold` times the sixth power of the scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaStar {
    pub sigma_w: f64,
    pub sigma_star: f64,
    pub threshold: f64,
    /// Scaled minimum of each boundary symbol at `sigma_star`.
    pub minima: [f64; 2],
}

pub fn empirical_sigma_star(model: &Model, threshold: f64) -> SigmaStar {
    let sw = model.consts.sigma_w;
    let ok = |s: f64| {
        [ScanTarget::L1, ScanTarget::L2].iter().all(|&t| sector_minimum(t, s, model) >= threshold)
    };
    let start = sw + 1e-6;
    let star = if ok(start) {
        sw
    } else {
        let (mut lo, mut hi) = (start, PI / 2.0);
        while hi - lo > 1e-4 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let at = star.max(start);
    SigmaStar {
        sigma_w: sw,
        sigma_star: star,
        threshold,
        minima: [sector_minimum(ScanTarget::L1, at, model), sector_minimum(ScanTarget::L2, at, model)],
    }
}

/// Whether the bound carries `(|lambda|^{1/2}+|xi'|)^{-|alpha|}` or `|xi'|^{-|alpha|}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MultiplierType {
    One,
    Two,
}

/// Points at which multipliers are certified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertGrid {
    pub scan: ScanGrid,
    /// Tangential dimension `N - 1`.
    pub dim: usize,
    pub max_alpha: usize,
}

impl Default for CertGrid {
    fn default() -> Self {
        Self {
            scan: ScanGrid { n_lambda: 10, n_angle: 5, n_xi: 10, ..ScanGrid::default() },
            dim: 1,
            max_alpha: 2,
        }
    }
}

/// Outcome of a multiplier certification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub symbol_id: String,
    pub claimed_order: f64,
    pub claimed_type: MultiplierType,
    pub sector: Sector,
    pub grid: CertGrid,
    pub max_alpha: usize,
    /// Largest bound ratio over the grid, all `|alpha| <= max_alpha` and `n in {0, 1}`.
    pub estimated_constant: f64,
    /// The same maximum restricted to points with scale inside the middle decades.
    pub inner_constant: f64,
    pub passed: bool,
}

const FD_RELATIVE: f64 = 1e-4;
const LAMBDA_STEP: f64 = 1e-5;

/// Nested central differences in `xi'` over `axes`, Richardson-extrapolated once per level.
fn xi_derivative<F>(m: &F, xi: &[f64], lambda: C, axes: &[usize], h: f64) -> C
where
    F: Fn(&[f64], C) -> C,
{
    let Some((&a, rest)) = axes.split_first() else {
        return m(xi, lambda);
    };
    let central = |step: f64| {
        let mut p = xi.to_vec();
        let mut q = xi.to_vec();
        p[a] += step;
        q[a] -= step;
        (xi_derivative(m, &p, lambda, rest, h) - xi_derivative(m, &q, lambda, rest, h)) / (2.0 * step)
    };
    (4.0 * central(h / 2.0) - central(h)) / 3.0
}

/// `lambda d/dlambda` by a central difference along the ray, Richardson-extrapolated once.
fn lambda_derivative<F>(m: &F, xi: &[f64], lambda: C, rel: f64) -> C
where
    F: Fn(&[f64], C) -> C,
{
    let central = |e: f64| (m(xi, lambda * (1.0 + e)) - m(xi, lambda * (1.0 - e))) / (2.0 * e);
    (4.0 * central(rel / 2.0) - central(rel)) / 3.0
}

fn alphas(dim: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut last = vec![vec![]];
    for _ in 0..max {
        let next: Vec<Vec<usize>> = last
            .iter()
            .flat_map(|p: &Vec<usize>| {
                let from = p.last().copied().unwrap_or(0);
                (from..dim).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
        out.extend(next.iter().cloned());
        last = next;
    }
    out
}

/// Estimates `sup |d^alpha (lambda d/dlambda)^n m| / bound` on the grid.
pub fn certify_multiplier<F>(
    id: &str,
    m: F,
    order: f64,
    kind: MultiplierType,
    sector: &Sector,
    grid: &CertGrid,
) -> Result<Certificate>
where
    F: Fn(&[f64], C) -> C + Sync,
{
    if grid.scan.is_empty() || grid.dim == 0 {
        return Err(Error::EmptyGrid);
    }
    let lambdas: Vec<C> =
        grid.scan.lambdas(sector.half_angle()).into_iter().filter(|l| l.norm() > sector.delta).collect();
    let dirs: Vec<Vec<f64>> = directions(grid.dim);
    let alphas = alphas(grid.dim, grid.max_alpha);
    let xis = grid.scan.xis();
    let inner = |scale: f64| {
        let lo = (grid.scan.lambda_min.sqrt() + grid.scan.xi_min) * 10.0;
        let hi = (grid.scan.lambda_max.sqrt() + grid.scan.xi_max) / 10.0;
        scale >= lo && scale <= hi
    };
    let results: Vec<(f64, f64)> = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut all = 0.0f64;
            let mut mid = 0.0f64;
            for &r in &xis {
                for d in &dirs {
                    let xi: Vec<f64> = d.iter().map(|v| v * r).collect();
                    let scale = lambda.norm().sqrt() + r;
                    let h = FD_RELATIVE * r.max(scale * 1e-3);
                    if h < 1e3 * f64::EPSILON * r {
                        return Err(Error::DerivativeStepUnderflow(r));
                    }
                    for alpha in &alphas {
                        let k = alpha.len() as i32;
                        let bound = match kind {
                            MultiplierType::One => scale.powf(order - k as f64),
                            MultiplierType::Two => scale.powf(order) * r.powi(-k),
                        };
                        let v0 = xi_derivative(&m, &xi, lambda, alpha, h).norm();
                        let v1 = xi_derivative(
                            &|x: &[f64], l: C| lambda_derivative(&m, x, l, LAMBDA_STEP),
                            &xi,
                            lambda,
                            alpha,
                            h,
                        )
                        .norm();
                        let ratio = v0.max(v1) / bound;
                        let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
                        all = all.max(ratio);
                        if inner(scale) {
                            mid = mid.max(ratio);
                        }
                    }
                }
            }
            Ok((all, mid))
        })
        .collect::<Result<_>>()?;
    let estimated_constant = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let inner_constant = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let passed = estimated_constant.is_finite() && estimated_constant <= 2.0 * inner_constant.max(1e-300);
    Ok(Certificate {
        symbol_id: id.to_string(),
        claimed_order: order,
        claimed_type: kind,
        sector: *sector,
        grid: *grid,
        max_alpha: grid.max_alpha,
        estimated_constant,
        inner_constant,
        passed,
    })
}

/// Unit directions used for `xi'`: both signs of each axis plus one diagonal.
fn directions(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for a in 0..dim {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; dim];
            v[a] = s;
            out.push(v);
        }
    }
    if dim > 1 {
        let c = 1.0 / (dim as f64).sqrt();
        out.push(vec![c; dim]);
    }
    out
}

/// Symbol evaluated at `(xi', lambda)`.
pub type Symbol = Box<dyn Fn(&[f64], C) -> C + Sync + Send>;

/// A named symbol with its claimed multiplier class.
pub struct Membership {
    pub id: String,
    pub order: f64,
    pub kind: MultiplierType,
    pub symbol: Symbol,
}

fn k2(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum()
}

/// The memberships claimed for the elementary and boundary symbols.
pub fn standard_memberships(model: &Model) -> Vec<Membership> {
    let m = *model;
    let mut out: Vec<Membership> = Vec::new();
    let mut add = |id: String, order: f64, kind: MultiplierType, f: Symbol| {
        out.push(Membership { id, order, kind, symbol: f });
    };
    let roots = move |xi: &[f64], l: C| RootSet::new(k2(xi), l, &m).expect("admissible point");
    let frak = move |xi: &[f64], l: C| FrakSymbols::with_roots(k2(xi), l, &roots(xi, l), &m);
    add("xi_1".into(), 1.0, MultiplierType::One, Box::new(|xi, _| C::new(xi[0], 0.0)));
    add("sqrt_lambda".into(), 1.0, MultiplierType::One, Box::new(|_, l| l.sqrt()));
    add("xi_sq".into(), 2.0, MultiplierType::One, Box::new(|xi, _| C::new(k2(xi), 0.0)));
    add("lambda".into(), 2.0, MultiplierType::One, Box::new(|_, l| l));
    add("xi_1_over_abs_xi".into(), 0.0, MultiplierType::Two, Box::new(|xi, _| C::new(xi[0] / k2(xi).sqrt(), 0.0)));
    for s in [-2i32, -1, 1] {
        add(format!("omega^{s}"), s as f64, MultiplierType::One, Box::new(move |xi, l| roots(xi, l).omega.powi(s)));
    }
    for j in 0..2 {
        let n = j + 1;
        add(format!("t{n}"), 1.0, MultiplierType::One, Box::new(move |xi, l| roots(xi, l).t(n)));
        add(
            format!("t{n}+omega"),
            1.0,
            MultiplierType::One,
            Box::new(move |xi, l| {
                let r = roots(xi, l);
                r.t(n) + r.omega
            }),
        );
        for e in [-2.0, -1.0, -0.5, 0.5, 2.0] {
            add(format!("t{n}^{e}"), e, MultiplierType::One, Box::new(move |xi, l| roots(xi, l).t(n).powf(e)));
            add(
                format!("(t{n}+omega)^{e}"),
                e,
                MultiplierType::One,
                Box::new(move |xi, l| {
                    let r = roots(xi, l);
                    (r.t(n) + r.omega).powf(e)
                }),
            );
        }
        add(format!("m{n}"), 3.0, MultiplierType::One, Box::new(move |xi, l| frak(xi, l).m[j]));
        add(format!("p{n}"), 1.0, MultiplierType::One, Box::new(move |xi, l| frak(xi, l).p[j]));
        add(format!("q{n}"), 1.0, MultiplierType::One, Box::new(move |xi, l| frak(xi, l).q[j]));
        add(format!("r{n}"), 0.0, MultiplierType::One, Box::new(move |xi, l| frak(xi, l).r[j]));
        add(format!("l{n}"), 6.0, MultiplierType::One, Box::new(move |xi, l| frak(xi, l).l[j]));
        add(format!("l{n}^-1"), -6.0, MultiplierType::One, Box::new(move |xi, l| frak(xi, l).l[j].inv()));
    }
    add("a".into(), 1.0, MultiplierType::One, Box::new(move |xi, l| frak(xi, l).a));
    add("b".into(), 1.0, MultiplierType::One, Box::new(move |xi, l| frak(xi, l).b));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MaterialParams;

    fn model(mu: f64, nu: f64, kappa: f64) -> Model {
        Model::new(MaterialParams::new(mu, nu, kappa)).unwrap()
    }

    fn small() -> CertGrid {
        CertGrid { scan: ScanGrid { n_lambda: 6, n_angle: 3, n_xi: 6, ..ScanGrid::default() }, dim: 1, max_alpha: 2 }
    }

    #[test]
    fn constant_symbol_has_unit_constant() {
        let s = Sector::new(0.5, 0.0);
        let c = certify_multiplier("one", |_, _| C::new(1.0, 0.0), 0.0, MultiplierType::One, &s, &small()).unwrap();
        assert!((c.estimated_constant - 1.0).abs() < 1e-6, "{}", c.estimated_constant);
        assert!(c.passed);
    }

    #[test]
    fn wrong_order_is_rejected() {
        let s = Sector::new(0.5, 0.0);
        let good = certify_multiplier("xi_sq", |x, _| C::new(x[0] * x[0], 0.0), 2.0, MultiplierType::One, &s, &small())
            .unwrap();
        let bad = certify_multiplier("xi_sq", |x, _| C::new(x[0] * x[0], 0.0), 1.0, MultiplierType::One, &s, &small())
            .unwrap();
        assert!(good.passed);
        assert!(!bad.passed);
        assert!(bad.estimated_constant > 100.0 * good.estimated_constant);
    }

    #[test]
    fn p_scan_is_positive() {
        let m = model(1.0, 1.0, 2.0);
        let r = scan_lower_bound(ScanTarget::P, &Sector::new(PI / 3.0, 0.0), &ScanGrid { n_lambda: 10, n_angle: 5, n_xi: 10, ..ScanGrid::default() }, &m)
            .unwrap();
        assert!(r.constant > 0.0);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let g = ScanGrid { n_lambda: 0, ..ScanGrid::default() };
        let m = model(1.0, 1.0, 2.0);
        assert_eq!(scan_lower_bound(ScanTarget::P, &Sector::new(1.0, 0.0), &g, &m).unwrap_err(), Error::EmptyGrid);
    }

    #[test]
    fn sigma_star_locates_the_boundary_symbol_zero() {
        let s = empirical_sigma_star(&model(1.0, 2.0, 1.0), 1e-8);
        assert!((s.sigma_star - 0.193).abs() < 0.01, "{}", s.sigma_star);
        let s = empirical_sigma_star(&model(1.0, 1.0, 2.0), 1e-8);
        assert_eq!(s.sigma_star, s.sigma_w);
    }
}
