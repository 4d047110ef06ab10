//! Reduced half-space problem: boundary data `(g, h)`, no interior forcing.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{NormalSamples, TangentialGrid};
use crate::modal::{sample_modal, ModalField, Profile};
use crate::model::Model;
use crate::ops::{mass_row, momentum_row, neumann_row, stress_row};
use crate::report::{row_from, ResidualReport};
use crate::spectral::Transform;
use crate::symbols::{lopatinskii_with, FrakSymbols, Lopatinskii, RootSet};

type C = Complex64;

const SINGULAR_TOL: f64 = 1e-13;

/// Exponential representation of one tangential mode:
/// `u_J = alpha_J e^{-omega x} + beta_J (e^{-t1 x} - e^{-omega x}) + gamma_J (e^{-t2 x} - e^{-omega x})`
/// and `rho = rho_amp[0] e^{-t1 x} + rho_amp[1] e^{-t2 x}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSolution {
    pub xi: Vec<f64>,
    pub lambda: C,
    pub roots: RootSet,
    pub alpha: Vec<C>,
    pub beta: Vec<C>,
    pub gamma: Vec<C>,
    pub rho_amp: [C; 2],
}

impl ModeSolution {
    /// Normal profiles of `rho` and each `u_J`, exactly as in the ansatz.
    pub fn profiles(&self) -> (Vec<(C, Profile)>, Vec<Vec<(C, Profile)>>) {
        let r = &self.roots;
        let rho = vec![(self.rho_amp[0], Profile::Exp(r.t1)), (self.rho_amp[1], Profile::Exp(r.t2))];
        let u = (0..self.alpha.len())
            .map(|j| {
                vec![
                    (self.alpha[j] - self.beta[j] - self.gamma[j], Profile::Exp(r.omega)),
                    (self.beta[j], Profile::Exp(r.t1)),
                    (self.gamma[j], Profile::Exp(r.t2)),
                ]
            })
            .collect();
        (rho, u)
    }
}

/// Everything the per-mode formulas need at one `(xi', lambda)`.
struct ModeContext<'a> {
    xi: &'a [f64],
    k2: f64,
    lambda: C,
    roots: RootSet,
    frak: FrakSymbols,
    lop: Lopatinskii,
    model: &'a Model,
}

impl<'a> ModeContext<'a> {
    fn new(xi: &'a [f64], lambda: C, model: &'a Model, mode: usize) -> Result<Self> {
        model.check_lambda(lambda)?;
        let k2: f64 = xi.iter().map(|x| x * x).sum();
        let roots = RootSet::new(k2, lambda, model)?;
        let frak = FrakSymbols::with_roots(k2, lambda, &roots, model);
        let scale = (lambda.norm().sqrt() + k2.sqrt()).powi(6);
        if frak.l.iter().any(|l| !(l.norm() > SINGULAR_TOL * scale)) {
            return Err(Error::SingularLopatinskii { mode });
        }
        let lop = lopatinskii_with(k2, lambda, &roots, &frak, model);
        Ok(Self { xi, k2, lambda, roots, frak, lop, model })
    }

    fn n(&self) -> usize {
        self.xi.len() + 1
    }

    fn i_xi_dot(&self, g: &[C]) -> C {
        self.xi.iter().zip(g).map(|(x, gj)| C::new(0.0, *x) * gj).sum()
    }

    /// `(-2 omega i xi'.g' + (omega^2 + |xi'|^2) g_N) / mu`.
    fn g_combination(&self, g: &[C]) -> C {
        let w = self.roots.omega;
        let q = w * w + self.k2;
        (-2.0 * w * self.i_xi_dot(g) + q * g[self.n() - 1]) / self.model.mu()
    }

    fn rhs(&self, g: &[C], h: C) -> [C; 2] {
        [self.roots.t1 * self.roots.t2 * self.g_combination(g), self.lambda * h]
    }

    /// Fills the remaining amplitudes from `(beta_N, gamma_N)`.
    fn finish(&self, g: &[C], beta_n: C, gamma_n: C) -> ModeSolution {
        let n = self.n();
        let mu = self.model.mu();
        let RootSet { omega: w, t1, t2 } = self.roots;
        let q = w * w + self.k2;
        let gn = g[n - 1];
        let alpha_n = (t1 * t2 * gn / mu
            + t2 * (2.0 * t1 * w - q) * beta_n
            + t1 * (2.0 * t2 * w - q) * gamma_n)
            / (2.0 * t1 * t2 * w);
        let c1 = (4.0 * t1 * w - 3.0 * w * w - self.k2) * beta_n / (2.0 * t1 * w);
        let c2 = (4.0 * t2 * w - 3.0 * w * w - self.k2) * gamma_n / (2.0 * t2 * w);
        let mut alpha = Vec::with_capacity(n);
        let mut beta = Vec::with_capacity(n);
        let mut gamma = Vec::with_capacity(n);
        for (j, &x) in self.xi.iter().enumerate() {
            let ix = C::new(0.0, x);
            alpha.push((g[j] / mu + ix * gn / (2.0 * mu * w) + ix * c1 + ix * c2) / w);
            beta.push(-ix * beta_n / t1);
            gamma.push(-ix * gamma_n / t2);
        }
        alpha.push(alpha_n);
        beta.push(beta_n);
        gamma.push(gamma_n);
        let rho_amp = [
            (t1 * t1 - self.k2) / (self.lambda * t1) * beta_n,
            (t2 * t2 - self.k2) / (self.lambda * t2) * gamma_n,
        ];
        ModeSolution {
            xi: self.xi.to_vec(),
            lambda: self.lambda,
            roots: self.roots,
            alpha,
            beta,
            gamma,
            rho_amp,
        }
    }
}

fn check_data(xi: &[f64], g: &[C]) -> Result<()> {
    if g.len() != xi.len() + 1 {
        return Err(Error::GridMismatch("boundary data needs N components".into()));
    }
    Ok(())
}

/// Amplitudes from an elimination-with-pivoting solve of the 2x2 boundary system.
pub fn coefficients_direct(
    xi: &[f64],
    lambda: C,
    g: &[C],
    h: C,
    model: &Model,
) -> Result<ModeSolution> {
    check_data(xi, g)?;
    let ctx = ModeContext::new(xi, lambda, model, 0)?;
    let a = ctx.lop.matrix;
    let [r0, r1] = ctx.rhs(g, h);
    let (x, y) = if a[0][0].norm() >= a[1][0].norm() {
        let m = a[1][0] / a[0][0];
        let y = (r1 - m * r0) / (a[1][1] - m * a[0][1]);
        ((r0 - a[0][1] * y) / a[0][0], y)
    } else {
        let m = a[0][0] / a[1][0];
        let y = (r0 - m * r1) / (a[0][1] - m * a[1][1]);
        ((r1 - a[1][1] * y) / a[1][0], y)
    };
    Ok(ctx.finish(g, x, y))
}

/// Amplitudes from the adjugate quotients `L_ij / det L`.
pub fn coefficients_closed_form(
    xi: &[f64],
    lambda: C,
    g: &[C],
    h: C,
    model: &Model,
) -> Result<ModeSolution> {
    check_data(xi, g)?;
    let ctx = ModeContext::new(xi, lambda, model, 0)?;
    Ok(closed_form_with(&ctx, g, h))
}

fn closed_form_with(ctx: &ModeContext<'_>, g: &[C], h: C) -> ModeSolution {
    let lp = &ctx.lop;
    let [r0, r1] = ctx.rhs(g, h);
    let beta_n = (lp.l11 * r0 + lp.l12 * r1) / lp.det_factored;
    let gamma_n = (lp.l21 * r0 + lp.l22 * r1) / lp.det_factored;
    ctx.finish(g, beta_n, gamma_n)
}

/// Normal profiles of one mode from the eliminated forms, free of `1/lambda` and `1/(t2 - t1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeTerms {
    pub rho: Vec<(C, Profile)>,
    pub u: Vec<Vec<(C, Profile)>>,
}

pub fn assemble_mode(xi: &[f64], lambda: C, g: &[C], h: C, model: &Model) -> Result<ModeTerms> {
    check_data(xi, g)?;
    let ctx = ModeContext::new(xi, lambda, model, 0)?;
    Ok(assemble_with(&ctx, g, h))
}

fn assemble_with(ctx: &ModeContext<'_>, g: &[C], h: C) -> ModeTerms {
    let n = ctx.n();
    let mu = ctx.model.mu();
    let lambda = ctx.lambda;
    let s = ctx.model.consts.s();
    let RootSet { omega: w, t1, t2 } = ctx.roots;
    let t = [t1, t2];
    let fr = &ctx.frak;
    let s12 = s[0] * s[1];
    let gc = ctx.g_combination(g);
    let gn = g[n - 1];
    let sign = [1.0, -1.0];
    let other = [1usize, 0usize];

    let h_rho: C = (0..2).map(|l| sign[l] * fr.a * t[l] * fr.m[l] / (s[l] * fr.l[l])).sum();
    let c_e1 = s12 * (t1 + w) * t1 / fr.l[0] * gc + h_rho * h;
    let c_m0 = -s12 * t1 * t1 * (t1 + w) / fr.l[0] * gc + lambda * s[1] * t1 * fr.m[0] / fr.l[0] * h;
    let rho = vec![(c_e1, Profile::Exp(t1)), (c_m0, Profile::Ramp(t1, t2))];

    // Sums over l and over the index pairs (l, m) in {(1,2), (2,1)}.
    let g_p: C = (0..2).map(|l| sign[l] * t1 * t2 * fr.a * fr.p[l] / (s[l] * fr.l[l])).sum();
    let g_q: C = (0..2).map(|l| sign[l] * t1 * t2 * fr.a * fr.q[l] / (s[l] * fr.l[l])).sum();
    let h_p: C = (0..2)
        .map(|l| {
            let m = other[l];
            sign[l] * t[l] * fr.m[l] * fr.p[m] / (fr.l[l] * (t[m] + w))
        })
        .sum();
    let h_q: C = (0..2)
        .map(|l| {
            let m = other[l];
            sign[l] * t[l] * fr.m[l] * fr.q[m] / (fr.l[l] * (t[m] + w))
        })
        .sum();
    // Coefficient of M_l in u_N; u_j carries -i xi_j / t_l times it.
    let normal_ramp: Vec<C> = (0..2)
        .map(|l| {
            let m = other[l];
            sign[l] * t1 * t2 * s12 * t[l] * (t[l] + w) / (s[l] * fr.l[l]) * gc
                + sign[m] * lambda * t1 * t2 * fr.m[m] / fr.l[m] * h
        })
        .collect();

    let mut u = Vec::with_capacity(n);
    for (j, &x) in ctx.xi.iter().enumerate() {
        let ix = C::new(0.0, x);
        let e = g[j] / (mu * w)
            + ix * gn / (2.0 * mu * w * w)
            + ix / (2.0 * w * w) * (gc * g_p + lambda * fr.b * h * h_p);
        let mut terms = vec![(e, Profile::Exp(w))];
        for l in 0..2 {
            let c = -ix / t[l] * normal_ramp[l] * fr.r[l];
            terms.push((c, Profile::Ramp(w, t[l])));
        }
        u.push(terms);
    }
    let e = gn / (2.0 * mu * w) + (gc * g_q + lambda * fr.b * h * h_q) / (2.0 * w);
    let mut terms = vec![(e, Profile::Exp(w))];
    for l in 0..2 {
        terms.push((normal_ramp[l] * fr.r[l], Profile::Ramp(w, t[l])));
    }
    u.push(terms);
    ModeTerms { rho, u }
}

/// Modal representation of the reduced solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedModal {
    pub rho: ModalField,
    pub u: Vec<ModalField>,
}

/// Solves mode by mode from tangential coefficients of the boundary data.
pub fn reduced_modal(
    g_hat: &[Vec<C>],
    h_hat: &[C],
    lambda: C,
    grid: &TangentialGrid,
    model: &Model,
) -> Result<ReducedModal> {
    let n = grid.dim + 1;
    if g_hat.len() != n || g_hat.iter().any(|c| c.len() != grid.modes()) || h_hat.len() != grid.modes() {
        return Err(Error::GridMismatch("boundary coefficients do not match the lattice".into()));
    }
    model.check_lambda(lambda)?;
    let terms: Vec<Option<ModeTerms>> = (0..grid.modes())
        .into_par_iter()
        .map(|mode| {
            let g: Vec<C> = g_hat.iter().map(|c| c[mode]).collect();
            let h = h_hat[mode];
            if h == C::default() && g.iter().all(|v| *v == C::default()) {
                return Ok(None);
            }
            let xi = grid.xi(mode);
            let ctx = ModeContext::new(&xi, lambda, model, mode)?;
            Ok(Some(assemble_with(&ctx, &g, h)))
        })
        .collect::<Result<_>>()?;
    let mut rho = ModalField::zero(*grid);
    let mut u = vec![ModalField::zero(*grid); n];
    for (mode, t) in terms.into_iter().enumerate() {
        let Some(t) = t else { continue };
        for (c, p) in t.rho {
            rho.push(mode, c, p);
        }
        for (j, comp) in t.u.into_iter().enumerate() {
            for (c, p) in comp {
                u[j].push(mode, c, p);
            }
        }
    }
    Ok(ReducedModal { rho, u })
}

/// Reduced solution sampled on `tangential grid x normal samples`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedSolution {
    pub modal: ReducedModal,
    pub normal: NormalSamples,
    pub rho: Vec<C>,
    pub u: Vec<Vec<C>>,
}

fn tangential_coefficients(transform: &Transform, samples: &[C], dim: usize) -> Vec<C> {
    let mut data = samples.to_vec();
    transform.to_coefficients(&mut data, &(0..dim).collect::<Vec<_>>());
    data
}

/// `g`, `h`: samples on the tangential grid at `x_N = 0`.
pub fn solve_reduced(
    g: &[Vec<C>],
    h: &[C],
    lambda: C,
    grid: &TangentialGrid,
    normal: &NormalSamples,
    model: &Model,
) -> Result<ReducedSolution> {
    let tr = Transform::new(&grid.shape());
    if g.iter().any(|c| c.len() != grid.modes()) || h.len() != grid.modes() {
        return Err(Error::GridMismatch("boundary samples do not match the grid".into()));
    }
    let g_hat: Vec<Vec<C>> = g.iter().map(|c| tangential_coefficients(&tr, c, grid.dim)).collect();
    let h_hat = tangential_coefficients(&tr, h, grid.dim);
    let modal = reduced_modal(&g_hat, &h_hat, lambda, grid, model)?;
    let mut shape = grid.shape();
    shape.push(normal.len());
    let sample_tr = Transform::new(&shape);
    let mut fields: Vec<&ModalField> = vec![&modal.rho];
    fields.extend(modal.u.iter());
    let mut sampled = sample_modal(&fields, normal.as_slice(), &sample_tr);
    let u = sampled.split_off(1);
    let rho = sampled.pop().unwrap_or_default();
    Ok(ReducedSolution { modal, normal: normal.clone(), rho, u })
}

/// Per-mode amplitudes of the reduced solution, for inspection and dumps.
pub fn mode_solutions(
    g_hat: &[Vec<C>],
    h_hat: &[C],
    lambda: C,
    grid: &TangentialGrid,
    model: &Model,
) -> Result<Vec<ModeSolution>> {
    (0..grid.modes())
        .map(|mode| {
            let xi = grid.xi(mode);
            let g: Vec<C> = g_hat.iter().map(|c| c[mode]).collect();
            let ctx = ModeContext::new(&xi, lambda, model, mode)?;
            Ok(closed_form_with(&ctx, &g, h_hat[mode]))
        })
        .collect()
}

/// Interior rows on the normal samples plus the boundary rows at `x_N = 0`.
pub fn residual_reduced(
    sol: &ReducedModal,
    g: &[Vec<C>],
    h: &[C],
    lambda: C,
    normal: &NormalSamples,
    model: &Model,
) -> ResidualReport {
    let grid = sol.rho.grid;
    let mut p = model.params;
    p.gamma = 0.0;
    let mass = mass_row(&sol.rho, &sol.u, lambda);
    let momentum = momentum_row(&sol.rho, &sol.u, lambda, &p);
    let stress = stress_row(&sol.rho, &sol.u, &p);
    let neumann = neumann_row(&sol.rho);

    let mut shape = grid.shape();
    shape.push(normal.len());
    let interior_tr = Transform::new(&shape);
    let mut interior: Vec<&ModalField> = vec![&mass];
    interior.extend(momentum.iter());
    let interior = sample_modal(&interior, normal.as_slice(), &interior_tr);

    let mut bshape = grid.shape();
    bshape.push(1);
    let boundary_tr = Transform::new(&bshape);
    let mut boundary: Vec<&ModalField> = stress.iter().collect();
    boundary.push(&neumann);
    let boundary = sample_modal(&boundary, &[0.0], &boundary_tr);

    let area = grid.cell_area();
    let nx = normal.len();
    let xs = normal.as_slice();
    // Trapezoid weights on the (possibly nonuniform) normal samples.
    let wx: Vec<f64> = (0..nx)
        .map(|k| {
            let left = if k > 0 { xs[k] - xs[k - 1] } else { 0.0 };
            let right = if k + 1 < nx { xs[k + 1] - xs[k] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect();
    let w_int = move |i: usize| area * wx[i % nx];
    let w_bdry = move |_: usize| area;
    let stress_res: Vec<Vec<C>> = boundary[..g.len()]
        .iter()
        .zip(g)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect();
    let neumann_res: Vec<C> = boundary[g.len()].iter().zip(h).map(|(x, y)| x - y).collect();
    let zeros = vec![vec![C::default(); grid.modes() * nx]];
    let rows = vec![
        row_from("mass", &interior[..1], &zeros, &w_int),
        row_from("momentum", &interior[1..], &zeros, &w_int),
        row_from("stress", &stress_res, g, &w_bdry),
        row_from("neumann", &[neumann_res], &[h.to_vec()], &w_bdry),
    ];
    let data_norm = rows.iter().map(|r| r.data_l2 * r.data_l2).sum::<f64>().sqrt();
    ResidualReport::new(rows, data_norm)
}
