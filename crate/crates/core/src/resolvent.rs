//! Full half-space resolvent: whole-space solve of extended data, boundary correction,
//! reduced solve, and the fixed-point treatment of the pressure term.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{HalfField, HalfSpace};
use crate::half::reduced_modal;
use crate::model::{MaterialParams, Model};
use crate::ops::{grad, mass_row, momentum_row, neumann_row, stress_row, Field};
use crate::report::{row_from, ResidualReport};
use crate::whole::whole_multipliers;

type C = Complex64;

/// Right-hand side `(d, f, g, h)`; `g` and `h` are fields whose traces enter the boundary rows.
#[derive(Debug, Clone)]
pub struct FullData {
    pub d: HalfField,
    pub f: Vec<HalfField>,
    pub g: Vec<HalfField>,
    pub h: HalfField,
}

impl FullData {
    pub fn zero(space: &Arc<HalfSpace>) -> Self {
        let n = space.dim();
        Self {
            d: space.zero(),
            f: vec![space.zero(); n],
            g: vec![space.zero(); n],
            h: space.zero(),
        }
    }

    pub fn space(&self) -> &Arc<HalfSpace> {
        &self.d.space
    }

    pub fn is_zero(&self) -> bool {
        self.d.is_zero()
            && self.h.is_zero()
            && self.f.iter().all(HalfField::is_zero)
            && self.g.iter().all(HalfField::is_zero)
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: C, other: &FullData) {
        self.d.axpy(s, &other.d);
        self.h.axpy(s, &other.h);
        self.f.iter_mut().zip(&other.f).for_each(|(a, b)| a.axpy(s, b));
        self.g.iter_mut().zip(&other.g).for_each(|(a, b)| a.axpy(s, b));
    }

    pub fn scaled(&self, s: C) -> Self {
        Self {
            d: self.d.scaled(s),
            f: self.f.iter().map(|c| c.scaled(s)).collect(),
            g: self.g.iter().map(|c| c.scaled(s)).collect(),
            h: self.h.scaled(s),
        }
    }

    /// Fields entering the lambda-weighted data norm, each with its weight.
    fn weighted_blocks(&self, lambda: C) -> Vec<(f64, HalfField)> {
        let one = 1.0;
        let sl = lambda.norm().sqrt();
        let mut out = vec![(one, self.d.clone())];
        out.extend(grad(&self.d).into_iter().map(|c| (one, c)));
        out.extend(self.f.iter().map(|c| (one, c.clone())));
        for gj in &self.g {
            out.extend(grad(gj).into_iter().map(|c| (one, c)));
            out.push((sl, gj.clone()));
        }
        let dh = grad(&self.h);
        for c in &dh {
            out.extend(grad(c).into_iter().map(|cc| (one, cc)));
        }
        out.extend(dh.into_iter().map(|c| (sl, c)));
        out.push((lambda.norm(), self.h.clone()));
        out
    }

    /// Samples of every block of the data norm, scaled so that the Euclidean norm of the
    /// result is the discrete norm.
    pub fn weighted_vector(&self, lambda: C) -> Vec<C> {
        let blocks = self.weighted_blocks(lambda);
        let refs: Vec<&HalfField> = blocks.iter().map(|b| &b.1).collect();
        weighted_samples(self.space(), &refs, &blocks.iter().map(|b| b.0).collect::<Vec<_>>())
    }

    /// Discrete `|| (d, grad d, f, grad g, lambda^{1/2} g, grad^2 h, lambda^{1/2} grad h, lambda h) ||`.
    pub fn norm(&self, lambda: C) -> f64 {
        self.weighted_vector(lambda).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Concatenated half-node samples, each field scaled by its weight times the square root
/// of the quadrature weight.
pub fn weighted_samples(space: &HalfSpace, fields: &[&HalfField], scale: &[f64]) -> Vec<C> {
    let samples = space.sample(fields);
    let w = space.weights();
    samples
        .iter()
        .zip(scale)
        .flat_map(|(s, a)| s.iter().zip(w).map(move |(v, wi)| v * (a * wi.sqrt())))
        .collect()
}

/// Density and velocity on the half-space.
#[derive(Debug, Clone)]
pub struct FullSolution {
    pub rho: HalfField,
    pub u: Vec<HalfField>,
}

impl FullSolution {
    /// Samples on the half nodes: `rho` first, then the velocity components.
    pub fn samples(&self) -> Vec<Vec<C>> {
        let mut refs = vec![&self.rho];
        refs.extend(self.u.iter());
        self.rho.space.sample(&refs)
    }
}

fn gamma_free(model: &Model) -> MaterialParams {
    model.params.with_gamma(0.0)
}

/// Whole-space solution of `(E d, E_0 f)` as box-only fields.
pub fn solve_extended(data: &FullData, lambda: C, model: &Model) -> Result<FullSolution> {
    model.check_lambda(lambda)?;
    let space = data.space();
    let mut refs = vec![&data.d];
    refs.extend(data.f.iter());
    let samples = space.sample(&refs);
    let d_hat = space.box_coefficients(&samples[0], true);
    let f_hat: Vec<Vec<C>> = samples[1..].iter().map(|s| space.box_coefficients(s, false)).collect();
    let (rho, u) = whole_multipliers(&space.boxes, &d_hat, &f_hat, lambda, &gamma_free(model));
    Ok(FullSolution { rho: space.from_box(rho), u: u.into_iter().map(|c| space.from_box(c)).collect() })
}

/// Boundary data for the reduced problem, as tangential coefficients of the traces.
pub fn correct_boundary_data(
    data: &FullData,
    whole: Option<&FullSolution>,
    model: &Model,
) -> (Vec<Vec<C>>, Vec<C>) {
    let mut g: Vec<Vec<C>> = data.g.iter().map(HalfField::trace).collect();
    let mut h = data.h.trace();
    if let Some(w) = whole {
        let p = gamma_free(model);
        for (gj, sj) in g.iter_mut().zip(stress_row(&w.rho, &w.u, &p)) {
            gj.iter_mut().zip(sj.trace()).for_each(|(a, b)| *a -= b);
        }
        h.iter_mut().zip(neumann_row(&w.rho).trace()).for_each(|(a, b)| *a -= b);
    }
    (g, h)
}

/// Solution map of the system without the pressure term.
pub fn solve_gamma_zero(data: &FullData, lambda: C, model: &Model) -> Result<FullSolution> {
    model.check_lambda(lambda)?;
    let space = data.space();
    let interior_zero = data.d.is_zero() && data.f.iter().all(HalfField::is_zero);
    let whole = if interior_zero { None } else { Some(solve_extended(data, lambda, model)?) };
    let (g, h) = correct_boundary_data(data, whole.as_ref(), model);
    let reduced = reduced_modal(&g, &h, lambda, &space.grid.tangential, model)?;
    let mut rho = space.from_modal(reduced.rho);
    let mut u: Vec<HalfField> = reduced.u.into_iter().map(|m| space.from_modal(m)).collect();
    if let Some(w) = whole {
        rho.boxed = w.rho.boxed;
        for (a, b) in u.iter_mut().zip(w.u) {
            a.boxed = b.boxed;
        }
    }
    Ok(FullSolution { rho, u })
}

/// `(0, -gamma grad rho, gamma rho n, 0)` for a density `rho`, with `n = -e_N`.
pub fn pressure_data(rho: &HalfField, gamma: f64) -> FullData {
    let space = rho.space.clone();
    let n = space.dim();
    let gm = C::new(gamma, 0.0);
    let mut g = vec![space.zero(); n];
    g[n - 1] = rho.scaled(-gm);
    FullData {
        d: space.zero(),
        f: grad(rho).iter().map(|c| c.scaled(-gm)).collect(),
        g,
        h: space.zero(),
    }
}

/// One application of the pressure map to `data`.
pub fn apply_pressure_map(data: &FullData, lambda: C, model: &Model) -> Result<FullData> {
    if model.params.gamma == 0.0 {
        return Ok(FullData::zero(data.space()));
    }
    let sol = solve_gamma_zero(data, lambda, model)?;
    Ok(pressure_data(&sol.rho, model.params.gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeumannOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for NeumannOptions {
    fn default() -> Self {
        Self { max_iter: 64, tol: 1e-10 }
    }
}

/// Trace of the fixed-point iteration.
#[derive(Debug, Clone, Serialize)]
pub struct NeumannState {
    pub iterations: usize,
    pub data_norm: f64,
    pub increments: Vec<f64>,
    pub ratios: Vec<f64>,
    #[serde(skip)]
    pub data: Option<FullData>,
}

const DIVERGENCE_RUN: usize = 5;

/// Solves the system with the pressure term by iterating `F_{k+1} = F + G F_k` from `F_0 = F`.
pub fn solve_general(
    data: &FullData,
    lambda: C,
    model: &Model,
    opts: NeumannOptions,
) -> Result<(FullSolution, NeumannState)> {
    solve_general_from(data, data.clone(), lambda, model, opts)
}

/// As [`solve_general`], starting from an arbitrary iterate.
pub fn solve_general_from(
    data: &FullData,
    initial: FullData,
    lambda: C,
    model: &Model,
    opts: NeumannOptions,
) -> Result<(FullSolution, NeumannState)> {
    model.check_lambda(lambda)?;
    let data_norm = data.norm(lambda);
    let mut state =
        NeumannState { iterations: 0, data_norm, increments: Vec::new(), ratios: Vec::new(), data: None };
    if model.params.gamma == 0.0 {
        state.iterations = 1;
        let sol = solve_gamma_zero(data, lambda, model)?;
        state.data = Some(data.clone());
        return Ok((sol, state));
    }
    let scale = data_norm.max(initial.norm(lambda));
    let mut current = initial;
    let mut sol = solve_gamma_zero(&current, lambda, model)?;
    let mut run = 0;
    for k in 1..=opts.max_iter {
        let pressure = pressure_data(&sol.rho, model.params.gamma);
        let mut next = data.clone();
        next.axpy(C::new(1.0, 0.0), &pressure);
        let mut diff = next.clone();
        diff.axpy(C::new(-1.0, 0.0), &current);
        let inc = diff.norm(lambda);
        if let Some(prev) = state.increments.last() {
            let ratio = if *prev > 0.0 { inc / prev } else { 0.0 };
            state.ratios.push(ratio);
            run = if ratio >= 1.0 { run + 1 } else { 0 };
        }
        state.increments.push(inc);
        state.iterations = k;
        current = next;
        sol = solve_gamma_zero(&current, lambda, model)?;
        if inc <= opts.tol * scale {
            state.data = Some(current);
            return Ok((sol, state));
        }
        if run >= DIVERGENCE_RUN {
            break;
        }
    }
    Err(Error::NeumannDiverged {
        iterations: state.iterations,
        ratio: state.ratios.last().copied().unwrap_or(f64::INFINITY),
    })
}

/// Residual of all four rows, pressure term included, on the half nodes and at the boundary.
pub fn residual_full(sol: &FullSolution, data: &FullData, lambda: C, params: &MaterialParams) -> ResidualReport {
    let space = sol.rho.space.clone();
    let mass = mass_row(&sol.rho, &sol.u, lambda);
    let momentum = momentum_row(&sol.rho, &sol.u, lambda, params);
    let mut lhs = vec![&mass];
    lhs.extend(momentum.iter());
    let mut rhs = vec![&data.d];
    rhs.extend(data.f.iter());
    let lhs = space.sample(&lhs);
    let rhs = space.sample(&rhs);
    let res: Vec<Vec<C>> =
        lhs.iter().zip(&rhs).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();

    let stress: Vec<Vec<C>> = stress_row(&sol.rho, &sol.u, params).iter().map(HalfField::trace).collect();
    let g: Vec<Vec<C>> = data.g.iter().map(HalfField::trace).collect();
    let stress_res: Vec<Vec<C>> =
        stress.iter().zip(&g).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
    let h = data.h.trace();
    let neumann_res: Vec<C> = neumann_row(&sol.rho).trace().iter().zip(&h).map(|(x, y)| x - y).collect();

    let w = space.weights().to_vec();
    let interior = move |i: usize| w[i];
    let tg = &space.grid.tangential;
    let boundary_weight = tg.period().powi(tg.dim as i32);
    let boundary = move |_: usize| boundary_weight;
    let rows = vec![
        row_from("mass", &res[..1], &rhs[..1], &interior),
        row_from("momentum", &res[1..], &rhs[1..], &interior),
        row_from("stress", &stress_res, &g, &boundary),
        row_from("neumann", &[neumann_res], &[h], &boundary),
    ];
    let data_norm = rows.iter().map(|r| r.data_l2 * r.data_l2).sum::<f64>().sqrt();
    ResidualReport::new(rows, data_norm)
}

/// One row of a contraction table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub lambda_abs: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub ratio: f64,
}

/// `||G F|| / ||F||` in the lambda-weighted data norm for each `lambda`.
pub fn contraction_probe(data: &FullData, lambdas: &[C], model: &Model) -> Result<Vec<ProbeRow>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let num = apply_pressure_map(data, lambda, model)?.norm(lambda);
            let den = data.norm(lambda);
            if den == 0.0 {
                return Err(Error::ZeroDenominator);
            }
            Ok(ProbeRow { lambda_abs: lambda.norm(), lambda_re: lambda.re, lambda_im: lambda.im, ratio: num / den })
        })
        .collect()
}

/// Outcome of the doubling search for a contracting spectral parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSelection {
    pub lambda0: f64,
    pub lambda: C,
    pub doublings: usize,
    /// Successive ratios `||G^{k+1} F|| / ||G^k F||` at the selected point.
    pub ratios: Vec<f64>,
}

/// Doubles `|lambda|` from `start` along `e^{i arg}` until every power ratio is at most `threshold`.
pub fn select_lambda0(
    data: &FullData,
    arg: f64,
    model: &Model,
    start: f64,
    threshold: f64,
    powers: usize,
    max_doublings: usize,
) -> Result<LambdaSelection> {
    let dir = C::from_polar(1.0, arg);
    let mut lambda0 = start;
    for doublings in 0..=max_doublings {
        let lambda = dir * lambda0;
        let mut ratios = Vec::with_capacity(powers);
        let mut current = data.clone();
        let mut norm = current.norm(lambda);
        for _ in 0..powers {
            let next = apply_pressure_map(&current, lambda, model)?;
            let next_norm = next.norm(lambda);
            ratios.push(if norm > 0.0 { next_norm / norm } else { 0.0 });
            if next_norm == 0.0 {
                break;
            }
            current = next;
            norm = next_norm;
        }
        if ratios.iter().all(|r| *r <= threshold) {
            return Ok(LambdaSelection { lambda0, lambda, doublings, ratios });
        }
        lambda0 *= 2.0;
    }
    Err(Error::NeumannDiverged { iterations: max_doublings, ratio: f64::NAN })
}
