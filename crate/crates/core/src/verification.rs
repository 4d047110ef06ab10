//! Manufactured solutions, random data and R-bound estimation.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{HalfField, HalfSpace};
use crate::modal::{ModalField, Profile};
use crate::model::{MaterialParams, Model, Sector};
use crate::ops::{mass_row, momentum_row, neumann_row, stress_row, Field};
use crate::resolvent::{solve_gamma_zero, solve_general, weighted_samples, FullData, FullSolution, NeumannOptions};
use crate::symbols::RootSet;

type C = Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_c(r: &mut impl Rng) -> C {
    C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Shape of the random smooth bumps used as data and exact solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpShape {
    pub center: f64,
    pub width: f64,
    /// Largest integer tangential wavenumber per axis.
    pub max_wavenumber: i64,
}

impl Default for BumpShape {
    fn default() -> Self {
        Self { center: 3.0, width: 0.35, max_wavenumber: 2 }
    }
}

/// Modal field `sum_k c_k e^{i xi_k . x'} G(x_N)` with random `c_k` and a real-valued result.
pub fn random_bump(space: &Arc<HalfSpace>, shape: BumpShape, r: &mut impl Rng) -> HalfField {
    let grid = space.grid.tangential;
    let mut field = ModalField::zero(grid);
    let profile = Profile::Gauss { center: shape.center, width: shape.width, order: 0 };
    let kmax = shape.max_wavenumber;
    let mut k = vec![-kmax; grid.dim];
    loop {
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        if let (Some(m), Some(mn)) = (grid.mode_of(&k), grid.mode_of(&neg)) {
            if m <= mn {
                let c = random_c(r);
                if m == mn {
                    field.push(m, C::new(c.re, 0.0), profile);
                } else {
                    field.push(m, c, profile);
                    field.push(mn, c.conj(), profile);
                }
            }
        }
        let mut axis = 0;
        loop {
            if axis == grid.dim {
                return space.from_modal(field);
            }
            k[axis] += 1;
            if k[axis] <= kmax {
                break;
            }
            k[axis] = -kmax;
            axis += 1;
        }
    }
}

/// Data `(d, f, g, h)` produced by applying the full system, pressure term included.
pub fn manufactured_data(sol: &FullSolution, lambda: C, params: &MaterialParams) -> FullData {
    FullData {
        d: mass_row(&sol.rho, &sol.u, lambda),
        f: momentum_row(&sol.rho, &sol.u, lambda, params),
        g: stress_row(&sol.rho, &sol.u, params),
        h: neumann_row(&sol.rho),
    }
}

/// Random smooth pair localized around `shape.center`.
pub fn bump_pair(space: &Arc<HalfSpace>, shape: BumpShape, r: &mut impl Rng) -> FullSolution {
    FullSolution {
        rho: random_bump(space, shape, r),
        u: (0..space.dim()).map(|_| random_bump(space, shape, r)).collect(),
    }
}

/// Sum of boundary-layer solutions of the homogeneous interior system on the given modes:
/// a divergence-free `omega` channel and one potential flow per root `t_j`.
pub fn homogeneous_pair(
    space: &Arc<HalfSpace>,
    modes: &[usize],
    lambda: C,
    model: &Model,
    r: &mut impl Rng,
) -> Result<FullSolution> {
    let grid = space.grid.tangential;
    let n = space.dim();
    let s = model.consts.s();
    let mut rho = ModalField::zero(grid);
    let mut u = vec![ModalField::zero(grid); n];
    for &mode in modes {
        let xi = grid.xi(mode);
        let k2: f64 = xi.iter().map(|v| v * v).sum();
        let roots = RootSet::new(k2, lambda, model)?;
        let w = roots.omega;
        let tangential: Vec<C> = (0..n - 1).map(|_| random_c(r)).collect();
        let normal: C = xi.iter().zip(&tangential).map(|(x, a)| C::new(0.0, *x) * a).sum::<C>() / w;
        for (j, a) in tangential.iter().enumerate() {
            u[j].push(mode, *a, Profile::Exp(w));
        }
        u[n - 1].push(mode, normal, Profile::Exp(w));
        for (j, sj) in s.iter().enumerate() {
            let t = roots.t(j + 1);
            let c = random_c(r);
            rho.push(mode, -sj * c, Profile::Exp(t));
            for (a, x) in xi.iter().enumerate() {
                u[a].push(mode, C::new(0.0, *x) * c, Profile::Exp(t));
            }
            u[n - 1].push(mode, -t * c, Profile::Exp(t));
        }
    }
    Ok(FullSolution { rho: space.from_modal(rho), u: u.into_iter().map(|m| space.from_modal(m)).collect() })
}

/// Random data with every component a smooth bump.
pub fn random_data(space: &Arc<HalfSpace>, shape: BumpShape, r: &mut impl Rng) -> FullData {
    let n = space.dim();
    FullData {
        d: random_bump(space, shape, r),
        f: (0..n).map(|_| random_bump(space, shape, r)).collect(),
        g: (0..n).map(|_| random_bump(space, shape, r)).collect(),
        h: random_bump(space, shape, r),
    }
}

/// Relative discrete L2 distance between two solutions on the half nodes.
pub fn relative_error(a: &FullSolution, b: &FullSolution) -> f64 {
    let space = a.rho.space.clone();
    let sa = a.samples();
    let sb = b.samples();
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in sa.iter().zip(&sb) {
        let diff: Vec<C> = x.iter().zip(y).map(|(p, q)| p - q).collect();
        num += space.norm(&diff).powi(2);
        den += space.norm(y).powi(2);
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

/// How the Rademacher expectation is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RademacherMode {
    /// Average over all `2^m` sign vectors.
    Exact,
    /// Average over random sign vectors.
    MonteCarlo { draws: usize, seed: u64 },
}

const EXACT_LIMIT: usize = 16;

/// Real parts of the Gram matrix `<v_i, v_j>`.
fn gram(v: &[Vec<C>]) -> Vec<Vec<f64>> {
    v.iter()
        .map(|a| v.iter().map(|b| a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum()).collect())
        .collect()
}

fn quadratic(g: &[Vec<f64>], signs: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            s += signs[i] * signs[j] * v;
        }
    }
    s
}

fn sign_vectors(m: usize, mode: RademacherMode) -> Result<Vec<Vec<f64>>> {
    match mode {
        RademacherMode::Exact => {
            if m > EXACT_LIMIT {
                return Err(Error::InvalidInput(format!("exact Rademacher average needs m <= {EXACT_LIMIT}")));
            }
            Ok((0..1usize << m)
                .map(|bits| (0..m).map(|j| if bits >> j & 1 == 1 { -1.0 } else { 1.0 }).collect())
                .collect())
        }
        RademacherMode::MonteCarlo { draws, seed } => {
            let mut r = rng(seed);
            Ok((0..draws).map(|_| (0..m).map(|_| if r.gen::<bool>() { 1.0 } else { -1.0 }).collect()).collect())
        }
    }
}

/// `(E || sum_j r_j v_j ||^2)^{1/2}`.
pub fn rademacher_average(v: &[Vec<C>], mode: RademacherMode) -> Result<f64> {
    let g = gram(v);
    let signs = sign_vectors(v.len(), mode)?;
    Ok((signs.iter().map(|s| quadratic(&g, s)).sum::<f64>() / signs.len() as f64).sqrt())
}

/// Ratio of Rademacher averages of `outputs[j] = T_j f_j` and `inputs[j] = f_j`.
pub fn rademacher_ratio(outputs: &[Vec<C>], inputs: &[Vec<C>], mode: RademacherMode) -> Result<f64> {
    if outputs.len() != inputs.len() || outputs.is_empty() {
        return Err(Error::InvalidInput("outputs and inputs must pair up".into()));
    }
    let (go, gi) = (gram(outputs), gram(inputs));
    let signs = sign_vectors(outputs.len(), mode)?;
    let num: f64 = signs.iter().map(|s| quadratic(&go, s)).sum();
    let den: f64 = signs.iter().map(|s| quadratic(&gi, s)).sum();
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok((num / den).sqrt())
}

/// Ratios for every prefix `1..=m` of the pairs, from a single pair of Gram matrices.
fn prefix_ratios(outputs: &[Vec<C>], inputs: &[Vec<C>]) -> Result<Vec<f64>> {
    let (go, gi) = (gram(outputs), gram(inputs));
    (1..=outputs.len())
        .map(|k| {
            let sub = |g: &[Vec<f64>]| -> Vec<Vec<f64>> { g[..k].iter().map(|r| r[..k].to_vec()).collect() };
            let (a, b) = (sub(&go), sub(&gi));
            let signs = sign_vectors(k, RademacherMode::Exact)?;
            let num: f64 = signs.iter().map(|s| quadratic(&a, s)).sum();
            let den: f64 = signs.iter().map(|s| quadratic(&b, s)).sum();
            if !(den > 0.0) {
                return Err(Error::ZeroDenominator);
            }
            Ok((num / den).sqrt())
        })
        .collect()
}

/// `lambda d/dlambda` of a vector-valued map, by central differences along the ray through
/// `lambda` with one Richardson step.
pub fn lambda_derivative_family<F>(op: F, lambda: C, rel_step: f64, sector: &Sector) -> Result<Vec<C>>
where
    F: Fn(C) -> Result<Vec<C>>,
{
    for e in [rel_step, -rel_step] {
        let z = lambda * (1.0 + e);
        if !sector.contains(z) {
            return Err(Error::StepOutsideSector { re: z.re, im: z.im });
        }
    }
    let central = |e: f64| -> Result<Vec<C>> {
        let p = op(lambda * (1.0 + e))?;
        let q = op(lambda * (1.0 - e))?;
        Ok(p.iter().zip(&q).map(|(a, b)| (a - b) / (2.0 * e)).collect())
    };
    let coarse = central(rel_step)?;
    let fine = central(rel_step / 2.0)?;
    Ok(fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect())
}

/// Which solution component a family measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `(grad^3 rho, lambda^{1/2} grad^2 rho, lambda rho, grad(lambda rho))`.
    Density,
    /// `(grad^2 u, lambda^{1/2} grad u, lambda u)`.
    Velocity,
}

/// Weighted half-node samples of the chosen family of a solution.
pub fn family_vector(sol: &FullSolution, lambda: C, kind: FamilyKind) -> Vec<C> {
    let space = sol.rho.space.clone();
    let n = space.dim();
    let sl = lambda.norm().sqrt();
    let mut fields: Vec<HalfField> = Vec::new();
    let mut scale: Vec<f64> = Vec::new();
    let derivs = |f: &HalfField, order: usize| -> Vec<HalfField> {
        let mut out = vec![f.clone()];
        for _ in 0..order {
            out = out.iter().flat_map(|g| (0..n).map(move |a| g.diff(a))).collect();
        }
        out
    };
    match kind {
        FamilyKind::Density => {
            let r = &sol.rho;
            let lr = r.scaled(lambda);
            for (block, w) in [(derivs(r, 3), 1.0), (derivs(r, 2), sl), (vec![lr.clone()], 1.0), (derivs(&lr, 1), 1.0)] {
                scale.extend(std::iter::repeat(w).take(block.len()));
                fields.extend(block);
            }
        }
        FamilyKind::Velocity => {
            for u in &sol.u {
                for (block, w) in [(derivs(u, 2), 1.0), (derivs(u, 1), sl), (vec![u.scaled(lambda)], 1.0)] {
                    scale.extend(std::iter::repeat(w).take(block.len()));
                    fields.extend(block);
                }
            }
        }
    }
    let refs: Vec<&HalfField> = fields.iter().collect();
    weighted_samples(&space, &refs, &scale)
}

/// Configuration of an R-bound estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RBoundConfig {
    pub sector: Sector,
    /// Largest `|lambda|` drawn; moduli are log-uniform on `(delta, lambda_max]`.
    pub lambda_max: f64,
    pub m_max: usize,
    pub trials: usize,
    pub seed: u64,
    /// Tangential points, depth and box points of the half-space grid.
    pub tangential_points: usize,
    pub depth: f64,
    pub box_points: usize,
    pub rel_step: f64,
}

impl Default for RBoundConfig {
    fn default() -> Self {
        Self {
            sector: Sector::new(1.2, 0.5),
            lambda_max: 100.0,
            m_max: 8,
            trials: 200,
            seed: 0,
            tangential_points: 8,
            depth: 5.0,
            box_points: 64,
            rel_step: 1e-5,
        }
    }
}

/// Estimate for one family and one derivative order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RBoundEstimate {
    pub family_id: String,
    pub kind: FamilyKind,
    pub n: usize,
    pub p: u32,
    pub m_max: usize,
    pub trials: usize,
    pub estimated_bound: f64,
    /// Best ratio of each trial, in trial order.
    pub per_trial: Vec<f64>,
    pub sector: Sector,
    pub lambda_max: f64,
}

impl RBoundEstimate {
    /// Estimate from the first `trials` trials only.
    pub fn prefix_bound(&self, trials: usize) -> f64 {
        self.per_trial[..trials.min(self.per_trial.len())].iter().copied().fold(0.0, f64::max)
    }
}

fn family_id(kind: FamilyKind, n: usize) -> String {
    let base = match kind {
        FamilyKind::Density => "density",
        FamilyKind::Velocity => "velocity",
    };
    if n == 0 {
        base.to_string()
    } else {
        format!("lambda_d_dlambda^{n} {base}")
    }
}

fn sample_lambda(sector: &Sector, lambda_max: f64, r: &mut impl Rng) -> C {
    let lo = sector.delta.max(1e-12) * (1.0 + 1e-3);
    let modulus = (lo.ln() + (lambda_max.ln() - lo.ln()) * r.gen::<f64>()).exp();
    let half = sector.half_angle() * (1.0 - 1e-6);
    C::from_polar(modulus, r.gen_range(-half..half))
}

/// Solution map used by the estimator: the pressure-free map when `gamma = 0`, the
/// iterated map otherwise.
fn solve_any(data: &FullData, lambda: C, model: &Model) -> Result<FullSolution> {
    if model.params.gamma == 0.0 {
        solve_gamma_zero(data, lambda, model)
    } else {
        solve_general(data, lambda, model, NeumannOptions::default()).map(|r| r.0)
    }
}

/// Estimates the R-bound of the density and velocity families for `n = 0` and `n = 1`
/// from shared trials. Returns estimates in the order `(kind, n)` for each requested pair.
pub fn estimate_rbounds(
    config: &RBoundConfig,
    model: &Model,
    wanted: &[(FamilyKind, usize)],
) -> Result<Vec<RBoundEstimate>> {
    if config.m_max == 0 || config.m_max > 10 || config.trials == 0 {
        return Err(Error::InvalidInput("need 1 <= m_max <= 10 and trials >= 1".into()));
    }
    let tangential = crate::grid::TangentialGrid::new(1, config.tangential_points, 2.0 * std::f64::consts::PI)?;
    let space = HalfSpace::new(crate::grid::HalfGrid::new(tangential, config.depth, config.box_points)?);
    let shape = BumpShape { center: 0.4 * config.depth, width: 0.5, max_wavenumber: 2 };
    let per_trial: Vec<Vec<f64>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut r = rng(config.seed);
            r.set_stream(trial as u64 + 1);
            let mut inputs = Vec::with_capacity(config.m_max);
            let mut outputs: Vec<Vec<Vec<C>>> = vec![Vec::with_capacity(config.m_max); wanted.len()];
            for _ in 0..config.m_max {
                let lambda = sample_lambda(&config.sector, config.lambda_max, &mut r);
                let data = random_data(&space, shape, &mut r);
                inputs.push(data.weighted_vector(lambda));
                let needs_zero = wanted.iter().any(|w| w.1 == 0);
                let needs_one = wanted.iter().any(|w| w.1 == 1);
                let base = if needs_zero { Some(solve_any(&data, lambda, model)?) } else { None };
                let deriv = if needs_one {
                    let kinds: Vec<FamilyKind> = wanted.iter().filter(|w| w.1 == 1).map(|w| w.0).collect();
                    let joint = lambda_derivative_family(
                        |z| {
                            let s = solve_any(&data, z, model)?;
                            Ok(kinds.iter().flat_map(|k| family_vector(&s, z, *k)).collect())
                        },
                        lambda,
                        config.rel_step,
                        &config.sector,
                    )?;
                    let mut parts = Vec::new();
                    let mut offset = 0;
                    for k in &kinds {
                        let len = family_len(&space, *k);
                        parts.push((*k, joint[offset..offset + len].to_vec()));
                        offset += len;
                    }
                    Some(parts)
                } else {
                    None
                };
                for (slot, (kind, n)) in wanted.iter().enumerate() {
                    let v = if *n == 0 {
                        family_vector(base.as_ref().expect("solved"), lambda, *kind)
                    } else {
                        deriv.as_ref().expect("differentiated").iter().find(|p| p.0 == *kind).expect("kind").1.clone()
                    };
                    outputs[slot].push(v);
                }
            }
            outputs
                .iter()
                .map(|out| Ok(prefix_ratios(out, &inputs)?.into_iter().fold(0.0, f64::max)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(wanted
        .iter()
        .enumerate()
        .map(|(slot, (kind, n))| {
            let trials: Vec<f64> = per_trial.iter().map(|t| t[slot]).collect();
            RBoundEstimate {
                family_id: family_id(*kind, *n),
                kind: *kind,
                n: *n,
                p: 2,
                m_max: config.m_max,
                trials: config.trials,
                estimated_bound: trials.iter().copied().fold(0.0, f64::max),
                per_trial: trials,
                sector: config.sector,
                lambda_max: config.lambda_max,
            }
        })
        .collect())
}

fn family_len(space: &HalfSpace, kind: FamilyKind) -> usize {
    let n = space.dim();
    let per_field = match kind {
        FamilyKind::Density => n.pow(3) + n.pow(2) + 1 + n,
        FamilyKind::Velocity => n * (n.pow(2) + n + 1),
    };
    per_field * space.grid.sample_len()
}

/// Single-family convenience wrapper.
pub fn estimate_rbound(config: &RBoundConfig, model: &Model, kind: FamilyKind, n: usize) -> Result<RBoundEstimate> {
    Ok(estimate_rbounds(config, model, &[(kind, n)])?.remove(0))
}
