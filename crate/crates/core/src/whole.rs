//! Whole-space resolvent solver on a periodic box.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::BoxGrid;
use crate::model::{MaterialParams, Model};
use crate::report::{row_from, ResidualReport};
use crate::spectral::{unravel, Transform};
use crate::symbols::whole_space_symbol_p;

type C = Complex64;

/// Box grid with planned transforms and per-point frequency vectors.
#[derive(Debug)]
pub struct BoxSpace {
    pub grid: BoxGrid,
    pub transform: Transform,
    /// `xi[a][flat]` is the `a`-th frequency component at spectral slot `flat`.
    pub xi: Vec<Vec<f64>>,
}

impl BoxSpace {
    pub fn new(grid: BoxGrid) -> Self {
        let freqs = grid.frequencies();
        let len = grid.len();
        let mut xi = vec![vec![0.0; len]; grid.dim()];
        for flat in 0..len {
            for (a, &i) in unravel(flat, &grid.points).iter().enumerate() {
                xi[a][flat] = freqs[a][i];
            }
        }
        let transform = Transform::new(&grid.points);
        Self { grid, transform, xi }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn xi_sq(&self, flat: usize) -> f64 {
        self.xi.iter().map(|x| x[flat] * x[flat]).sum()
    }

    pub fn coefficients(&self, samples: &[C]) -> Vec<C> {
        let mut data = samples.to_vec();
        self.transform.to_coefficients(&mut data, &self.transform.all_axes());
        data
    }

    pub fn samples(&self, coefficients: &[C]) -> Vec<C> {
        let mut data = coefficients.to_vec();
        self.transform.to_samples(&mut data, &self.transform.all_axes());
        data
    }

    /// Multiplies coefficients by `prod_a (i xi_a)` over the listed axes.
    pub fn derivative(&self, coefficients: &[C], axes: &[usize]) -> Vec<C> {
        coefficients
            .iter()
            .enumerate()
            .map(|(f, &c)| axes.iter().fold(c, |acc, &a| acc * C::new(0.0, self.xi[a][f])))
            .collect()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.grid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {n} samples, grid has {}",
                self.grid.len()
            )));
        }
        Ok(())
    }
}

/// Solution pair sampled on the box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WholeField {
    pub grid: BoxGrid,
    pub rho: Vec<C>,
    pub u: Vec<Vec<C>>,
}

/// Applies the whole-space solution multipliers to data coefficients.
pub fn whole_multipliers(
    space: &BoxSpace,
    d_hat: &[C],
    f_hat: &[Vec<C>],
    lambda: C,
    p: &MaterialParams,
) -> (Vec<C>, Vec<Vec<C>>) {
    let n = space.dim();
    let len = space.grid.len();
    let results: Vec<(C, Vec<C>)> = (0..len)
        .into_par_iter()
        .map(|f| {
            let xi2 = space.xi_sq(f);
            let sym = whole_space_symbol_p(xi2, lambda, p);
            let i_xi_f: C = (0..n).map(|j| C::new(0.0, space.xi[j][f]) * f_hat[j][f]).sum();
            let xi_f: C = (0..n).map(|j| space.xi[j][f] * f_hat[j][f]).sum();
            let rho = ((lambda + (p.mu + p.nu) * xi2) * d_hat[f] - i_xi_f) / sym;
            let lame = lambda + p.mu * xi2;
            let coupling = (p.nu * lambda + p.kappa * xi2) / sym;
            let u = (0..n)
                .map(|j| {
                    let xj = space.xi[j][f];
                    -p.kappa * C::new(0.0, xj) * xi2 * d_hat[f] / sym
                        + (f_hat[j][f] - xj * xi_f * coupling) / lame
                })
                .collect();
            (rho, u)
        })
        .collect();
    let mut rho = Vec::with_capacity(len);
    let mut u = vec![Vec::with_capacity(len); n];
    for (r, uf) in results {
        rho.push(r);
        for (j, v) in uf.into_iter().enumerate() {
            u[j].push(v);
        }
    }
    (rho, u)
}

pub fn solve_whole(
    space: &BoxSpace,
    d: &[C],
    f: &[Vec<C>],
    lambda: C,
    model: &Model,
) -> Result<WholeField> {
    model.check_lambda(lambda)?;
    space.check(d.len())?;
    if f.len() != space.dim() {
        return Err(Error::GridMismatch("momentum data needs N components".into()));
    }
    for c in f {
        space.check(c.len())?;
    }
    let d_hat = space.coefficients(d);
    let f_hat: Vec<Vec<C>> = f.iter().map(|c| space.coefficients(c)).collect();
    let (rho_hat, u_hat) = whole_multipliers(space, &d_hat, &f_hat, lambda, &model.params);
    Ok(WholeField {
        grid: space.grid.clone(),
        rho: space.samples(&rho_hat),
        u: u_hat.iter().map(|c| space.samples(c)).collect(),
    })
}

/// Left-hand sides of the whole-space system in coefficient space.
pub fn whole_operator(
    space: &BoxSpace,
    rho_hat: &[C],
    u_hat: &[Vec<C>],
    lambda: C,
    p: &MaterialParams,
) -> (Vec<C>, Vec<Vec<C>>) {
    let n = space.dim();
    let len = space.grid.len();
    let mut mass = vec![C::default(); len];
    let mut momentum = vec![vec![C::default(); len]; n];
    for f in 0..len {
        let xi2 = space.xi_sq(f);
        let div: C = (0..n).map(|j| C::new(0.0, space.xi[j][f]) * u_hat[j][f]).sum();
        mass[f] = lambda * rho_hat[f] + div;
        for j in 0..n {
            let ixj = C::new(0.0, space.xi[j][f]);
            // lambda u - mu Lap u - nu grad div u - kappa Lap grad rho
            momentum[j][f] = lambda * u_hat[j][f] + p.mu * xi2 * u_hat[j][f] - p.nu * ixj * div
                + p.kappa * xi2 * ixj * rho_hat[f];
        }
    }
    (mass, momentum)
}

pub fn residual_whole(
    space: &BoxSpace,
    sol: &WholeField,
    d: &[C],
    f: &[Vec<C>],
    lambda: C,
    p: &MaterialParams,
) -> ResidualReport {
    let rho_hat = space.coefficients(&sol.rho);
    let u_hat: Vec<Vec<C>> = sol.u.iter().map(|c| space.coefficients(c)).collect();
    let (mass, momentum) = whole_operator(space, &rho_hat, &u_hat, lambda, p);
    let mass = space.samples(&mass);
    let r1: Vec<C> = mass.iter().zip(d).map(|(a, b)| a - b).collect();
    let r2: Vec<Vec<C>> = momentum
        .iter()
        .zip(f)
        .map(|(m, fj)| space.samples(m).iter().zip(fj).map(|(a, b)| a - b).collect())
        .collect();
    let vol = space.grid.cell_volume();
    let w = move |_: usize| vol;
    let rows = vec![
        row_from("mass", &[r1], &[d.to_vec()], &w),
        row_from("momentum", &r2, f, &w),
    ];
    let data_norm = rows.iter().map(|r| r.data_l2 * r.data_l2).sum::<f64>().sqrt();
    ResidualReport::new(rows, data_norm)
}

/// Named group of sampled components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub name: String,
    pub components: Vec<Vec<C>>,
}

/// The listed derivative blocks of a density or velocity field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Family {
    pub blocks: Vec<Block>,
}

impl Family {
    pub fn norm(&self, weight: &dyn Fn(usize) -> f64) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.components.iter())
            .map(|c| c.iter().enumerate().map(|(i, v)| v.norm_sqr() * weight(i)).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    /// All components concatenated, each scaled by `sqrt(weight)`.
    pub fn flatten_weighted(&self, weight: &dyn Fn(usize) -> f64) -> Vec<C> {
        self.blocks
            .iter()
            .flat_map(|b| b.components.iter())
            .flat_map(|c| c.iter().enumerate().map(|(i, v)| v * weight(i).sqrt()))
            .collect()
    }
}

/// All multi-indices of length `order` over `dim` axes, in lexicographic order.
pub fn multi_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..order {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..dim).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// `(grad^3 rho, lambda^{1/2} grad^2 rho, lambda rho)` and
/// `(grad^2 u, lambda^{1/2} grad u, lambda u)`.
pub fn derivative_families(space: &BoxSpace, sol: &WholeField, lambda: C) -> (Family, Family) {
    let n = space.dim();
    let sqrt_l = lambda.sqrt();
    let rho_hat = space.coefficients(&sol.rho);
    let u_hat: Vec<Vec<C>> = sol.u.iter().map(|c| space.coefficients(c)).collect();
    let deriv = |c: &[C], axes: &[usize], scale: C| -> Vec<C> {
        let mut v = space.derivative(c, axes);
        v.iter_mut().for_each(|x| *x *= scale);
        space.samples(&v)
    };
    let one = C::new(1.0, 0.0);
    let s = Family {
        blocks: vec![
            Block {
                name: "grad3".into(),
                components: multi_indices(n, 3).iter().map(|a| deriv(&rho_hat, a, one)).collect(),
            },
            Block {
                name: "sqrt_lambda_grad2".into(),
                components: multi_indices(n, 2)
                    .iter()
                    .map(|a| deriv(&rho_hat, a, sqrt_l))
                    .collect(),
            },
            Block { name: "lambda".into(), components: vec![deriv(&rho_hat, &[], lambda)] },
        ],
    };
    let t = Family {
        blocks: vec![
            Block {
                name: "grad2".into(),
                components: u_hat
                    .iter()
                    .flat_map(|c| multi_indices(n, 2).into_iter().map(move |a| (c, a)))
                    .map(|(c, a)| deriv(c, &a, one))
                    .collect(),
            },
            Block {
                name: "sqrt_lambda_grad".into(),
                components: u_hat
                    .iter()
                    .flat_map(|c| (0..n).map(move |a| (c, a)))
                    .map(|(c, a)| deriv(c, &[a], sqrt_l))
                    .collect(),
            },
            Block {
                name: "lambda".into(),
                components: u_hat.iter().map(|c| deriv(c, &[], lambda)).collect(),
            },
        ],
    };
    (s, t)
}
