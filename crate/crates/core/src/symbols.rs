//! Spectral symbols of the whole-space and half-space problems.
//!
//! Everything here is evaluated pointwise in `(xi', lambda)`. The boundary symbols use
//! the eliminated forms in which neither `1/lambda` nor `1/(t2 - t1)` appears.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DerivedConstants, MaterialParams, Model};

type C = Complex64;

/// Principal square root that refuses arguments on the closed negative real axis.
pub fn principal_sqrt(z: C) -> Result<C> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::BranchCutHit { re: z.re, im: z.im });
    }
    Ok(z.sqrt())
}

/// `sqrt(|xi'|^2 + lambda / mu)`.
pub fn omega_lambda(xi_prime_sq: f64, lambda: C, mu: f64) -> Result<C> {
    principal_sqrt(xi_prime_sq + lambda / mu)
}

/// `t_j = sqrt(|xi'|^2 + s_j lambda)` for `j = 1, 2`.
pub fn roots_t(xi_prime_sq: f64, lambda: C, dc: &DerivedConstants) -> Result<(C, C)> {
    Ok((
        principal_sqrt(xi_prime_sq + dc.s1 * lambda)?,
        principal_sqrt(xi_prime_sq + dc.s2 * lambda)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootSet {
    pub omega: C,
    pub t1: C,
    pub t2: C,
}

impl RootSet {
    pub fn new(xi_prime_sq: f64, lambda: C, model: &Model) -> Result<Self> {
        let omega = omega_lambda(xi_prime_sq, lambda, model.mu())?;
        let (t1, t2) = roots_t(xi_prime_sq, lambda, &model.consts)?;
        Ok(Self { omega, t1, t2 })
    }

    pub fn t(&self, j: usize) -> C {
        if j == 1 {
            self.t1
        } else {
            self.t2
        }
    }
}

/// `lambda^2 + (mu + nu) lambda |xi|^2 + kappa |xi|^4`.
pub fn whole_space_symbol_p(xi_sq: f64, lambda: C, p: &MaterialParams) -> C {
    lambda * lambda + (p.mu + p.nu) * lambda * xi_sq + p.kappa * xi_sq * xi_sq
}

/// Roots of `P` as a polynomial in `lambda`: `-kappa s_j |xi|^2`.
pub fn whole_space_lambda_roots(xi_sq: f64, p: &MaterialParams, dc: &DerivedConstants) -> (C, C) {
    (-p.kappa * dc.s1 * xi_sq, -p.kappa * dc.s2 * xi_sq)
}

/// Characteristic polynomial of the normal ODE, whose roots are `+-t1, +-t2`.
pub fn characteristic_poly(t: C, xi_prime_sq: f64, lambda: C, p: &MaterialParams) -> C {
    let r = t * t - xi_prime_sq;
    lambda * lambda - lambda * (p.mu + p.nu) * r + p.kappa * r * r
}

/// Boundary symbol `(omega^2 + |xi'|^2)^2 - 4 t_j omega |xi'|^2`, written as
/// `(lambda/mu)^2 - 4 |xi'|^2 omega (t_j - omega)` with `t_j - omega` eliminated.
fn stress_symbol(k2: f64, lambda: C, omega: C, tj: C, sj: C, mu: f64) -> C {
    let lm = lambda / mu;
    let tj_minus_omega = (sj - 1.0 / mu) * lambda / (tj + omega);
    lm * lm - 4.0 * k2 * omega * tj_minus_omega
}

/// The 2x2 boundary system together with its adjugate entries and determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lopatinskii {
    pub matrix: [[C; 2]; 2],
    pub l11: C,
    pub l12: C,
    pub l21: C,
    pub l22: C,
    pub det_direct: C,
    pub det_factored: C,
}

pub fn lopatinskii(xi_prime: &[f64], lambda: C, model: &Model) -> Result<Lopatinskii> {
    let k2: f64 = xi_prime.iter().map(|x| x * x).sum();
    let r = RootSet::new(k2, lambda, model)?;
    let fr = FrakSymbols::with_roots(k2, lambda, &r, model);
    Ok(lopatinskii_with(k2, lambda, &r, &fr, model))
}

pub(crate) fn lopatinskii_with(
    k2: f64,
    lambda: C,
    r: &RootSet,
    fr: &FrakSymbols,
    model: &Model,
) -> Lopatinskii {
    let mu = model.mu();
    let (s1, s2) = (model.consts.s1, model.consts.s2);
    let b1 = stress_symbol(k2, lambda, r.omega, r.t1, s1, mu);
    let b2 = stress_symbol(k2, lambda, r.omega, r.t2, s2, mu);
    // t_j^2 - |xi'|^2 = s_j lambda exactly.
    let matrix = [[r.t2 * b1, r.t1 * b2], [s1 * lambda, s2 * lambda]];
    let l11 = matrix[1][1];
    let l12 = -matrix[0][1];
    let l21 = -matrix[1][0];
    let l22 = matrix[0][0];
    let det_direct = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let det_factored = lambda * fr.t2_minus_t1 * fr.l1 / (r.t1 * (r.t1 + r.omega));
    Lopatinskii { matrix, l11, l12, l21, l22, det_direct, det_factored }
}

/// Raw (uneliminated) entries, used only as an oracle for the eliminated forms.
pub fn lopatinskii_raw_matrix(k2: f64, r: &RootSet) -> [[C; 2]; 2] {
    let q = r.omega * r.omega + k2;
    let b = |t: C| q * q - 4.0 * t * r.omega * k2;
    [[r.t2 * b(r.t1), r.t1 * b(r.t2)], [r.t1 * r.t1 - k2, r.t2 * r.t2 - k2]]
}

/// The auxiliary boundary symbols in their cancellation-free forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrakSymbols {
    pub m: [C; 2],
    pub p: [C; 2],
    pub q: [C; 2],
    pub l: [C; 2],
    pub a: C,
    pub b: C,
    pub r: [C; 2],
    pub l1: C,
    pub t2_minus_t1: C,
}

impl FrakSymbols {
    pub fn new(xi_prime_sq: f64, lambda: C, model: &Model) -> Result<Self> {
        let roots = RootSet::new(xi_prime_sq, lambda, model)?;
        Ok(Self::with_roots(xi_prime_sq, lambda, &roots, model))
    }

    pub fn with_roots(k2: f64, lambda: C, roots: &RootSet, model: &Model) -> Self {
        let mu = model.mu();
        let inv_mu = 1.0 / mu;
        let s = [model.consts.s1, model.consts.s2];
        let t = [roots.t1, roots.t2];
        let w = roots.omega;
        let tsum = t[0] + t[1];
        // t1^2 + t1 t2 + t2^2 - |xi'|^2 with the squares replaced by |xi'|^2 + s_j lambda.
        let quad = k2 + (s[0] + s[1]) * lambda + t[0] * t[1];
        let ds = s[1] - s[0];
        let mut m = [C::default(); 2];
        let mut p = [C::default(); 2];
        let mut q = [C::default(); 2];
        let mut l = [C::default(); 2];
        let mut r = [C::default(); 2];
        for j in 0..2 {
            let sj = s[j];
            let tj = t[j];
            let tw = tj + w;
            m[j] = inv_mu * inv_mu * lambda * tw - 4.0 * (sj - inv_mu) * k2 * w;
            p[j] = (4.0 * sj - 3.0 * inv_mu) * w + inv_mu * tj;
            q[j] = (2.0 * sj - inv_mu) * w + inv_mu * tj;
            l[j] = inv_mu * inv_mu * lambda * tj * tw * quad
                + 4.0 * w * k2 * (sj * tj * w * tw - (sj - inv_mu) * t[0] * t[1] * tsum);
            r[j] = (sj - inv_mu) * tsum / (ds * tw);
        }
        Self {
            m,
            p,
            q,
            l,
            a: s[0] * s[1] * tsum / ds,
            b: tsum / ds,
            r,
            l1: l[0],
            t2_minus_t1: ds * lambda / tsum,
        }
    }
}

/// Quotient form `lambda^{-1} (t_j + omega){(omega^2+|xi'|^2)^2 - 4 t_j omega |xi'|^2}`.
pub fn m_quotient_form(k2: f64, lambda: C, roots: &RootSet, j: usize) -> C {
    let q = roots.omega * roots.omega + k2;
    let tj = roots.t(j);
    (tj + roots.omega) * (q * q - 4.0 * tj * roots.omega * k2) / lambda
}
