//! Differential operators of the resolvent system, generic over field representations.

use num_complex::Complex64;

use crate::model::MaterialParams;

type C = Complex64;

/// A scalar field on the half-space that can be differentiated exactly.
pub trait Field: Clone {
    /// Space dimension `N`; axis `N - 1` is the normal direction.
    fn dim(&self) -> usize;
    fn diff(&self, axis: usize) -> Self;
    fn scaled(&self, s: C) -> Self;
    /// `self += s * other`.
    fn axpy(&mut self, s: C, other: &Self);
}

fn one() -> C {
    C::new(1.0, 0.0)
}

pub fn combine<F: Field>(terms: &[(C, &F)]) -> F {
    let mut out = terms[0].1.scaled(terms[0].0);
    for &(s, f) in &terms[1..] {
        out.axpy(s, f);
    }
    out
}

pub fn grad<F: Field>(f: &F) -> Vec<F> {
    (0..f.dim()).map(|a| f.diff(a)).collect()
}

pub fn div<F: Field>(u: &[F]) -> F {
    let mut out = u[0].diff(0);
    for (a, c) in u.iter().enumerate().skip(1) {
        out.axpy(one(), &c.diff(a));
    }
    out
}

pub fn laplacian<F: Field>(f: &F) -> F {
    let mut out = f.diff(0).diff(0);
    for a in 1..f.dim() {
        out.axpy(one(), &f.diff(a).diff(a));
    }
    out
}

/// `lambda rho + div u`.
pub fn mass_row<F: Field>(rho: &F, u: &[F], lambda: C) -> F {
    let mut out = div(u);
    out.axpy(lambda, rho);
    out
}

/// `lambda u - mu Lap u - nu grad div u + gamma grad rho - kappa grad Lap rho`.
pub fn momentum_row<F: Field>(rho: &F, u: &[F], lambda: C, p: &MaterialParams) -> Vec<F> {
    let divu = div(u);
    let lap_rho = laplacian(rho);
    (0..rho.dim())
        .map(|j| {
            let mut out = u[j].scaled(lambda);
            out.axpy(C::new(-p.mu, 0.0), &laplacian(&u[j]));
            out.axpy(C::new(-p.nu, 0.0), &divu.diff(j));
            if p.gamma != 0.0 {
                out.axpy(C::new(p.gamma, 0.0), &rho.diff(j));
            }
            out.axpy(C::new(-p.kappa, 0.0), &lap_rho.diff(j));
            out
        })
        .collect()
}

/// `{mu D(u) + (nu - mu) div u I - (gamma - kappa Lap) rho I} n` with `n = -e_N`.
pub fn stress_row<F: Field>(rho: &F, u: &[F], p: &MaterialParams) -> Vec<F> {
    let n = rho.dim();
    let nn = n - 1;
    let mut out: Vec<F> = (0..nn)
        .map(|j| {
            let mut s = u[nn].diff(j);
            s.axpy(one(), &u[j].diff(nn));
            s.scaled(C::new(-p.mu, 0.0))
        })
        .collect();
    let mut last = u[nn].diff(nn).scaled(C::new(2.0 * p.mu, 0.0));
    last.axpy(C::new(p.nu - p.mu, 0.0), &div(u));
    if p.gamma != 0.0 {
        last.axpy(C::new(-p.gamma, 0.0), rho);
    }
    last.axpy(C::new(p.kappa, 0.0), &laplacian(rho));
    out.push(last.scaled(C::new(-1.0, 0.0)));
    out
}

/// `n . grad rho = -d_N rho`.
pub fn neumann_row<F: Field>(rho: &F) -> F {
    rho.diff(rho.dim() - 1).scaled(C::new(-1.0, 0.0))
}

impl Field for crate::modal::ModalField {
    fn dim(&self) -> usize {
        self.grid.dim + 1
    }

    fn diff(&self, axis: usize) -> Self {
        if axis == self.grid.dim {
            self.d_normal()
        } else {
            self.d_tangential(axis)
        }
    }

    fn scaled(&self, s: C) -> Self {
        self.scale(s)
    }

    fn axpy(&mut self, s: C, other: &Self) {
        self.add_assign(other, s)
    }
}
