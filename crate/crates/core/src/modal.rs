//! Fields given per tangential mode as finite sums of closed-form normal profiles.
//!
//! Normal derivatives stay exact: each profile has a closed-form derivative that is again
//! a combination of profiles.

use num_complex::Complex64;
use serde::Serialize;

use crate::grid::TangentialGrid;
use crate::kernel::div_diff;
use crate::spectral::Transform;

type C = Complex64;

/// Normal profile of a single modal term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Profile {
    /// `e^{-a x}`.
    Exp(C),
    /// `(e^{-b x} - e^{-a x}) / (b - a)`, stable for `b` close to `a`.
    Ramp(C, C),
    /// `d^order/dx^order exp(-(x - center)^2 / (2 width^2))`.
    Gauss { center: f64, width: f64, order: u32 },
}

impl Profile {
    pub fn eval(&self, x: f64) -> C {
        match *self {
            Profile::Exp(a) => (-a * x).exp(),
            Profile::Ramp(a, b) => div_diff(a, b, x),
            Profile::Gauss { center, width, order } => {
                let z = (x - center) / width;
                let g = (-0.5 * z * z).exp();
                let (mut h0, mut h1) = (1.0, z);
                let he = match order {
                    0 => 1.0,
                    _ => {
                        for k in 1..order {
                            let h2 = z * h1 - k as f64 * h0;
                            h0 = h1;
                            h1 = h2;
                        }
                        h1
                    }
                };
                let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
                C::new(sign * he * g / width.powi(order as i32), 0.0)
            }
        }
    }

    /// `d/dx` of the profile as a list of `(coefficient, profile)`.
    pub fn derivative(&self) -> Vec<(C, Profile)> {
        match *self {
            Profile::Exp(a) => vec![(-a, *self)],
            Profile::Ramp(a, b) => vec![(-b, *self), (C::new(-1.0, 0.0), Profile::Exp(a))],
            Profile::Gauss { center, width, order } => {
                vec![(C::new(1.0, 0.0), Profile::Gauss { center, width, order: order + 1 })]
            }
        }
    }
}

/// Scalar field `sum_modes e^{i xi'.x'} sum_terms c * profile(x_N)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalField {
    pub grid: TangentialGrid,
    pub modes: Vec<Vec<(C, Profile)>>,
}

impl ModalField {
    pub fn zero(grid: TangentialGrid) -> Self {
        Self { grid, modes: vec![Vec::new(); grid.modes()] }
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.iter().all(|(c, _)| *c == C::default()))
    }

    pub fn push(&mut self, mode: usize, coef: C, profile: Profile) {
        if coef == C::default() {
            return;
        }
        let terms = &mut self.modes[mode];
        if let Some(t) = terms.iter_mut().find(|t| t.1 == profile) {
            t.0 += coef;
        } else {
            terms.push((coef, profile));
        }
    }

    pub fn scale(&self, s: C) -> Self {
        let mut out = self.clone();
        for t in out.modes.iter_mut().flatten() {
            t.0 *= s;
        }
        out
    }

    pub fn add_assign(&mut self, other: &ModalField, s: C) {
        for (mode, terms) in other.modes.iter().enumerate() {
            for &(c, p) in terms {
                self.push(mode, s * c, p);
            }
        }
    }

    /// Derivative along tangential axis `axis`.
    pub fn d_tangential(&self, axis: usize) -> Self {
        let mut out = self.clone();
        for (mode, terms) in out.modes.iter_mut().enumerate() {
            if terms.is_empty() {
                continue;
            }
            let ik = C::new(0.0, self.grid.xi(mode)[axis]);
            terms.iter_mut().for_each(|t| t.0 *= ik);
            terms.retain(|t| t.0 != C::default());
        }
        out
    }

    pub fn d_normal(&self) -> Self {
        let mut out = Self::zero(self.grid);
        for (mode, terms) in self.modes.iter().enumerate() {
            for &(c, p) in terms {
                for (dc, dp) in p.derivative() {
                    out.push(mode, c * dc, dp);
                }
            }
        }
        out
    }

    /// Tangential coefficient of each mode at normal coordinate `x`.
    pub fn coefficients_at(&self, x: f64) -> Vec<C> {
        self.modes.iter().map(|terms| terms.iter().map(|(c, p)| c * p.eval(x)).sum()).collect()
    }
}

/// Samples several modal fields on `tangential grid x normal`, sharing profile evaluations.
///
/// Output arrays are row-major with the normal coordinate fastest.
pub fn sample_modal(fields: &[&ModalField], normal: &[f64], transform: &Transform) -> Vec<Vec<C>> {
    let Some(first) = fields.first() else {
        return Vec::new();
    };
    let grid = first.grid;
    let nx = normal.len();
    let modes = grid.modes();
    let mut spectra = vec![vec![C::default(); modes * nx]; fields.len()];
    let mut cache: Vec<(Profile, Vec<C>)> = Vec::new();
    for mode in 0..modes {
        cache.clear();
        for (fi, field) in fields.iter().enumerate() {
            for &(c, p) in &field.modes[mode] {
                let values = match cache.iter().position(|e| e.0 == p) {
                    Some(k) => &cache[k].1,
                    None => {
                        cache.push((p, normal.iter().map(|&x| p.eval(x)).collect()));
                        &cache.last().unwrap().1
                    }
                };
                let out = &mut spectra[fi][mode * nx..(mode + 1) * nx];
                for (o, v) in out.iter_mut().zip(values) {
                    *o += c * v;
                }
            }
        }
    }
    let axes: Vec<usize> = (0..grid.dim).collect();
    for s in spectra.iter_mut() {
        transform.to_samples(s, &axes);
    }
    spectra
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_derivatives_match_finite_differences() {
        for order in 0..4 {
            let p = Profile::Gauss { center: 1.0, width: 0.4, order };
            let dp = Profile::Gauss { center: 1.0, width: 0.4, order: order + 1 };
            let h = 1e-5;
            for &x in &[0.3, 1.1, 1.7] {
                let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
                assert!((fd - dp.eval(x)).norm() < 1e-5 * (1.0 + dp.eval(x).norm()));
            }
        }
    }

    #[test]
    fn ramp_derivative_rule() {
        let p = Profile::Ramp(C::new(1.0, 0.2), C::new(1.5, -0.1));
        let h = 1e-6;
        let x = 0.8;
        let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
        let exact: C = p.derivative().iter().map(|(c, q)| c * q.eval(x)).sum();
        assert!((fd - exact).norm() < 1e-8);
    }
}
