//! Divided-difference kernels in the normal variable.
//!
//! `div_diff(a, b, x) = (e^{-b x} - e^{-a x}) / (b - a)` switches to the integral form
//! `-x * int_0^1 e^{-(theta b + (1 - theta) a) x} d theta` when the exponents nearly coincide.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::symbols::{FrakSymbols, RootSet};

type C = Complex64;

/// Relative gap below which the quadrature path is used.
pub const EPS_SWITCH: f64 = 1e-4;

const GL_ORDER: usize = 16;

/// Nodes and weights of the 16-point Gauss-Legendre rule on [0, 1].
pub fn gauss_legendre_unit() -> &'static [(f64, f64); GL_ORDER] {
    static RULE: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut rule = [(0.0, 0.0); GL_ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            rule[i] = (0.5 * (1.0 - x), 0.5 * w);
        }
        rule
    })
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: C) -> C {
    let half = (0.5 * z.im).sin();
    C::new(z.re.exp_m1() * z.im.cos() - 2.0 * half * half, z.re.exp() * z.im.sin())
}

pub fn div_diff_direct(a: C, b: C, x: f64) -> C {
    (-a * x).exp() * expm1(-(b - a) * x) / (b - a)
}

pub fn div_diff_quadrature(a: C, b: C, x: f64) -> C {
    let mut acc = C::default();
    for &(theta, w) in gauss_legendre_unit() {
        acc += w * (-(theta * b + (1.0 - theta) * a) * x).exp();
    }
    -x * acc
}

pub fn div_diff(a: C, b: C, x: f64) -> C {
    if (b - a).norm() > EPS_SWITCH * (a.norm() + b.norm()) {
        div_diff_direct(a, b, x)
    } else {
        div_diff_quadrature(a, b, x)
    }
}

/// Kernels `M_0 = (e^{-t2 x} - e^{-t1 x})/(t2 - t1)` and
/// `M_j = r_j (e^{-t_j x} - e^{-omega x})/(t_j - omega)` for `j = 1, 2`.
pub fn kernel_m(j: usize, x: f64, roots: &RootSet, fr: &FrakSymbols) -> C {
    match j {
        0 => div_diff(roots.t1, roots.t2, x),
        _ => fr.r[j - 1] * div_diff(roots.omega, roots.t(j), x),
    }
}

/// Normal derivative through `dM_0 = -t2 M_0 - e^{-t1 x}` and
/// `dM_j = -t_j M_j - r_j e^{-omega x}`.
pub fn kernel_m_derivative(j: usize, x: f64, roots: &RootSet, fr: &FrakSymbols) -> C {
    let m = kernel_m(j, x, roots, fr);
    match j {
        0 => -roots.t2 * m - (-roots.t1 * x).exp(),
        _ => -roots.t(j) * m - fr.r[j - 1] * (-roots.omega * x).exp(),
    }
}
