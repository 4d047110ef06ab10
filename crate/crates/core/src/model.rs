//! Material parameters, derived spectral constants and the resolvent sector.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical coefficients of the rescaled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    pub mu: f64,
    pub nu: f64,
    pub kappa: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "one")]
    pub rho_ref: f64,
}

fn one() -> f64 {
    1.0
}

impl MaterialParams {
    pub fn new(mu: f64, nu: f64, kappa: f64) -> Self {
        Self { mu, nu, kappa, gamma: 0.0, rho_ref: 1.0 }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// Maps physical unknowns to the rescaled ones: the density is divided by the
    /// reference density and the pressure coefficient is folded into `gamma`.
    pub fn rescale_density(&self, rho: f64) -> f64 {
        rho / self.rho_ref
    }
}

/// A single reason for rejecting a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    NonPositiveCoefficient(&'static str),
    EtaVanishes,
    KappaEqualsMuNu,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveCoefficient(name) => {
                write!(f, "NonPositiveCoefficient({name})")
            }
            Violation::EtaVanishes => write!(f, "EtaVanishes"),
            Violation::KappaEqualsMuNu => write!(f, "KappaEqualsMuNu"),
        }
    }
}

/// Outcome of [`validate`]; empty `failures` means admissible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub failures: Vec<Violation>,
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Inadmissible(self.failures))
        }
    }
}

const ZERO_TOL: f64 = 1e-13;

pub fn eta_w(p: &MaterialParams) -> f64 {
    let a = (p.mu + p.nu) / (2.0 * p.kappa);
    a * a - 1.0 / p.kappa
}

pub fn validate(p: &MaterialParams) -> Verdict {
    let mut failures = Vec::new();
    for (name, v) in [("mu", p.mu), ("nu", p.nu), ("kappa", p.kappa), ("rho_ref", p.rho_ref)] {
        if !(v > 0.0 && v.is_finite()) {
            failures.push(Violation::NonPositiveCoefficient(name));
        }
    }
    if !p.gamma.is_finite() {
        failures.push(Violation::NonPositiveCoefficient("gamma"));
    }
    if !failures.is_empty() {
        return Verdict { failures };
    }
    let eta_scale = ((p.mu + p.nu) / p.kappa).powi(2);
    if eta_w(p).abs() <= ZERO_TOL * eta_scale {
        failures.push(Violation::EtaVanishes);
    }
    if (p.kappa - p.mu * p.nu).abs() <= ZERO_TOL * p.mu * p.nu {
        failures.push(Violation::KappaEqualsMuNu);
    }
    Verdict { failures }
}

/// Discriminant, limiting angle and the two characteristic roots `s1 = s+`, `s2 = s-`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub eta_w: f64,
    pub sigma_w: f64,
    pub s1: Complex64,
    pub s2: Complex64,
}

impl DerivedConstants {
    pub fn s(&self) -> [Complex64; 2] {
        [self.s1, self.s2]
    }
}

pub fn derive_constants(p: &MaterialParams) -> Result<DerivedConstants> {
    validate(p).into_result()?;
    let a = (p.mu + p.nu) / (2.0 * p.kappa);
    let eta = eta_w(p);
    let (s1, s2, sigma_w) = if eta > 0.0 {
        // a - sqrt(eta) suffers cancellation when eta is close to a^2; use Vieta instead.
        let plus = a + eta.sqrt();
        let minus = 1.0 / (p.kappa * plus);
        (Complex64::new(plus, 0.0), Complex64::new(minus, 0.0), 0.0)
    } else {
        let b = (-eta).sqrt();
        (Complex64::new(a, b), Complex64::new(a, -b), b.atan2(a))
    };
    Ok(DerivedConstants { eta_w: eta, sigma_w, s1, s2 })
}

/// The region `|arg lambda| < pi - sigma`, `|lambda| > delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sector {
    pub sigma: f64,
    pub delta: f64,
}

impl Sector {
    pub fn new(sigma: f64, delta: f64) -> Self {
        Self { sigma, delta }
    }

    pub fn contains(&self, lambda: Complex64) -> bool {
        sector_contains(self, lambda)
    }

    /// Largest admissible |arg lambda| (exclusive).
    pub fn half_angle(&self) -> f64 {
        PI - self.sigma
    }
}

pub fn sector_contains(sector: &Sector, lambda: Complex64) -> bool {
    lambda.norm() > sector.delta && lambda.arg().abs() < PI - sector.sigma
}

/// Bundle of parameters plus their derived constants, built once per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Model {
    pub params: MaterialParams,
    pub consts: DerivedConstants,
}

impl Model {
    pub fn new(params: MaterialParams) -> Result<Self> {
        Ok(Self { params, consts: derive_constants(&params)? })
    }

    pub fn mu(&self) -> f64 {
        self.params.mu
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self { params: self.params.with_gamma(gamma), consts: self.consts }
    }

    /// Rejects `lambda` unless it lies strictly inside the open sector of angle `sigma_w`.
    pub fn check_lambda(&self, lambda: Complex64) -> Result<()> {
        let open = Sector::new(self.consts.sigma_w, 0.0);
        if lambda.is_finite() && open.contains(lambda) {
            Ok(())
        } else {
            Err(Error::LambdaOutsideSector { re: lambda.re, im: lambda.im })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_roots_example() {
        let dc = derive_constants(&MaterialParams::new(1.0, 1.0, 2.0)).unwrap();
        assert!((dc.eta_w + 0.25).abs() < 1e-15);
        assert!((dc.sigma_w - PI / 4.0).abs() < 1e-15);
        assert!((dc.s1 - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        assert_eq!(dc.s2, dc.s1.conj());
    }

    #[test]
    fn real_roots_example() {
        let dc = derive_constants(&MaterialParams::new(1.0, 2.0, 1.0)).unwrap();
        assert!((dc.eta_w - 1.25).abs() < 1e-15);
        assert_eq!(dc.sigma_w, 0.0);
        assert!((dc.s1.re - 2.618_033_988_749_895).abs() < 1e-12);
        assert!((dc.s2.re - 0.381_966_011_250_105).abs() < 1e-12);
        assert!((dc.s1 * dc.s2 - 1.0).norm() < 1e-15);
    }

    #[test]
    fn double_failure_is_reported() {
        let v = validate(&MaterialParams::new(1.0, 1.0, 1.0));
        assert_eq!(v.failures, vec![Violation::EtaVanishes, Violation::KappaEqualsMuNu]);
        let v = validate(&MaterialParams::new(-1.0, 1.0, 1.0));
        assert_eq!(v.failures, vec![Violation::NonPositiveCoefficient("mu")]);
        assert!(validate(&MaterialParams::new(1.0, 1.0, 2.0)).is_ok());
    }

    #[test]
    fn sector_membership() {
        let s = Sector::new(PI / 4.0, 0.5);
        assert!(s.contains(Complex64::new(1.0, 0.0)));
        assert!(!s.contains(Complex64::new(-1.0, 0.0)));
        assert!(!s.contains(Complex64::new(0.0, 0.4)));
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let ok: std::result::Result<MaterialParams, _> =
            serde_json::from_str(r#"{"mu":1,"nu":1,"kappa":2,"gamma":0,"rho_ref":1}"#);
        assert!(ok.is_ok());
        let bad: std::result::Result<MaterialParams, _> =
            serde_json::from_str(r#"{"mu":1,"nu":1,"kappa":2,"viscosity":3}"#);
        assert!(bad.is_err());
    }
}
