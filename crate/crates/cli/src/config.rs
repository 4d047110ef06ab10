//! Scenario configuration read from a single JSON document.

use std::path::Path;

use korteweg_core::scan::{CertGrid, ScanGrid, ScanTarget};
use korteweg_core::verification::{FamilyKind, RBoundConfig};
use korteweg_core::{MaterialParams, Sector};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub params: MaterialParams,
    /// Defaults per scenario when absent.
    #[serde(default)]
    pub sector: Option<Sector>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scan: ScanSettings,
    #[serde(default)]
    pub solve: SolveSettings,
    #[serde(default)]
    pub rbound: RBoundSettings,
    #[serde(default)]
    pub probe: ProbeSettings,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSettings {
    pub targets: Vec<ScanTarget>,
    pub grid: ScanGrid,
    /// Also rescan on the refined grid and report the relative change.
    pub refine: bool,
    /// Threshold on the scaled boundary symbols that defines the empirical angle.
    pub sigma_star_threshold: f64,
    /// Certify the standard symbol memberships at `sigma* + certificate_margin`.
    pub certify: bool,
    pub certificate_margin: f64,
    pub certificate_grid: CertGrid,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            targets: vec![ScanTarget::L1, ScanTarget::L2],
            grid: ScanGrid::default(),
            refine: false,
            sigma_star_threshold: 1e-8,
            certify: false,
            certificate_margin: 0.1,
            certificate_grid: CertGrid::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Whole,
    Half,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// Data generated from a known exact solution.
    Manufactured,
    Random,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveSettings {
    pub problem: Problem,
    /// Real and imaginary part of the spectral parameter.
    pub lambda: [f64; 2],
    pub data: DataKind,
    /// Tangential dimension `N - 1`.
    pub tangential_dim: usize,
    pub points: usize,
    pub period: f64,
    pub depth: f64,
    pub box_points: usize,
    /// Normal samples for the reduced problem.
    pub normal_points: usize,
    /// Pick `|lambda|` by doubling until the pressure map contracts (full problem with `gamma != 0`).
    pub auto_lambda: bool,
    pub max_iter: usize,
    pub tol: f64,
    /// Write solution fields as binary plus sidecar into the output directory.
    pub write_fields: bool,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            problem: Problem::Full,
            lambda: [20.0, 3.0],
            data: DataKind::Manufactured,
            tangential_dim: 1,
            points: 16,
            period: 2.0 * std::f64::consts::PI,
            depth: 16.0,
            box_points: 1024,
            normal_points: 64,
            auto_lambda: false,
            max_iter: 64,
            tol: 1e-10,
            write_fields: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RBoundSettings {
    pub families: Vec<(FamilyKind, usize)>,
    pub lambda_max: f64,
    pub m_max: usize,
    pub trials: usize,
    pub tangential_points: usize,
    pub depth: f64,
    pub box_points: usize,
    pub rel_step: f64,
}

impl Default for RBoundSettings {
    fn default() -> Self {
        let base = RBoundConfig::default();
        Self {
            families: vec![(FamilyKind::Density, 0), (FamilyKind::Velocity, 0), (FamilyKind::Density, 1), (FamilyKind::Velocity, 1)],
            lambda_max: base.lambda_max,
            m_max: base.m_max,
            trials: base.trials,
            tangential_points: base.tangential_points,
            depth: base.depth,
            box_points: base.box_points,
            rel_step: base.rel_step,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSettings {
    pub moduli: Vec<f64>,
    /// Argument of every probed `lambda`.
    pub arg: f64,
    pub points: usize,
    pub depth: f64,
    pub box_points: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self { moduli: vec![1.0, 10.0, 1e2, 1e3, 1e4], arg: 0.0, points: 8, depth: 4.0, box_points: 4096 }
    }
}
