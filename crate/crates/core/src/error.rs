use thiserror::Error;

use crate::model::Violation;

/// Every failure the solvers and scans can report.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("inadmissible parameters: {}", describe(.0))]
    Inadmissible(Vec<Violation>),
    #[error("square-root argument {re} + {im}i lies on the branch cut (-inf, 0]")]
    BranchCutHit { re: f64, im: f64 },
    #[error("scan grid is empty")]
    EmptyGrid,
    #[error("finite-difference step collapsed at |xi'| = {0}")]
    DerivativeStepUnderflow(f64),
    #[error("lambda = {re} + {im}i lies outside the admissible sector")]
    LambdaOutsideSector { re: f64, im: f64 },
    #[error("Lopatinskii matrix is singular at tangential mode {mode}")]
    SingularLopatinskii { mode: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("Neumann iteration diverged after {iterations} steps (last ratio {ratio})")]
    NeumannDiverged { iterations: usize, ratio: f64 },
    #[error("Rademacher average of the inputs vanishes")]
    ZeroDenominator,
    #[error("lambda step leaves the sector at lambda = {re} + {im}i")]
    StepOutsideSector { re: f64, im: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

fn describe(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Numerical failures are distinguished from validation failures by the CLI.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularLopatinskii { .. } | Error::NeumannDiverged { .. }
        )
    }
}
