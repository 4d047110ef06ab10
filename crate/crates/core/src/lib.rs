//! Resolvent solvers for the linearized compressible Navier-Stokes-Korteweg system
//! on the whole space and the half-space.

pub mod error;
pub mod field;
pub mod grid;
pub mod half;
pub mod io;
pub mod kernel;
pub mod modal;
pub mod model;
pub mod ops;
pub mod report;
pub mod resolvent;
pub mod scan;
pub mod spectral;
pub mod symbols;
pub mod verification;
pub mod whole;

pub use error::{Error, Result};
pub use grid::{BoxGrid, HalfGrid, NormalSamples, TangentialGrid};
pub use model::{derive_constants, validate, DerivedConstants, MaterialParams, Model, Sector, Verdict, Violation};
pub use num_complex::Complex64;
