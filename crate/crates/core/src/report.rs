use serde::Serialize;

use num_complex::Complex64;

/// Residual of one equation row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowResidual {
    pub row: String,
    pub max_abs: f64,
    pub l2: f64,
    pub data_l2: f64,
}

impl RowResidual {
    pub fn relative(&self, scale: f64) -> f64 {
        if scale > 0.0 {
            self.l2 / scale
        } else {
            self.l2
        }
    }
}

/// Residual norms of every row of a system, with the data scale used for relative errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub rows: Vec<RowResidual>,
    pub data_norm: f64,
    pub max_relative: f64,
}

impl ResidualReport {
    pub fn new(rows: Vec<RowResidual>, data_norm: f64) -> Self {
        let scale = if data_norm > 0.0 { data_norm } else { 1.0 };
        let max_relative = rows.iter().map(|r| r.l2 / scale).fold(0.0, f64::max);
        Self { rows, data_norm, max_relative }
    }

    pub fn row(&self, name: &str) -> Option<&RowResidual> {
        self.rows.iter().find(|r| r.row == name)
    }
}

/// Weighted discrete L2 norm.
pub fn weighted_l2(values: &[Complex64], weight: impl Fn(usize) -> f64) -> f64 {
    values.iter().enumerate().map(|(i, v)| v.norm_sqr() * weight(i)).sum::<f64>().sqrt()
}

pub fn max_abs(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub(crate) fn row_from(
    name: &str,
    residual: &[Vec<Complex64>],
    data: &[Vec<Complex64>],
    weight: &dyn Fn(usize) -> f64,
) -> RowResidual {
    let l2 = |comps: &[Vec<Complex64>]| {
        comps.iter().map(|c| weighted_l2(c, weight).powi(2)).sum::<f64>().sqrt()
    };
    RowResidual {
        row: name.to_string(),
        max_abs: residual.iter().map(|c| max_abs(c)).fold(0.0, f64::max),
        l2: l2(residual),
        data_l2: l2(data),
    }
}
