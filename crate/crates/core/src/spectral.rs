//! Multi-dimensional FFT over row-major buffers and lattice helpers.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type C = Complex64;

/// Integer wavenumber for FFT slot `i` of an axis with `m` points.
pub fn wavenumber(i: usize, m: usize) -> i64 {
    if i < m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

/// Angular frequencies `2 pi k / period` in FFT slot order.
pub fn frequencies(m: usize, period: f64) -> Vec<f64> {
    (0..m).map(|i| 2.0 * PI * wavenumber(i, m) as f64 / period).collect()
}

/// Planned transforms for a fixed row-major shape.
pub struct Transform {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("shape", &self.shape).finish()
    }
}

impl Transform {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn apply(&self, data: &mut [C], axes: &[usize], inverse: bool) {
        assert_eq!(data.len(), self.len(), "buffer does not match transform shape");
        let mut line = Vec::new();
        for &axis in axes {
            let n = self.shape[axis];
            if n == 1 {
                continue;
            }
            let stride: usize = self.shape[axis + 1..].iter().product();
            let outer: usize = self.shape[..axis].iter().product();
            let plan = if inverse { &self.inverse[axis] } else { &self.forward[axis] };
            line.resize(n, C::default());
            let mut scratch = vec![C::default(); plan.get_inplace_scratch_len()];
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    for (k, v) in line.iter_mut().enumerate() {
                        *v = data[base + k * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                }
            }
        }
    }

    /// Samples to coefficients of `sum_k c_k e^{i xi_k . x}` over the given axes.
    pub fn to_coefficients(&self, data: &mut [C], axes: &[usize]) {
        self.apply(data, axes, false);
        let count: usize = axes.iter().map(|&a| self.shape[a]).product();
        let scale = 1.0 / count as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    /// Coefficients back to samples over the given axes.
    pub fn to_samples(&self, data: &mut [C], axes: &[usize]) {
        self.apply(data, axes, true);
    }

    pub fn all_axes(&self) -> Vec<usize> {
        (0..self.shape.len()).collect()
    }
}

/// Row-major multi-index of a flat position.
pub fn unravel(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for a in (0..shape.len()).rev() {
        idx[a] = flat % shape[a];
        flat /= shape[a];
    }
    idx
}
