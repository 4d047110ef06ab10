//! Sampling grids: the periodic box, the tangential lattice and normal samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{frequencies, unravel, wavenumber};

/// Periodic box; the last axis is the normal direction when the box doubles a half-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    pub points: Vec<usize>,
    pub period: Vec<f64>,
}

impl BoxGrid {
    /// `dim` axes with `m` points and period `l` each.
    pub fn cube(dim: usize, m: usize, l: f64) -> Result<Self> {
        Self::new(vec![m; dim], vec![l; dim])
    }

    pub fn new(points: Vec<usize>, period: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points.len() != period.len() {
            return Err(Error::GridMismatch("box needs at least two axes".into()));
        }
        if points.iter().any(|&m| m < 2 || !m.is_power_of_two()) {
            return Err(Error::GridMismatch("points per axis must be a power of two".into()));
        }
        if period.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::GridMismatch("periods must be positive".into()));
        }
        Ok(Self { points, period })
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.period[axis] / self.points[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Per-axis angular frequencies in FFT order.
    pub fn frequencies(&self) -> Vec<Vec<f64>> {
        self.points.iter().zip(&self.period).map(|(&m, &l)| frequencies(m, l)).collect()
    }

    /// Physical coordinates of a flat index, with each axis on `[0, period)`.
    pub fn coordinates(&self, flat: usize) -> Vec<f64> {
        unravel(flat, &self.points)
            .iter()
            .enumerate()
            .map(|(a, &i)| i as f64 * self.spacing(a))
            .collect()
    }
}

/// Lattice of tangential frequencies `xi'_k = (2 pi / L) k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentialGrid {
    pub dim: usize,
    pub points: usize,
    pub period: f64,
}

impl TangentialGrid {
    pub fn new(dim: usize, points: usize, period: f64) -> Result<Self> {
        if dim == 0 || points < 2 || !points.is_power_of_two() || !(period > 0.0) {
            return Err(Error::GridMismatch(format!(
                "invalid tangential grid ({dim} axes, {points} points, period {period})"
            )));
        }
        Ok(Self { dim, points, period })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points; self.dim]
    }

    pub fn modes(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn wavenumbers(&self, mode: usize) -> Vec<i64> {
        unravel(mode, &self.shape()).iter().map(|&i| wavenumber(i, self.points)).collect()
    }

    pub fn xi(&self, mode: usize) -> Vec<f64> {
        let scale = 2.0 * std::f64::consts::PI / self.period();
        self.wavenumbers(mode).iter().map(|&k| scale * k as f64).collect()
    }

    /// Flat index of an integer wavevector, if it lies on the lattice.
    pub fn mode_of(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let half = (self.points / 2) as i64;
        let mut flat = 0;
        for &kj in k {
            if kj < -half || kj >= half {
                return None;
            }
            let slot = if kj < 0 { kj + self.points as i64 } else { kj } as usize;
            flat = flat * self.points + slot;
        }
        Some(flat)
    }

    pub fn spacing(&self) -> f64 {
        self.period() / self.points as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }
}

/// Strictly increasing normal coordinates starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalSamples(Vec<f64>);

impl NormalSamples {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.first() != Some(&0.0) {
            return Err(Error::GridMismatch("first normal sample must be 0".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::GridMismatch("normal samples must increase strictly".into()));
        }
        Ok(Self(x))
    }

    /// `count` points on `[0, depth]` clustered at the boundary.
    pub fn clustered(depth: f64, count: usize) -> Self {
        let n = (count - 1) as f64;
        let x = (0..count)
            .map(|i| depth * (1.0 - (std::f64::consts::FRAC_PI_2 * i as f64 / n).cos()))
            .collect();
        Self(x)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for NormalSamples {
    fn default() -> Self {
        Self::clustered(10.0, 129)
    }
}

/// Truncated half-space `[0, L)^{N-1} x [0, H]` whose periodic double is the box
/// `[0, L)^{N-1} x [-H, H)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfGrid {
    pub tangential: TangentialGrid,
    pub depth: f64,
    pub box_normal_points: usize,
}

impl HalfGrid {
    pub fn new(tangential: TangentialGrid, depth: f64, box_normal_points: usize) -> Result<Self> {
        if box_normal_points < 4 || !box_normal_points.is_power_of_two() || !(depth > 0.0) {
            return Err(Error::GridMismatch("invalid normal resolution".into()));
        }
        Ok(Self { tangential, depth, box_normal_points })
    }

    pub fn dim(&self) -> usize {
        self.tangential.dim + 1
    }

    /// Nodes `x_N = k * h` for `k = 0 ..= box_normal_points / 2`.
    pub fn normal_nodes(&self) -> Vec<f64> {
        let h = self.normal_spacing();
        (0..=self.box_normal_points / 2).map(|k| k as f64 * h).collect()
    }

    pub fn normal_count(&self) -> usize {
        self.box_normal_points / 2 + 1
    }

    pub fn normal_spacing(&self) -> f64 {
        2.0 * self.depth / self.box_normal_points as f64
    }

    pub fn box_grid(&self) -> BoxGrid {
        let mut points = self.tangential.shape();
        points.push(self.box_normal_points);
        let mut period = vec![self.tangential.period(); self.tangential.dim];
        period.push(2.0 * self.depth);
        BoxGrid { points, period }
    }

    /// Shape of half-space sample arrays: tangential axes then normal nodes.
    pub fn sample_shape(&self) -> Vec<usize> {
        let mut s = self.tangential.shape();
        s.push(self.normal_count());
        s
    }

    pub fn sample_len(&self) -> usize {
        self.tangential.modes() * self.normal_count()
    }

    /// Quadrature weights for discrete L2 norms: trapezoid in the normal direction.
    pub fn normal_weights(&self) -> Vec<f64> {
        let h = self.normal_spacing();
        let n = self.normal_count();
        (0..n).map(|k| if k == 0 || k == n - 1 { 0.5 * h } else { h }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_round_trip() {
        let t = TangentialGrid::new(2, 8, 2.0 * std::f64::consts::PI).unwrap();
        for mode in 0..t.modes() {
            assert_eq!(t.mode_of(&t.wavenumbers(mode)), Some(mode));
        }
        assert_eq!(t.xi(t.mode_of(&[-4, 3]).unwrap()), vec![-4.0, 3.0]);
    }

    #[test]
    fn half_grid_layout() {
        let t = TangentialGrid::new(1, 8, 1.0).unwrap();
        let g = HalfGrid::new(t, 2.0, 16).unwrap();
        let nodes = g.normal_nodes();
        assert_eq!(nodes.len(), 9);
        assert_eq!(*nodes.last().unwrap(), 2.0);
        assert_eq!(g.box_grid().period, vec![1.0, 4.0]);
        assert!(NormalSamples::new(vec![0.0, 0.5, 0.5]).is_err());
        let d = NormalSamples::default();
        assert_eq!(d.len(), 129);
        assert!((d.as_slice()[128] - 10.0).abs() < 1e-12);
    }
}
