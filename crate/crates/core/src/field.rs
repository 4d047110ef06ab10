//! Half-space fields stored as a periodic box part plus a modal part.
//!
//! The box part lives on the doubled box `[0, 2H)` in the normal direction and is
//! differentiated spectrally; the modal part carries closed-form normal profiles.
//! Both are sampled on the half nodes `x_N = k h`, `k = 0 ..= n_box / 2`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::grid::HalfGrid;
use crate::modal::{sample_modal, ModalField};
use crate::ops::Field;
use crate::spectral::Transform;
use crate::whole::BoxSpace;

type C = Complex64;

/// Grids and planned transforms shared by every field of one half-space problem.
#[derive(Debug)]
pub struct HalfSpace {
    pub grid: HalfGrid,
    pub boxes: BoxSpace,
    nodes: Vec<f64>,
    sample_transform: Transform,
    weights: Vec<f64>,
}

impl HalfSpace {
    pub fn new(grid: HalfGrid) -> Arc<Self> {
        let boxes = BoxSpace::new(grid.box_grid());
        let sample_transform = Transform::new(&grid.sample_shape());
        let area = grid.tangential.cell_area();
        let wn = grid.normal_weights();
        let weights = (0..grid.sample_len()).map(|i| area * wn[i % wn.len()]).collect();
        Arc::new(Self { nodes: grid.normal_nodes(), grid, boxes, sample_transform, weights })
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weight of each half-space sample.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn norm(&self, samples: &[C]) -> f64 {
        samples.iter().zip(&self.weights).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt()
    }

    /// Even reflection of half-node samples onto the box.
    pub fn extend_even(&self, half: &[C]) -> Vec<C> {
        self.extend(half, |k, n| Some(if k <= n / 2 { k } else { n - k }))
    }

    /// Zero extension of half-node samples onto the box.
    pub fn extend_zero(&self, half: &[C]) -> Vec<C> {
        self.extend(half, |k, n| (k <= n / 2).then_some(k))
    }

    fn extend(&self, half: &[C], source: impl Fn(usize, usize) -> Option<usize>) -> Vec<C> {
        let n = self.grid.box_normal_points;
        let nh = self.grid.normal_count();
        let modes = self.grid.tangential.modes();
        let mut out = vec![C::default(); modes * n];
        for t in 0..modes {
            for k in 0..n {
                if let Some(s) = source(k, n) {
                    out[t * n + k] = half[t * nh + s];
                }
            }
        }
        out
    }

    /// Box samples restricted to the half nodes.
    pub fn restrict(&self, boxed: &[C]) -> Vec<C> {
        let n = self.grid.box_normal_points;
        let nh = self.grid.normal_count();
        let modes = self.grid.tangential.modes();
        let mut out = Vec::with_capacity(modes * nh);
        for t in 0..modes {
            out.extend_from_slice(&boxed[t * n..t * n + nh]);
        }
        out
    }

    pub fn zero(self: &Arc<Self>) -> HalfField {
        HalfField { space: Arc::clone(self), boxed: None, modal: ModalField::zero(self.grid.tangential) }
    }

    pub fn from_modal(self: &Arc<Self>, modal: ModalField) -> HalfField {
        HalfField { space: Arc::clone(self), boxed: None, modal }
    }

    pub fn from_box(self: &Arc<Self>, coefficients: Vec<C>) -> HalfField {
        HalfField {
            space: Arc::clone(self),
            boxed: Some(coefficients),
            modal: ModalField::zero(self.grid.tangential),
        }
    }

    /// Box coefficients of half-node samples after the given extension.
    pub fn box_coefficients(&self, half: &[C], even: bool) -> Vec<C> {
        let ext = if even { self.extend_even(half) } else { self.extend_zero(half) };
        self.boxes.coefficients(&ext)
    }

    /// Samples every field on the half nodes.
    pub fn sample(&self, fields: &[&HalfField]) -> Vec<Vec<C>> {
        let modal: Vec<&ModalField> = fields.iter().map(|f| &f.modal).collect();
        let mut out = sample_modal(&modal, &self.nodes, &self.sample_transform);
        if out.is_empty() {
            return out;
        }
        for (o, f) in out.iter_mut().zip(fields) {
            if let Some(c) = &f.boxed {
                let part = self.restrict(&self.boxes.samples(c));
                o.iter_mut().zip(part).for_each(|(a, b)| *a += b);
            }
        }
        out
    }
}

/// Scalar field on the half-space with exact derivatives of both parts.
#[derive(Debug, Clone)]
pub struct HalfField {
    pub space: Arc<HalfSpace>,
    /// Spectral coefficients on the doubled box, `None` when zero.
    pub boxed: Option<Vec<C>>,
    pub modal: ModalField,
}

impl HalfField {
    pub fn samples(&self) -> Vec<C> {
        self.space.sample(&[self]).pop().unwrap_or_default()
    }

    /// Tangential Fourier coefficients of the trace at `x_N = 0`.
    pub fn trace(&self) -> Vec<C> {
        let mut out = self.modal.coefficients_at(0.0);
        if let Some(c) = &self.boxed {
            let n = self.space.grid.box_normal_points;
            for (t, o) in out.iter_mut().enumerate() {
                *o += c[t * n..(t + 1) * n].iter().sum::<C>();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.modal.is_zero()
            && self.boxed.as_ref().map_or(true, |c| c.iter().all(|v| *v == C::default()))
    }
}

impl Field for HalfField {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn diff(&self, axis: usize) -> Self {
        Self {
            space: Arc::clone(&self.space),
            boxed: self.boxed.as_ref().map(|c| self.space.boxes.derivative(c, &[axis])),
            modal: self.modal.diff(axis),
        }
    }

    fn scaled(&self, s: C) -> Self {
        Self {
            space: Arc::clone(&self.space),
            boxed: self.boxed.as_ref().map(|c| c.iter().map(|v| v * s).collect()),
            modal: self.modal.scale(s),
        }
    }

    fn axpy(&mut self, s: C, other: &Self) {
        if let Some(o) = &other.boxed {
            match &mut self.boxed {
                Some(c) => c.iter_mut().zip(o).for_each(|(a, b)| *a += s * b),
                None => self.boxed = Some(o.iter().map(|b| s * b).collect()),
            }
        }
        self.modal.add_assign(&other.modal, s);
    }
}
