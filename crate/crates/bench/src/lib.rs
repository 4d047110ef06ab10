//! Shared inputs for the solver benchmarks.

use std::sync::Arc;

use korteweg_core::field::HalfSpace;
use korteweg_core::resolvent::FullData;
use korteweg_core::verification::{bump_pair, manufactured_data, rng, BumpShape};
use korteweg_core::{Complex64 as C, HalfGrid, MaterialParams, Model, TangentialGrid};

pub fn model() -> Model {
    Model::new(MaterialParams::new(1.0, 1.0, 2.0)).expect("admissible")
}

/// Deterministic smooth samples on a grid of `len` points.
pub fn smooth_samples(len: usize, phase: f64) -> Vec<C> {
    (0..len)
        .map(|i| {
            let t = i as f64 / len as f64 * std::f64::consts::TAU;
            C::new((t + phase).sin(), (2.0 * t - phase).cos())
        })
        .collect()
}

pub fn half_space(points: usize, depth: f64, box_points: usize) -> Arc<HalfSpace> {
    let t = TangentialGrid::new(1, points, std::f64::consts::TAU).expect("grid");
    HalfSpace::new(HalfGrid::new(t, depth, box_points).expect("grid"))
}

/// Manufactured full data at `lambda`.
pub fn full_data(space: &Arc<HalfSpace>, lambda: C, model: &Model) -> FullData {
    let mut r = rng(1);
    let pair = bump_pair(space, BumpShape::default(), &mut r);
    manufactured_data(&pair, lambda, &model.params)
}
