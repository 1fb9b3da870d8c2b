//! Shared fixtures for the benchmarks.

use idg_core::nn::zoo;
use idg_core::{Network, StraightLinePath, Tensor};

/// Untrained toy CNN and a deterministic textured input of the given side.
pub fn toy_fixture(side: usize) -> (Network, StraightLinePath) {
    let net = zoo::toy_cnn(side, 3, 1).expect("side is a multiple of 8");
    let data = (0..side * side).map(|i| ((i * 37) % 255) as f64 / 255.0).collect();
    let image = Tensor::new(vec![1, side, side], data).expect("shape matches data");
    (net, StraightLinePath::from_black(image))
}
