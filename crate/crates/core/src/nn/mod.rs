//! Feedforward networks with reverse-mode input and parameter gradients.

mod layer;
mod network;
mod train;
pub mod zoo;

pub use layer::{ConvGeometry, Layer, LayerGrads, LayerSpec};
pub use network::Network;
pub use train::{accuracy, train_toy, EpochStats, TrainConfig, TrainReport};
