//! Path-integral attribution for small neural networks.
//!
//! Provides a minimal reverse-mode network engine, straight-line path
//! tools, integrated gradients and its variants, integrated decision
//! gradients with adaptive path sampling, perturbation metrics and the
//! experiment drivers built on top of them.

pub mod attribution;
pub mod data;
mod error;
pub mod experiments;
pub mod io;
pub mod metrics;
pub mod nn;
pub mod path;
pub mod sampling;
mod tensor;

pub use attribution::{attribute, AttributionMap, AttributionWarning, Method, MethodConfig};
pub use data::{make_dataset, Dataset, DatasetKind, Sample, SHAPE_CLASSES};
pub use error::{Error, Result};
pub use experiments::{AblationAxis, AblationGrid, ErrorMethod, ErrorReport, PathCase, SaturationReport};
pub use metrics::{CurveKind, MetricConfig, PerturbationCurve};
pub use nn::{Layer, LayerSpec, Network};
pub use path::{DecisionRegion, ImportanceCurve, LogitCurve, StraightLinePath};
pub use sampling::{AdaptiveConfig, SamplingPlan};
pub use tensor::{softmax, Tensor};
