//! Path-integral attribution over uniform left-endpoint grids.
//!
//! All methods sample `alpha = k/m` for `k = 0..m`, the same left-endpoint
//! convention used by the adaptive sampler.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::write_tensor_csv;
use crate::nn::Network;
use crate::path::{path_point, PathPoint, StraightLinePath};
use crate::sampling::{self, AdaptiveConfig};
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Raw input gradient at the input.
    Grad,
    Ig,
    LeftIg,
    Idg,
    IdgAdaptive,
    IgAdaptive,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Grad,
        Method::Ig,
        Method::LeftIg,
        Method::Idg,
        Method::IdgAdaptive,
        Method::IgAdaptive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Grad => "grad",
            Method::Ig => "ig",
            Method::LeftIg => "lig",
            Method::Idg => "idg",
            Method::IdgAdaptive => "idg-as",
            Method::IgAdaptive => "ig-as",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::argument(format!("unknown method `{s}`, expected one of {}", valid.join(", ")))
            })
    }
}

/// Raised when a method could not run as configured and used a fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributionWarning {
    /// The logit does not grow along the path; the full uniform path was used.
    NonPositiveGrowth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributionMap {
    pub values: Tensor,
    pub method: Method,
    /// Gradient evaluations used for integration.
    pub steps: usize,
    pub class_index: usize,
    pub warning: Option<AttributionWarning>,
}

impl AttributionMap {
    pub fn to_csv(&self) -> String {
        write_tensor_csv(&self.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConfig {
    /// Uniform step count `m`.
    pub steps: usize,
    /// Left-IG truncation level.
    pub tau: f64,
    pub adaptive: AdaptiveConfig,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            steps: 50,
            tau: 0.9,
            adaptive: AdaptiveConfig { regions: 50, steps: 50 },
        }
    }
}

pub fn attribute(
    method: Method,
    net: &Network,
    path: &StraightLinePath,
    class_index: usize,
    cfg: &MethodConfig,
) -> Result<AttributionMap> {
    match method {
        Method::Grad => gradient(net, path.input(), class_index),
        Method::Ig => integrated_gradients(net, path, class_index, cfg.steps),
        Method::LeftIg => left_ig(net, path, class_index, cfg.steps, cfg.tau),
        Method::Idg => idg_uniform(net, path, class_index, cfg.steps),
        Method::IdgAdaptive => sampling::idg_adaptive(net, path, class_index, &cfg.adaptive),
        Method::IgAdaptive => sampling::ig_adaptive(net, path, class_index, &cfg.adaptive),
    }
}

pub fn gradient(net: &Network, x: &Tensor, class_index: usize) -> Result<AttributionMap> {
    Ok(AttributionMap {
        values: net.grad_input(x, class_index)?,
        method: Method::Grad,
        steps: 1,
        class_index,
        warning: None,
    })
}

/// A quadrature node on the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub alpha: f64,
    pub weight: f64,
}

pub(crate) fn uniform_nodes(m: usize) -> Vec<Node> {
    let w = 1.0 / m as f64;
    (0..m)
        .map(|k| Node {
            alpha: k as f64 / m as f64,
            weight: w,
        })
        .collect()
}

fn check_steps(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::argument("step count must be at least 1"));
    }
    Ok(())
}

/// Contribution of one node: `(x - x') * dF/dx * weight`, further scaled by
/// `IF(alpha)` when `importance` is set.
pub fn step_contribution(point: &PathPoint, delta: &Tensor, weight: f64, importance: bool) -> Tensor {
    let factor = step_factor(point, weight, importance);
    let data = delta
        .data()
        .iter()
        .zip(point.gradient.data())
        .map(|(d, g)| d * g * factor)
        .collect();
    Tensor::from_parts(delta.shape().to_vec(), data)
}

fn step_factor(point: &PathPoint, weight: f64, importance: bool) -> f64 {
    if importance {
        point.importance * weight
    } else {
        weight
    }
}

fn accumulate(acc: &mut [f64], point: &PathPoint, delta: &Tensor, weight: f64, importance: bool) {
    let factor = step_factor(point, weight, importance);
    for ((a, d), g) in acc.iter_mut().zip(delta.data()).zip(point.gradient.data()) {
        *a += d * g * factor;
    }
}

/// Weighted sum of per-node contributions along `path`.
pub(crate) fn path_sum(
    net: &Network,
    path: &StraightLinePath,
    class_index: usize,
    nodes: &[Node],
    importance: bool,
) -> Result<Tensor> {
    let delta = path.delta();
    let mut acc = vec![0.0; delta.len()];
    for node in nodes {
        let point = path_point(net, path, class_index, node.alpha)?;
        accumulate(&mut acc, &point, delta, node.weight, importance);
    }
    finish(delta, acc)
}

fn finish(delta: &Tensor, acc: Vec<f64>) -> Result<Tensor> {
    let t = Tensor::from_parts(delta.shape().to_vec(), acc);
    if !t.is_finite() {
        return Err(Error::NonFinite("attribution"));
    }
    Ok(t)
}

pub fn integrated_gradients(
    net: &Network,
    path: &StraightLinePath,
    class_index: usize,
    m: usize,
) -> Result<AttributionMap> {
    check_steps(m)?;
    Ok(AttributionMap {
        values: path_sum(net, path, class_index, &uniform_nodes(m), false)?,
        method: Method::Ig,
        steps: m,
        class_index,
        warning: None,
    })
}

/// IG truncated at the first grid alpha whose logit reaches
/// `F(0) + tau * (F(1) - F(0))`.
pub fn left_ig(
    net: &Network,
    path: &StraightLinePath,
    class_index: usize,
    m: usize,
    tau: f64,
) -> Result<AttributionMap> {
    check_steps(m)?;
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::argument(format!("tau must be in (0, 1], got {tau}")));
    }
    let nodes = uniform_nodes(m);
    let points = nodes
        .iter()
        .map(|n| path_point(net, path, class_index, n.alpha))
        .collect::<Result<Vec<_>>>()?;
    let start = points[0].logit;
    let end = net.output(path.input(), class_index)?;
    let growth = end - start;

    let (kept, warning) = if growth <= 0.0 {
        (m, Some(AttributionWarning::NonPositiveGrowth))
    } else if tau >= 1.0 {
        (m, None)
    } else {
        let threshold = start + tau * growth;
        let cut = points.iter().position(|p| p.logit >= threshold).map_or(m, |k| k + 1);
        (cut, None)
    };

    let delta = path.delta();
    let mut acc = vec![0.0; delta.len()];
    for (point, node) in points.iter().zip(&nodes).take(kept) {
        accumulate(&mut acc, point, delta, node.weight, false);
    }
    Ok(AttributionMap {
        values: finish(delta, acc)?,
        method: Method::LeftIg,
        steps: kept,
        class_index,
        warning,
    })
}

/// Integrated decision gradients on a uniform grid: every gradient sample is
/// scaled by the importance factor at its alpha.
pub fn idg_uniform(net: &Network, path: &StraightLinePath, class_index: usize, m: usize) -> Result<AttributionMap> {
    check_steps(m)?;
    Ok(AttributionMap {
        values: path_sum(net, path, class_index, &uniform_nodes(m), true)?,
        method: Method::Idg,
        steps: m,
        class_index,
        warning: None,
    })
}

/// Per-step IDG terms on the uniform grid, in summation order.
pub fn idg_terms(
    net: &Network,
    path: &StraightLinePath,
    class_index: usize,
    m: usize,
) -> Result<Vec<(PathPoint, Tensor)>> {
    check_steps(m)?;
    uniform_nodes(m)
        .into_iter()
        .map(|node| {
            let point = path_point(net, path, class_index, node.alpha)?;
            let term = step_contribution(&point, path.delta(), node.weight, true);
            Ok((point, term))
        })
        .collect()
}

/// `|values|` min-max scaled to `[0, 1]`; a constant map gives all zeros.
pub fn normalize_for_display(map: &AttributionMap) -> Tensor {
    let abs: Vec<f64> = map.values.data().iter().map(|v| v.abs()).collect();
    let lo = abs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = abs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let data = if abs.is_empty() || span <= 0.0 {
        vec![0.0; abs.len()]
    } else {
        abs.iter().map(|v| (v - lo) / span).collect()
    };
    Tensor::from_parts(map.values.shape().to_vec(), data)
}
