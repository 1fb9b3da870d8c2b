//! Straight-line paths from a baseline to an input, the logit-alpha curve
//! along them, and importance factors `dF/dalpha`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::nn::Network;
use crate::tensor::Tensor;

/// `x(alpha) = baseline + alpha * (input - baseline)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StraightLinePath {
    baseline: Tensor,
    input: Tensor,
    delta: Tensor,
}

impl StraightLinePath {
    pub fn new(baseline: Tensor, input: Tensor) -> Result<Self> {
        let delta = input.sub(&baseline)?;
        Ok(Self {
            baseline,
            input,
            delta,
        })
    }

    /// Path starting from an all-zero (black) baseline.
    pub fn from_black(input: Tensor) -> Self {
        let baseline = Tensor::zeros(input.shape());
        Self::new(baseline, input).expect("shapes match by construction")
    }

    pub fn baseline(&self) -> &Tensor {
        &self.baseline
    }

    pub fn input(&self) -> &Tensor {
        &self.input
    }

    /// `input - baseline`.
    pub fn delta(&self) -> &Tensor {
        &self.delta
    }

    pub fn interpolate(&self, alpha: f64) -> Result<Tensor> {
        check_alpha(alpha)?;
        // Endpoints are returned verbatim so they match bit for bit.
        if alpha == 0.0 {
            return Ok(self.baseline.clone());
        }
        if alpha == 1.0 {
            return Ok(self.input.clone());
        }
        let data = self
            .baseline
            .data()
            .iter()
            .zip(self.delta.data())
            .map(|(b, d)| b + alpha * d)
            .collect();
        Ok(Tensor::from_parts(self.baseline.shape().to_vec(), data))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Range {
            value: alpha,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// `n >= 2` evenly spaced alphas from 0 to 1 inclusive.
pub fn uniform_alphas(n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two alphas");
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

/// Target-class logit sampled along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitCurve {
    pub alphas: Vec<f64>,
    pub logits: Vec<f64>,
    pub class_index: usize,
}

impl LogitCurve {
    pub fn to_csv(&self) -> String {
        curve_csv("alpha,logit", &self.alphas, &self.logits)
    }
}

/// `IF(alpha)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceCurve {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
}

impl ImportanceCurve {
    pub fn to_csv(&self) -> String {
        curve_csv("alpha,importance", &self.alphas, &self.values)
    }
}

fn curve_csv(header: &str, xs: &[f64], ys: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

fn check_ascending(alphas: &[f64]) -> Result<()> {
    for &a in alphas {
        check_alpha(a)?;
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::argument("alphas must be strictly ascending"));
    }
    Ok(())
}

pub fn logit_curve(net: &Network, path: &StraightLinePath, class_index: usize, alphas: &[f64]) -> Result<LogitCurve> {
    check_ascending(alphas)?;
    let logits = alphas
        .iter()
        .map(|&a| net.output(&path.interpolate(a)?, class_index))
        .collect::<Result<Vec<_>>>()?;
    Ok(LogitCurve {
        alphas: alphas.to_vec(),
        logits,
        class_index,
    })
}

/// Logit, input gradient and importance factor at one point of the path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub alpha: f64,
    pub logit: f64,
    pub gradient: Tensor,
    /// `dF/dalpha = gradient . (input - baseline)`.
    pub importance: f64,
}

/// Evaluates the network once at `alpha`; the same gradient feeds both the
/// attribution sum and the importance factor.
pub fn path_point(net: &Network, path: &StraightLinePath, class_index: usize, alpha: f64) -> Result<PathPoint> {
    let x = path.interpolate(alpha)?;
    let (logit, gradient) = net.output_and_grad(&x, class_index)?;
    let importance = gradient.dot(path.delta())?;
    Ok(PathPoint {
        alpha,
        logit,
        gradient,
        importance,
    })
}

/// `dF/dalpha` at `alpha` by the chain rule.
pub fn importance_factor(net: &Network, path: &StraightLinePath, class_index: usize, alpha: f64) -> Result<f64> {
    Ok(path_point(net, path, class_index, alpha)?.importance)
}

/// Chain-rule importance factors at every alpha.
pub fn importance_curve(
    net: &Network,
    path: &StraightLinePath,
    class_index: usize,
    alphas: &[f64],
) -> Result<ImportanceCurve> {
    check_ascending(alphas)?;
    let values = alphas
        .iter()
        .map(|&a| importance_factor(net, path, class_index, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(ImportanceCurve {
        alphas: alphas.to_vec(),
        values,
    })
}

/// Forward-difference slope of a sampled curve, attached at the left alpha.
pub fn importance_factor_fd(curve: &LogitCurve) -> Result<ImportanceCurve> {
    if curve.alphas.len() < 2 || curve.alphas.len() != curve.logits.len() {
        return Err(Error::argument("finite-difference slope needs at least two points"));
    }
    let (alphas, values) = curve
        .alphas
        .windows(2)
        .zip(curve.logits.windows(2))
        .map(|(a, f)| (a[0], (f[1] - f[0]) / (a[1] - a[0])))
        .unzip();
    Ok(ImportanceCurve { alphas, values })
}

/// Shortest interval of the path that accounts for a given share of the logit growth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRegion {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    /// Set when the curve does not grow; the region is then `[0, 1]`.
    pub degenerate: bool,
}

impl DecisionRegion {
    pub fn width(&self) -> f64 {
        self.alpha_hi - self.alpha_lo
    }

    pub fn contains(&self, alpha: f64) -> bool {
        alpha >= self.alpha_lo && alpha <= self.alpha_hi
    }
}

/// Shortest `[alphas[i], alphas[j]]` with `logits[j] - logits[i] >= fraction * (last - first)`;
/// ties go to the smaller `alpha_lo`.
pub fn decision_region(curve: &LogitCurve, fraction: f64) -> Result<DecisionRegion> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::argument(format!("fraction must be in (0, 1), got {fraction}")));
    }
    let n = curve.logits.len();
    if n < 2 || curve.alphas.len() != n {
        return Err(Error::argument("decision region needs at least two curve points"));
    }
    let total = curve.logits[n - 1] - curve.logits[0];
    if total <= 0.0 {
        return Ok(DecisionRegion {
            alpha_lo: 0.0,
            alpha_hi: 1.0,
            degenerate: true,
        });
    }
    let target = fraction * total;
    let a = &curve.alphas;
    let f = &curve.logits;
    let mut best: Option<(usize, usize)> = None;
    for i in 0..n {
        // Widths within rounding of the best one count as ties.
        let limit = best.map_or(f64::INFINITY, |(lo, hi)| a[hi] - a[lo] - 1e-12);
        for j in i + 1..n {
            if a[j] - a[i] >= limit {
                break;
            }
            if f[j] - f[i] >= target {
                best = Some((i, j));
                break;
            }
        }
    }
    let (lo, hi) = best.expect("the full interval always reaches the target");
    Ok(DecisionRegion {
        alpha_lo: a[lo],
        alpha_hi: a[hi],
        degenerate: false,
    })
}
