//! Riemann-error curves, saturation reports and the `N`/`M` ablation.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::attribution::{idg_uniform, integrated_gradients, AttributionMap};
use crate::error::{Error, Result};
use crate::metrics::{auc, deletion_curve, MetricConfig};
use crate::nn::Network;
use crate::path::{decision_region, importance_curve, logit_curve, uniform_alphas, DecisionRegion, ImportanceCurve, LogitCurve, StraightLinePath};
use crate::sampling::{idg_adaptive, ig_adaptive, AdaptiveConfig};
use crate::tensor::Tensor;

pub const DEFAULT_M_REF: usize = 2000;

/// One attribution problem: a path and the class whose logit is explained.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCase {
    pub path: StraightLinePath,
    pub class_index: usize,
}

impl PathCase {
    /// Black baseline, predicted class.
    pub fn black(net: &Network, image: &Tensor) -> Result<Self> {
        Ok(Self {
            class_index: net.predict(image)?,
            path: StraightLinePath::from_black(image.clone()),
        })
    }
}

/// Attribution whose discretisation error is measured. Uniform methods
/// compare against themselves at `m_ref` steps; adaptive ones against
/// their uniform counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMethod {
    Ig,
    Idg,
    /// Adaptive IG with `regions` pre-characterisation regions; `n` is `M`.
    IgAdaptive { regions: usize },
    /// Adaptive IDG with `regions` pre-characterisation regions; `n` is `M`.
    IdgAdaptive { regions: usize },
}

impl ErrorMethod {
    fn uses_importance(self) -> bool {
        matches!(self, ErrorMethod::Idg | ErrorMethod::IdgAdaptive { .. })
    }

    fn run(self, net: &Network, case: &PathCase, n: usize) -> Result<AttributionMap> {
        let (path, class) = (&case.path, case.class_index);
        match self {
            ErrorMethod::Ig => integrated_gradients(net, path, class, n),
            ErrorMethod::Idg => idg_uniform(net, path, class, n),
            ErrorMethod::IgAdaptive { regions } => ig_adaptive(net, path, class, &AdaptiveConfig::new(regions, n)?),
            ErrorMethod::IdgAdaptive { regions } => idg_adaptive(net, path, class, &AdaptiveConfig::new(regions, n)?),
        }
    }

    fn reference(self, net: &Network, case: &PathCase, m_ref: usize) -> Result<Tensor> {
        let map = if self.uses_importance() {
            idg_uniform(net, &case.path, case.class_index, m_ref)?
        } else {
            integrated_gradients(net, &case.path, case.class_index, m_ref)?
        };
        Ok(map.values)
    }
}

impl fmt::Display for ErrorMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorMethod::Ig => f.write_str("ig"),
            ErrorMethod::Idg => f.write_str("idg"),
            ErrorMethod::IgAdaptive { .. } => f.write_str("ig-as"),
            ErrorMethod::IdgAdaptive { .. } => f.write_str("idg-as"),
        }
    }
}

impl FromStr for ErrorMethod {
    type Err = Error;

    /// Adaptive variants default to 50 regions.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ig" => Ok(ErrorMethod::Ig),
            "idg" => Ok(ErrorMethod::Idg),
            "ig-as" => Ok(ErrorMethod::IgAdaptive { regions: 50 }),
            "idg-as" => Ok(ErrorMethod::IdgAdaptive { regions: 50 }),
            _ => Err(Error::argument(format!(
                "unknown error method `{s}`, expected one of ig, idg, ig-as, idg-as"
            ))),
        }
    }
}

fn mean_abs_diff(a: &Tensor, b: &Tensor) -> Result<f64> {
    a.ensure_same_shape(b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).sum();
    Ok(total / a.len() as f64)
}

fn check_steps(n: usize, m_ref: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::argument("step count must be at least 1"));
    }
    if n > m_ref {
        return Err(Error::argument(format!(
            "step count {n} exceeds the reference resolution {m_ref}"
        )));
    }
    Ok(())
}

/// Mean absolute per-pixel gap between an `n`-step attribution and the
/// `m_ref`-step uniform reference.
pub fn approx_error(net: &Network, case: &PathCase, n: usize, m_ref: usize, method: ErrorMethod) -> Result<f64> {
    check_steps(n, m_ref)?;
    let reference = method.reference(net, case, m_ref)?;
    mean_abs_diff(&method.run(net, case, n)?.values, &reference)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub steps: Vec<usize>,
    /// Mean over cases of the per-case error, one per entry of `steps`.
    pub epsilons: Vec<f64>,
    pub m_ref: usize,
}

impl ErrorReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,epsilon\n");
        for (n, e) in self.steps.iter().zip(&self.epsilons) {
            let _ = writeln!(out, "{n},{e}");
        }
        out
    }
}

/// Error averaged over `cases` for each step count. The reference is
/// computed once per case; cases run in parallel and are reduced in order.
pub fn error_curve(
    net: &Network,
    cases: &[PathCase],
    steps: &[usize],
    method: ErrorMethod,
    m_ref: usize,
) -> Result<ErrorReport> {
    if cases.is_empty() || steps.is_empty() {
        return Err(Error::argument("error curve needs at least one case and one step count"));
    }
    for &n in steps {
        check_steps(n, m_ref)?;
    }
    let per_case = cases
        .par_iter()
        .map(|case| {
            let reference = method.reference(net, case, m_ref)?;
            steps
                .iter()
                .map(|&n| mean_abs_diff(&method.run(net, case, n)?.values, &reference))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let epsilons = (0..steps.len())
        .map(|k| per_case.iter().map(|row| row[k]).sum::<f64>() / cases.len() as f64)
        .collect();
    Ok(ErrorReport {
        steps: steps.to_vec(),
        epsilons,
        m_ref,
    })
}

/// Dense view of one path: where the logit grows and where the importance
/// factor carries its mass.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationReport {
    pub logits: LogitCurve,
    pub importance: ImportanceCurve,
    pub region: DecisionRegion,
    /// `sum |IF(alpha_k)| / n` over left grid points inside the region.
    pub inside_mass: f64,
    pub outside_mass: f64,
}

impl SaturationReport {
    /// Share of importance mass inside the decision region; 0 when there is none.
    pub fn inside_fraction(&self) -> f64 {
        let total = self.inside_mass + self.outside_mass;
        if total > 0.0 {
            self.inside_mass / total
        } else {
            0.0
        }
    }

    pub fn summary_csv(&self) -> String {
        format!(
            "alpha_lo,alpha_hi,degenerate,inside_mass,outside_mass,inside_fraction\n{},{},{},{},{},{}\n",
            self.region.alpha_lo,
            self.region.alpha_hi,
            self.region.degenerate,
            self.inside_mass,
            self.outside_mass,
            self.inside_fraction()
        )
    }
}

/// Samples the path at `alpha = k / resolution` for `k = 0..=resolution`.
pub fn saturation_report(net: &Network, case: &PathCase, resolution: usize, fraction: f64) -> Result<SaturationReport> {
    if resolution < 10 {
        return Err(Error::argument(format!("resolution must be at least 10, got {resolution}")));
    }
    let alphas = uniform_alphas(resolution + 1);
    let logits = logit_curve(net, &case.path, case.class_index, &alphas)?;
    let importance = importance_curve(net, &case.path, case.class_index, &alphas)?;
    let region = decision_region(&logits, fraction)?;
    let dalpha = 1.0 / resolution as f64;
    let (mut inside_mass, mut outside_mass) = (0.0, 0.0);
    for (&a, &v) in alphas.iter().zip(&importance.values).take(resolution) {
        let m = v.abs() * dalpha;
        if region.contains(a) {
            inside_mass += m;
        } else {
            outside_mass += m;
        }
    }
    Ok(SaturationReport {
        logits,
        importance,
        region,
        inside_mass,
        outside_mass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationAxis {
    /// Sweep pre-characterisation regions with `M` fixed.
    Regions,
    /// Sweep integration nodes with `N` fixed.
    Steps,
}

impl FromStr for AblationAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" | "n" => Ok(AblationAxis::Regions),
            "M" | "m" => Ok(AblationAxis::Steps),
            _ => Err(Error::argument(format!("unknown axis `{s}`, expected N or M"))),
        }
    }
}

impl fmt::Display for AblationAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AblationAxis::Regions => "N",
            AblationAxis::Steps => "M",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationGrid {
    pub axis: AblationAxis,
    pub fixed: usize,
    pub swept: Vec<usize>,
    /// Mean deletion AUC of adaptive IDG, one per swept value.
    pub aucs: Vec<f64>,
}

impl AblationGrid {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("swept,auc\n");
        for (s, a) in self.swept.iter().zip(&self.aucs) {
            let _ = writeln!(out, "{s},{a}");
        }
        out
    }

    pub fn auc_at(&self, value: usize) -> Option<f64> {
        self.swept.iter().position(|&s| s == value).map(|i| self.aucs[i])
    }
}

/// Mean deletion AUC of adaptive IDG over `cases` for each swept `N` or `M`.
pub fn ablation_nm(
    net: &Network,
    cases: &[PathCase],
    axis: AblationAxis,
    fixed: usize,
    swept: &[usize],
    metric_cfg: &MetricConfig,
) -> Result<AblationGrid> {
    if cases.is_empty() || swept.is_empty() {
        return Err(Error::argument("ablation needs at least one case and one swept value"));
    }
    if swept.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::argument("swept values must be strictly increasing"));
    }
    for &v in swept.iter().chain(std::iter::once(&fixed)) {
        if !(1..=200).contains(&v) {
            return Err(Error::argument(format!("ablation values must lie in [1, 200], got {v}")));
        }
    }
    let per_case = cases
        .par_iter()
        .map(|case| {
            swept
                .iter()
                .map(|&v| {
                    let cfg = match axis {
                        AblationAxis::Regions => AdaptiveConfig::new(v, fixed)?,
                        AblationAxis::Steps => AdaptiveConfig::new(fixed, v)?,
                    };
                    let map = idg_adaptive(net, &case.path, case.class_index, &cfg)?;
                    auc(&deletion_curve(net, case.path.input(), &map, metric_cfg)?)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let aucs = (0..swept.len())
        .map(|k| per_case.iter().map(|row| row[k]).sum::<f64>() / cases.len() as f64)
        .collect();
    Ok(AblationGrid {
        axis,
        fixed,
        swept: swept.to_vec(),
        aucs,
    })
}
