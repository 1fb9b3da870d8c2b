//! Adaptive path sampling.
//!
//! The logit-alpha curve is first probed on `N` uniform regions. The `M`
//! integration nodes are then apportioned to regions in proportion to each
//! region's logit growth, and spread uniformly inside their region with
//! weight `1 / (N * count)`. Regions that receive no node contribute
//! nothing; their measure is reported as uncovered.

use std::fmt::Write as _;

use crate::attribution::{
    idg_uniform, integrated_gradients, path_sum, AttributionMap, AttributionWarning, Method, Node,
};
use crate::error::{Error, Result};
use crate::nn::Network;
use crate::path::StraightLinePath;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaptiveConfig {
    /// Pre-characterisation regions `N`.
    pub regions: usize,
    /// Integration nodes `M`.
    pub steps: usize,
}

impl AdaptiveConfig {
    pub fn new(regions: usize, steps: usize) -> Result<Self> {
        let cfg = Self { regions, steps };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.regions == 0 || self.steps == 0 {
            return Err(Error::argument("adaptive sampling needs N >= 1 and M >= 1"));
        }
        Ok(())
    }
}

/// Logit growth over each of `n` uniform regions:
/// `delta[i] = F((i+1)/n) - F(i/n)`, from `n + 1` forward passes.
pub fn precharacterize(net: &Network, path: &StraightLinePath, class_index: usize, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::argument("pre-characterisation needs at least one region"));
    }
    let logits = (0..=n)
        .map(|i| net.output(&path.interpolate(i as f64 / n as f64)?, class_index))
        .collect::<Result<Vec<_>>>()?;
    Ok(logits.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Splits `m` nodes across regions in proportion to `max(delta, 0)` using
/// largest remainders (ties to the lower region), so the counts always sum
/// to `m`. Without any positive growth the split is uniform, with the
/// remainder handed out from region 0.
pub fn allocate_samples(deltas: &[f64], m: usize) -> Vec<usize> {
    let n = deltas.len();
    if n == 0 {
        return Vec::new();
    }
    let clamped: Vec<f64> = deltas.iter().map(|d| d.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        let base = m / n;
        let extra = m % n;
        return (0..n).map(|i| base + usize::from(i < extra)).collect();
    }
    let quotas: Vec<f64> = clamped.iter().map(|d| d / total * m as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - counts[a] as f64;
        let rb = quotas[b] - counts[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(m.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Non-uniform quadrature nodes on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub regions: usize,
    pub counts: Vec<usize>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Region of each node.
    pub node_regions: Vec<usize>,
}

impl SamplingPlan {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Share of `[0, 1]` covered by regions holding at least one node.
    pub fn covered_measure(&self) -> f64 {
        let covered = self.counts.iter().filter(|&&c| c > 0).count();
        covered as f64 / self.regions as f64
    }

    pub fn has_uncovered_measure(&self) -> bool {
        self.counts.contains(&0)
    }

    pub fn quadrature(&self) -> Vec<Node> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&alpha, &weight)| Node { alpha, weight })
            .collect()
    }

    /// `region,count,node_alpha,weight`, one row per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("region,count,node_alpha,weight\n");
        for ((&r, &a), &w) in self.node_regions.iter().zip(&self.nodes).zip(&self.weights) {
            let _ = writeln!(out, "{r},{},{a},{w}", self.counts[r]);
        }
        out
    }
}

/// Node `j` of region `i` sits at `i/N + j/(N * counts[i])` with weight `1/(N * counts[i])`.
pub fn build_plan(counts: &[usize], regions: usize) -> Result<SamplingPlan> {
    if counts.len() != regions || regions == 0 {
        return Err(Error::argument(format!(
            "expected {regions} region counts, got {}",
            counts.len()
        )));
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::EmptyPlan);
    }
    let n = regions as f64;
    let total: usize = counts.iter().sum();
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut node_regions = Vec::with_capacity(total);
    for (i, &c) in counts.iter().enumerate() {
        let width = 1.0 / (n * c as f64);
        for j in 0..c {
            nodes.push(i as f64 / n + j as f64 * width);
            weights.push(width);
            node_regions.push(i);
        }
    }
    Ok(SamplingPlan {
        regions,
        counts: counts.to_vec(),
        nodes,
        weights,
        node_regions,
    })
}

/// Everything produced by one adaptive attribution run.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRun {
    pub map: AttributionMap,
    /// Per-region logit growth from pre-characterisation.
    pub deltas: Vec<f64>,
    /// `None` when the curve never grows and the uniform fallback ran.
    pub plan: Option<SamplingPlan>,
}

/// Runs the two-pass scheme. `importance` selects IDG (gradient scaled by
/// `IF`) or plain IG on the adaptive nodes.
pub fn adaptive_attribution(
    net: &Network,
    path: &StraightLinePath,
    class_index: usize,
    cfg: &AdaptiveConfig,
    importance: bool,
) -> Result<AdaptiveRun> {
    cfg.validate()?;
    let method = if importance { Method::IdgAdaptive } else { Method::IgAdaptive };
    let deltas = precharacterize(net, path, class_index, cfg.regions)?;
    let grows = deltas.iter().any(|&d| d > 0.0);
    let plan = if grows {
        match build_plan(&allocate_samples(&deltas, cfg.steps), cfg.regions) {
            Ok(plan) => Some(plan),
            Err(Error::EmptyPlan) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let map = match &plan {
        Some(plan) => AttributionMap {
            values: path_sum(net, path, class_index, &plan.quadrature(), importance)?,
            method,
            steps: plan.len(),
            class_index,
            warning: None,
        },
        None => {
            let uniform = if importance {
                idg_uniform(net, path, class_index, cfg.steps)?
            } else {
                integrated_gradients(net, path, class_index, cfg.steps)?
            };
            AttributionMap {
                method,
                warning: Some(AttributionWarning::NonPositiveGrowth),
                ..uniform
            }
        }
    };
    Ok(AdaptiveRun { map, deltas, plan })
}

pub fn idg_adaptive(
    net: &Network,
    path: &StraightLinePath,
    class_index: usize,
    cfg: &AdaptiveConfig,
) -> Result<AttributionMap> {
    Ok(adaptive_attribution(net, path, class_index, cfg, true)?.map)
}

/// IG on the adaptive nodes: the sampling changes, the weighting does not.
pub fn ig_adaptive(
    net: &Network,
    path: &StraightLinePath,
    class_index: usize,
    cfg: &AdaptiveConfig,
) -> Result<AttributionMap> {
    Ok(adaptive_attribution(net, path, class_index, cfg, false)?.map)
}
