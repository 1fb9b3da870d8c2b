use std::path::PathBuf;

use clap::Args;
use idg_core::metrics::evaluate_batch;
use idg_core::{AdaptiveConfig, CurveKind, Method, MethodConfig, MetricConfig, Tensor};

use crate::common::{ensure_dir, load_model, parse_list, require_dataset, write_output, CliError, CliResult};

#[derive(Debug, Args)]
pub struct Evaluate {
    /// Weights file produced by `train`.
    #[arg(long)]
    model: String,
    /// Dataset directory written by `make-data`.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated methods.
    #[arg(long, default_value = "ig,idg-as")]
    methods: String,
    /// Comma-separated metrics: insertion, deletion, aic, sic.
    #[arg(long, default_value = "insertion,deletion")]
    metrics: String,
    /// Evaluate only the first `limit` images.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[arg(long, default_value_t = 0.9)]
    tau: f64,
    #[arg(long = "N", default_value_t = 50)]
    regions: usize,
    #[arg(long = "M", default_value_t = 50)]
    nodes: usize,
    /// Blur sigma of the insertion base image.
    #[arg(long, default_value_t = 5.0)]
    sigma: f64,
    #[arg(long)]
    out: PathBuf,
}

impl Evaluate {
    pub fn run(self, seed: u64) -> CliResult {
        let methods: Vec<Method> = parse_list(&self.methods, "method")?;
        let metrics: Vec<CurveKind> = parse_list(&self.metrics, "metric")?;
        let method_cfg = MethodConfig {
            steps: self.steps,
            tau: self.tau,
            adaptive: AdaptiveConfig::new(self.regions, self.nodes)?,
        };
        let metric_cfg = MetricConfig {
            sigma: self.sigma,
            ..MetricConfig::default()
        };
        let model = load_model(&self.model, seed)?;
        let data = require_dataset(&self.data)?;
        let images: Vec<Tensor> = data
            .samples
            .into_iter()
            .take(self.limit.unwrap_or(usize::MAX))
            .map(|s| s.image)
            .collect();
        if images.is_empty() {
            return Err(CliError::Usage("no images selected".into()));
        }

        let report = evaluate_batch(&model.net, &images, &methods, &metrics, &method_cfg, &metric_cfg)?;
        ensure_dir(&self.out)?;
        let path = write_output(&self.out, "report.csv", &report.to_csv())?;
        for &method in &methods {
            for &metric in &metrics {
                if let Some(m) = report.mean(metric, method) {
                    println!("{metric:<10} {method:<7} {m:.6}");
                }
            }
        }
        println!("wrote {}", path.display());
        Ok(())
    }
}
