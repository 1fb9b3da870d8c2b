use std::path::PathBuf;

use clap::Args;
use idg_core::attribution::{attribute, normalize_for_display};
use idg_core::path::logit_curve;
use idg_core::sampling::adaptive_attribution;
use idg_core::{io, AdaptiveConfig, Method, MethodConfig, StraightLinePath, Tensor};

use crate::common::{ensure_dir, load_input, load_model, resolve_class, write_output, CliError, CliResult};

#[derive(Debug, Args)]
pub struct Attribute {
    /// Weights file, `builtin:example1` or `builtin:steep`.
    #[arg(long)]
    model: String,
    /// Input as a `.pgm` image or a tensor CSV.
    #[arg(long)]
    image: PathBuf,
    /// One of grad, ig, lig, idg, idg-as, ig-as.
    #[arg(long, default_value = "idg-as")]
    method: String,
    /// Target class index, or `auto` for the predicted class.
    #[arg(long, default_value = "auto")]
    class: String,
    /// Uniform step count for ig, lig and idg.
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Left-IG truncation level.
    #[arg(long, default_value_t = 0.9)]
    tau: f64,
    /// Pre-characterisation regions for adaptive methods.
    #[arg(long = "N", default_value_t = 50)]
    regions: usize,
    /// Integration nodes for adaptive methods.
    #[arg(long = "M", default_value_t = 50)]
    nodes: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Heatmaps need an image layout; other inputs become a single row.
fn heatmap_shape(t: &Tensor) -> Vec<usize> {
    match *t.shape() {
        [1, h, w] => vec![1, h, w],
        [h, w] => vec![1, h, w],
        _ => vec![1, 1, t.len()],
    }
}

impl Attribute {
    pub fn run(self, seed: u64) -> CliResult {
        let method: Method = self.method.parse()?;
        let model = load_model(&self.model, seed)?;
        let net = &model.net;
        let x = load_input(&self.image, net)?;
        let class_index = resolve_class(&self.class, net, &x)?;
        let path = StraightLinePath::from_black(x);
        let adaptive = AdaptiveConfig::new(self.regions, self.nodes)?;
        let cfg = MethodConfig {
            steps: self.steps,
            tau: self.tau,
            adaptive,
        };
        ensure_dir(&self.out)?;

        let map = match method {
            Method::IdgAdaptive | Method::IgAdaptive => {
                let run = adaptive_attribution(net, &path, class_index, &adaptive, method == Method::IdgAdaptive)?;
                let alphas: Vec<f64> = (0..=self.regions).map(|i| i as f64 / self.regions as f64).collect();
                let curve = logit_curve(net, &path, class_index, &alphas)?;
                write_output(&self.out, "logit_curve.csv", &curve.to_csv())?;
                if let Some(plan) = &run.plan {
                    write_output(&self.out, "plan.csv", &plan.to_csv())?;
                    if plan.has_uncovered_measure() {
                        eprintln!(
                            "note: {:.1}% of the path received no nodes",
                            100.0 * (1.0 - plan.covered_measure())
                        );
                    }
                }
                run.map
            }
            _ => attribute(method, net, &path, class_index, &cfg)?,
        };
        if let Some(w) = map.warning {
            eprintln!("warning: {w:?}; fell back to uniform sampling over the full path");
        }

        write_output(&self.out, "attribution.csv", &map.to_csv())?;
        let display = normalize_for_display(&map);
        let heat = display.reshape(heatmap_shape(&display)).map_err(CliError::from)?;
        write_output(&self.out, "heatmap.pgm", &io::write_pgm(&heat)?)?;
        println!(
            "method {} class {} steps {} sum {}",
            map.method,
            map.class_index,
            map.steps,
            map.values.sum()
        );
        Ok(())
    }
}
