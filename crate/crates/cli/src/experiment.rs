use std::path::PathBuf;

use clap::{Args, Subcommand};
use idg_core::experiments::{ablation_nm, error_curve, saturation_report, DEFAULT_M_REF};
use idg_core::{AblationAxis, ErrorMethod, MetricConfig, PathCase, StraightLinePath};

use crate::common::{
    ensure_dir, experiment_images, load_input, load_model, parse_list, resolve_class, write_output, CliError,
    CliResult, BUILTIN_STEEP,
};

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Mean Riemann-sum error against a high-resolution reference.
    ErrorCurve(ErrorCurve),
    /// Deletion AUC of adaptive IDG while sweeping N or M.
    AblateNm(AblateNm),
    /// Logit and importance curves with the decision region of one path.
    Saturation(Saturation),
}

impl Experiment {
    pub fn run(self, seed: u64) -> CliResult {
        match self {
            Experiment::ErrorCurve(e) => e.run(seed),
            Experiment::AblateNm(e) => e.run(seed),
            Experiment::Saturation(e) => e.run(seed),
        }
    }
}

#[derive(Debug, Args)]
struct Source {
    /// Weights file, `builtin:example1` or `builtin:steep`.
    #[arg(long, default_value = BUILTIN_STEEP)]
    model: String,
    /// Dataset directory; defaults to the images bundled with a builtin model.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Use at most this many images.
    #[arg(long, default_value_t = 10)]
    count: usize,
}

impl Source {
    fn cases(&self, seed: u64) -> CliResult<(idg_core::Network, Vec<PathCase>)> {
        let model = load_model(&self.model, seed)?;
        let images = experiment_images(self.data.as_deref(), &model, self.count)?;
        let cases = images
            .iter()
            .map(|x| PathCase::black(&model.net, x))
            .collect::<idg_core::Result<Vec<_>>>()?;
        Ok((model.net, cases))
    }
}

#[derive(Debug, Args)]
pub struct ErrorCurve {
    #[command(flatten)]
    source: Source,
    /// Comma-separated step counts.
    #[arg(long = "n", default_value = "10,50,250,600")]
    steps: String,
    /// One of ig, idg, ig-as, idg-as.
    #[arg(long, default_value = "idg")]
    method: String,
    /// Pre-characterisation regions for adaptive methods.
    #[arg(long = "N", default_value_t = 50)]
    regions: usize,
    #[arg(long, default_value_t = DEFAULT_M_REF)]
    m_ref: usize,
    #[arg(long)]
    out: PathBuf,
}

impl ErrorCurve {
    fn run(self, seed: u64) -> CliResult {
        let steps: Vec<usize> = parse_list(&self.steps, "step count")?;
        let method = match self.method.parse::<ErrorMethod>()? {
            ErrorMethod::IgAdaptive { .. } => ErrorMethod::IgAdaptive { regions: self.regions },
            ErrorMethod::IdgAdaptive { .. } => ErrorMethod::IdgAdaptive { regions: self.regions },
            m => m,
        };
        let (net, cases) = self.source.cases(seed)?;
        let report = error_curve(&net, &cases, &steps, method, self.m_ref)?;
        ensure_dir(&self.out)?;
        let path = write_output(&self.out, "error_curve.csv", &report.to_csv())?;
        for (n, e) in report.steps.iter().zip(&report.epsilons) {
            println!("n {n:>5}  epsilon {e:.6e}");
        }
        println!("wrote {}", path.display());
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct AblateNm {
    #[command(flatten)]
    source: Source,
    /// Swept parameter: N (regions) or M (nodes).
    #[arg(long, default_value = "N")]
    axis: String,
    /// Value of the parameter that is not swept.
    #[arg(long, default_value_t = 50)]
    fixed: usize,
    /// Comma-separated swept values.
    #[arg(long, default_value = "5,10,25,50,100")]
    values: String,
    #[arg(long, default_value_t = 5.0)]
    sigma: f64,
    #[arg(long)]
    out: PathBuf,
}

impl AblateNm {
    fn run(self, seed: u64) -> CliResult {
        let axis: AblationAxis = self.axis.parse()?;
        let swept: Vec<usize> = parse_list(&self.values, "swept value")?;
        let (net, cases) = self.source.cases(seed)?;
        let cfg = MetricConfig {
            sigma: self.sigma,
            ..MetricConfig::default()
        };
        let grid = ablation_nm(&net, &cases, axis, self.fixed, &swept, &cfg)?;
        ensure_dir(&self.out)?;
        let path = write_output(&self.out, "ablation.csv", &grid.to_csv())?;
        for (s, a) in grid.swept.iter().zip(&grid.aucs) {
            println!("{axis} {s:>4}  deletion auc {a:.6}");
        }
        println!("wrote {}", path.display());
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct Saturation {
    /// Weights file, `builtin:example1` or `builtin:steep`.
    #[arg(long, default_value = BUILTIN_STEEP)]
    model: String,
    /// Input as `.pgm` or tensor CSV; defaults to the first bundled image.
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(long, default_value = "auto")]
    class: String,
    /// Curve samples are taken at `k / resolution`.
    #[arg(long, default_value_t = 1000)]
    resolution: usize,
    /// Share of logit growth the decision region must hold.
    #[arg(long, default_value_t = 0.9)]
    fraction: f64,
    #[arg(long)]
    out: PathBuf,
}

impl Saturation {
    fn run(self, seed: u64) -> CliResult {
        let model = load_model(&self.model, seed)?;
        let x = match &self.image {
            Some(p) => load_input(p, &model.net)?,
            None => model
                .images
                .first()
                .cloned()
                .ok_or_else(|| CliError::Usage("this model ships no images; pass --image".into()))?,
        };
        let class_index = resolve_class(&self.class, &model.net, &x)?;
        let case = PathCase {
            path: StraightLinePath::from_black(x),
            class_index,
        };
        let report = saturation_report(&model.net, &case, self.resolution, self.fraction)?;
        ensure_dir(&self.out)?;
        write_output(&self.out, "logit_curve.csv", &report.logits.to_csv())?;
        write_output(&self.out, "importance_curve.csv", &report.importance.to_csv())?;
        let path = write_output(&self.out, "saturation.csv", &report.summary_csv())?;
        let r = report.region;
        if r.degenerate {
            eprintln!("warning: the logit does not grow along this path; region is the whole path");
        }
        println!(
            "decision region [{}, {}]  importance inside {:.4}",
            r.alpha_lo,
            r.alpha_hi,
            report.inside_fraction()
        );
        println!("wrote {}", path.display());
        Ok(())
    }
}
