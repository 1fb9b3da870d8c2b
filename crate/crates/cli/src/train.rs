use std::path::PathBuf;

use clap::Args;
use idg_core::nn::{train_toy, zoo, TrainConfig};
use idg_core::{io, SHAPE_CLASSES};

use crate::common::{ensure_dir, require_dataset, write_output, CliError, CliResult};

#[derive(Debug, Args)]
pub struct Train {
    /// Dataset directory written by `make-data`.
    #[arg(long)]
    data: PathBuf,
    /// Directory receiving `model.dgnet` and `train_log.csv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    #[arg(long = "lr", default_value_t = 0.05)]
    learning_rate: f64,
    #[arg(long, default_value_t = 10)]
    batch_size: usize,
}

impl Train {
    pub fn run(self, seed: u64) -> CliResult {
        let cfg = TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
        };
        cfg.validate()?;
        let data = require_dataset(&self.data)?;
        let shape = data.samples[0].image.shape().to_vec();
        let side = match shape[..] {
            [1, h, w] if h == w => h,
            _ => return Err(CliError::Usage(format!("expected square grayscale images, got {shape:?}"))),
        };
        if let Some(s) = data.samples.iter().find(|s| s.image.shape() != shape.as_slice()) {
            return Err(CliError::Usage(format!(
                "images differ in shape: {:?} vs {shape:?}",
                s.image.shape()
            )));
        }
        let init = zoo::toy_cnn(side, SHAPE_CLASSES.len(), seed)?;
        let (net, report) = train_toy(&init, &data, &cfg)?;

        ensure_dir(&self.out)?;
        let model = self.out.join("model.dgnet");
        io::save_weights(&model, &net)?;
        write_output(&self.out, "train_log.csv", &report.to_csv())?;
        println!("train accuracy {:.4}", report.final_accuracy);
        println!("wrote {}", model.display());
        Ok(())
    }
}
