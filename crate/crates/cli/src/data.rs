use std::path::PathBuf;

use clap::Args;
use idg_core::{io, make_dataset, DatasetKind};

use crate::common::CliResult;

#[derive(Debug, Args)]
pub struct MakeData {
    /// Number of images; must be a multiple of the class count.
    #[arg(long, default_value_t = 300)]
    count: usize,
    /// Image side length in pixels.
    #[arg(long, default_value_t = 32)]
    side: usize,
    #[arg(long)]
    out: PathBuf,
}

impl MakeData {
    pub fn run(self, seed: u64) -> CliResult {
        let data = make_dataset(DatasetKind::Shapes, self.count, self.side, seed)?;
        io::save_dataset(&self.out, &data)?;
        println!("wrote {} images to {}", data.len(), self.out.display());
        Ok(())
    }
}
