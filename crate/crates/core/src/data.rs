//! Synthetic grayscale shape images used as a desk-scale classification task.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub const SHAPE_CLASSES: [&str; 3] = ["square", "cross", "disk"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Shapes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// `[1, side, side]`, values in `[0, 1]` quantized to multiples of 1/255.
    pub image: Tensor,
    pub label: usize,
    /// Row-major pixel mask of the drawn shape. Empty when loaded from disk.
    pub mask: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn take(&self, n: usize) -> Dataset {
        Dataset {
            samples: self.samples.iter().take(n).cloned().collect(),
        }
    }
}

/// Generates `count` images; sample `i` has label `i % 3` and is drawn from
/// its own ChaCha stream, so a prefix of a larger batch equals a smaller batch.
pub fn make_dataset(kind: DatasetKind, count: usize, side: usize, seed: u64) -> Result<Dataset> {
    let DatasetKind::Shapes = kind;
    if side < 16 {
        return Err(Error::argument(format!("image side must be at least 16, got {side}")));
    }
    let classes = SHAPE_CLASSES.len();
    if count == 0 || !count.is_multiple_of(classes) {
        return Err(Error::argument(format!(
            "count must be a positive multiple of {classes}, got {count}"
        )));
    }
    let samples = (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            draw_shape(&mut rng, i % classes, side)
        })
        .collect();
    Ok(Dataset { samples })
}

fn quantize(v: f64) -> f64 {
    (v.clamp(0.0, 1.0) * 255.0).round() / 255.0
}

fn draw_shape(rng: &mut ChaCha8Rng, label: usize, side: usize) -> Sample {
    let s = side as f64;
    let radius = rng.gen_range(s / 8.0..=s / 4.0);
    let lo = radius + 1.0;
    let hi = s - radius - 2.0;
    let cx = rng.gen_range(lo..=hi);
    let cy = rng.gen_range(lo..=hi);
    let intensity = rng.gen_range(0.6..=1.0);
    let arm = (radius / 3.0).max(1.0);

    let mut data = Vec::with_capacity(side * side);
    let mut mask = Vec::with_capacity(side * side);
    for y in 0..side {
        for x in 0..side {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            let inside = match label {
                0 => dx.abs() <= radius && dy.abs() <= radius,
                1 => {
                    dx.abs() <= radius
                        && dy.abs() <= radius
                        && (dx.abs() <= arm || dy.abs() <= arm)
                }
                _ => dx * dx + dy * dy <= radius * radius,
            };
            let noise: f64 = rng.gen_range(0.0..0.3);
            let v = if inside {
                intensity * (0.9 + 0.1 * rng.gen::<f64>())
            } else {
                noise
            };
            data.push(quantize(v));
            mask.push(inside);
        }
    }
    Sample {
        image: Tensor::from_parts(vec![1, side, side], data),
        label,
        mask,
    }
}
