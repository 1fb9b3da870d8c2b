use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::layer::LayerGrads;
use super::network::Network;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Mini-batch SGD settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            epochs: 30,
            batch_size: 10,
            seed: 7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        // A zero rate is accepted and leaves the weights untouched.
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::argument(format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::argument("epochs must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::argument("batch size must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    /// Accuracy of the final weights over the whole training set.
    pub final_accuracy: f64,
}

impl TrainReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,mean_loss,accuracy\n");
        for e in &self.epochs {
            out.push_str(&format!("{},{},{}\n", e.epoch, e.mean_loss, e.accuracy));
        }
        out
    }
}

/// Trains `net` with softmax cross-entropy and plain SGD.
///
/// The sample order of every epoch is drawn from a ChaCha8 stream seeded by
/// `cfg.seed`, so identical inputs give bit-identical weights.
pub fn train_toy(net: &Network, data: &Dataset, cfg: &TrainConfig) -> Result<(Network, TrainReport)> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::argument("training set is empty"));
    }
    let classes = net.class_count();
    if let Some(bad) = data.samples.iter().find(|s| s.label >= classes) {
        return Err(Error::Index {
            index: bad.label,
            len: classes,
        });
    }

    let mut net = net.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grads: Vec<LayerGrads> = net
        .layers()
        .iter()
        .map(|l| LayerGrads::zeros_for(l.spec()))
        .collect();
    let mut epochs = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            for g in &mut grads {
                g.weight.iter_mut().for_each(|v| *v = 0.0);
                g.bias.iter_mut().for_each(|v| *v = 0.0);
            }
            for &i in batch {
                let s = &data.samples[i];
                let (loss, hit) = net.accumulate_cross_entropy(&s.image, s.label, &mut grads)?;
                loss_sum += loss;
                correct += usize::from(hit);
            }
            if cfg.learning_rate == 0.0 {
                continue;
            }
            let step = cfg.learning_rate / batch.len() as f64;
            for (layer, g) in net.layers_mut().iter_mut().zip(&grads) {
                let (w, b) = layer.params_mut();
                for (p, d) in w.iter_mut().zip(&g.weight) {
                    *p -= step * d;
                }
                for (p, d) in b.iter_mut().zip(&g.bias) {
                    *p -= step * d;
                }
            }
        }
        let n = data.len() as f64;
        epochs.push(EpochStats {
            epoch: epoch + 1,
            mean_loss: loss_sum / n,
            accuracy: correct as f64 / n,
        });
    }

    if net
        .layers()
        .iter()
        .any(|l| l.weight().iter().chain(l.bias_values()).any(|v| !v.is_finite()))
    {
        return Err(Error::NonFinite("training diverged"));
    }
    let final_accuracy = accuracy(&net, data)?;
    Ok((net, TrainReport { epochs, final_accuracy }))
}

/// Fraction of samples whose argmax prediction equals the label.
pub fn accuracy(net: &Network, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::argument("dataset is empty"));
    }
    let mut hits = 0usize;
    for s in &data.samples {
        hits += usize::from(net.predict(&s.image)? == s.label);
    }
    Ok(hits as f64 / data.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_dataset, DatasetKind};
    use crate::nn::zoo;

    fn small() -> (Network, Dataset) {
        (zoo::toy_cnn(16, 3, 4).unwrap(), make_dataset(DatasetKind::Shapes, 12, 16, 4).unwrap())
    }

    #[test]
    fn zero_learning_rate_keeps_weights() {
        let (net, data) = small();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 2,
            ..TrainConfig::default()
        };
        let (trained, report) = train_toy(&net, &data, &cfg).unwrap();
        assert_eq!(trained, net);
        assert_eq!(report.epochs.len(), 2);
    }

    #[test]
    fn same_seed_same_weights() {
        let (net, data) = small();
        let cfg = TrainConfig {
            epochs: 2,
            batch_size: 4,
            ..TrainConfig::default()
        };
        let (a, _) = train_toy(&net, &data, &cfg).unwrap();
        let (b, _) = train_toy(&net, &data, &cfg).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, net);
        let (c, _) = train_toy(&net, &data, &TrainConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (net, data) = small();
        assert!(train_toy(&net, &data.take(0), &TrainConfig::default()).is_err());
        for cfg in [
            TrainConfig { epochs: 0, ..TrainConfig::default() },
            TrainConfig { batch_size: 0, ..TrainConfig::default() },
            TrainConfig { learning_rate: -1.0, ..TrainConfig::default() },
        ] {
            assert!(train_toy(&net, &data, &cfg).is_err());
        }
        let two_class = zoo::toy_cnn(16, 2, 4).unwrap();
        assert!(matches!(
            train_toy(&two_class, &data, &TrainConfig::default()),
            Err(Error::Index { index: 2, len: 2 })
        ));
    }

    #[test]
    fn log_has_one_row_per_epoch() {
        let (net, data) = small();
        let (_, report) = train_toy(&net, &data, &TrainConfig { epochs: 3, ..TrainConfig::default() }).unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().next(), Some("epoch,mean_loss,accuracy"));
        assert_eq!(csv.lines().count(), 4);
        assert!((0.0..=1.0).contains(&report.final_accuracy));
    }
}
