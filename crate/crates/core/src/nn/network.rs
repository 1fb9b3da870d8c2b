use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::layer::{Layer, LayerGrads, LayerSpec};
use crate::error::{Error, Result};
use crate::tensor::{softmax, Tensor};

/// Sequential differentiable model.
///
/// Networks are immutable once built; every evaluation method takes `&self`
/// and can be shared across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_shape: Vec<usize>,
    layers: Vec<Layer>,
    /// Output shape of each layer.
    shapes: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(input_shape: Vec<usize>, layers: Vec<Layer>) -> Result<Self> {
        if input_shape.is_empty() || input_shape.contains(&0) {
            return Err(Error::argument(format!("invalid input shape {input_shape:?}")));
        }
        let mut shapes = Vec::with_capacity(layers.len());
        let mut current = input_shape.clone();
        for layer in &layers {
            current = layer.spec().output_shape(&current)?;
            shapes.push(current.clone());
        }
        Ok(Self {
            input_shape,
            layers,
            shapes,
        })
    }

    /// Builds a network from specs with He-normal weights and zero biases.
    pub fn init(input_shape: Vec<usize>, specs: &[LayerSpec], seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(specs.len());
        for spec in specs {
            let (nw, nb) = spec.param_counts();
            let fan_in = match *spec {
                LayerSpec::Dense { inputs, .. } => inputs,
                LayerSpec::Conv2d(g) => g.in_channels * g.kernel * g.kernel,
                _ => 1,
            };
            let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt())
                .map_err(|e| Error::argument(e.to_string()))?;
            let weight = (0..nw).map(|_| normal.sample(&mut rng)).collect();
            layers.push(Layer::new(spec.clone(), weight, vec![0.0; nb])?);
        }
        Self::new(input_shape, layers)
    }

    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn output_shape(&self) -> &[usize] {
        self.shapes.last().map(Vec::as_slice).unwrap_or(&self.input_shape)
    }

    pub fn class_count(&self) -> usize {
        self.output_shape().iter().product()
    }

    pub fn ends_in_softmax(&self) -> bool {
        matches!(self.layers.last().map(Layer::spec), Some(LayerSpec::Softmax))
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight().len() + l.bias_values().len())
            .sum()
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        if x.shape() != self.input_shape.as_slice() {
            return Err(Error::Shape {
                expected: self.input_shape.clone(),
                actual: x.shape().to_vec(),
            });
        }
        Ok(())
    }

    fn check_class(&self, class_index: usize) -> Result<()> {
        let len = self.class_count();
        if class_index >= len {
            return Err(Error::Index {
                index: class_index,
                len,
            });
        }
        Ok(())
    }

    /// All intermediate activations, input first.
    fn trace(&self, x: &Tensor) -> Vec<Tensor> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.clone());
        for (layer, shape) in self.layers.iter().zip(&self.shapes) {
            let next = layer.forward(acts.last().expect("non-empty"), shape);
            acts.push(next);
        }
        acts
    }

    /// Output scores: logits, or probabilities if the last layer is softmax.
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        self.check_input(x)?;
        let out = self
            .trace(x)
            .pop()
            .expect("trace always holds the input")
            .reshape(vec![self.class_count()])?;
        if !out.is_finite() {
            return Err(Error::NonFinite("forward"));
        }
        Ok(out)
    }

    /// Post-softmax class probabilities.
    pub fn probabilities(&self, x: &Tensor) -> Result<Vec<f64>> {
        let out = self.forward(x)?;
        if self.ends_in_softmax() {
            Ok(out.into_data())
        } else {
            Ok(softmax(out.data()))
        }
    }

    pub fn predict(&self, x: &Tensor) -> Result<usize> {
        Ok(self.forward(x)?.argmax())
    }

    pub fn output(&self, x: &Tensor, class_index: usize) -> Result<f64> {
        self.check_class(class_index)?;
        Ok(self.forward(x)?.data()[class_index])
    }

    /// Reverse-mode gradient of output `class_index` with respect to the input.
    pub fn grad_input(&self, x: &Tensor, class_index: usize) -> Result<Tensor> {
        Ok(self.output_and_grad(x, class_index)?.1)
    }

    /// Output value and its input gradient from a single forward/backward pass.
    pub fn output_and_grad(&self, x: &Tensor, class_index: usize) -> Result<(f64, Tensor)> {
        self.check_input(x)?;
        self.check_class(class_index)?;
        let acts = self.trace(x);
        let out = acts.last().expect("non-empty").data();
        let value = out[class_index];
        let mut seed = vec![0.0; out.len()];
        seed[class_index] = 1.0;
        let grad = self.backward(&acts, seed, None);
        let grad = Tensor::from_parts(self.input_shape.clone(), grad);
        if !value.is_finite() || !grad.is_finite() {
            return Err(Error::NonFinite("grad_input"));
        }
        Ok((value, grad))
    }

    /// Smallest `|value|` fed into any ReLU for input `x`; infinite without ReLUs.
    /// Finite differences with step `h` are exact up to rounding while this
    /// stays well above `h` times the input-to-unit gain.
    pub fn relu_margin(&self, x: &Tensor) -> Result<f64> {
        self.check_input(x)?;
        let acts = self.trace(x);
        Ok(self
            .layers
            .iter()
            .zip(&acts)
            .filter(|(l, _)| matches!(l.spec(), LayerSpec::Relu))
            .flat_map(|(_, a)| a.data().iter().map(|v| v.abs()))
            .fold(f64::INFINITY, f64::min))
    }

    /// Central finite differences of output `class_index`, one coordinate at a time.
    pub fn finite_diff_grad(&self, x: &Tensor, class_index: usize, h: f64) -> Result<Tensor> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::argument(format!("step must be positive, got {h}")));
        }
        self.check_input(x)?;
        self.check_class(class_index)?;
        let mut probe = x.clone();
        let mut grad = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let orig = x.data()[i];
            probe.data_mut()[i] = orig + h;
            let up = self.forward(&probe)?.data()[class_index];
            probe.data_mut()[i] = orig - h;
            let down = self.forward(&probe)?.data()[class_index];
            probe.data_mut()[i] = orig;
            grad.push((up - down) / (2.0 * h));
        }
        Tensor::new(x.shape().to_vec(), grad)
    }

    fn backward(&self, acts: &[Tensor], seed: Vec<f64>, mut grads: Option<&mut [LayerGrads]>) -> Vec<f64> {
        let mut g = seed;
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let lg = grads.as_deref_mut().map(|all| &mut all[i]);
            g = layer.backward(&acts[i], &acts[i + 1], &g, lg);
        }
        g
    }

    /// Softmax cross-entropy loss for one sample; accumulates parameter
    /// gradients into `grads` and returns `(loss, correct)`.
    pub(crate) fn accumulate_cross_entropy(
        &self,
        x: &Tensor,
        label: usize,
        grads: &mut [LayerGrads],
    ) -> Result<(f64, bool)> {
        self.check_input(x)?;
        self.check_class(label)?;
        let acts = self.trace(x);
        let logits = acts.last().expect("non-empty").data();
        let probs = softmax(logits);
        let loss = -probs[label].max(f64::MIN_POSITIVE).ln();
        let correct = Tensor::from_parts(vec![logits.len()], logits.to_vec()).argmax() == label;
        let mut seed = probs;
        seed[label] -= 1.0;
        self.backward(&acts, seed, Some(grads));
        Ok((loss, correct))
    }
}
