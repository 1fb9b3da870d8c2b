use crate::error::{Error, Result};
use crate::tensor::{softmax, Tensor};

/// Hyperparameters of a 2-D convolution over `[channels, height, width]` inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvGeometry {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
}

impl ConvGeometry {
    fn output_extent(&self, extent: usize) -> Result<usize> {
        let padded = extent + 2 * self.padding;
        if self.stride == 0 || self.kernel == 0 || padded < self.kernel {
            return Err(Error::argument(format!(
                "conv2d with kernel {} stride {} padding {} has no output for extent {extent}",
                self.kernel, self.stride, self.padding
            )));
        }
        Ok((padded - self.kernel) / self.stride + 1)
    }
}

/// Layer kind plus the hyperparameters needed to size its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerSpec {
    Dense { inputs: usize, units: usize },
    Conv2d(ConvGeometry),
    Relu,
    Flatten,
    Bias { len: usize },
    Softmax,
}

impl LayerSpec {
    /// `(weight count, bias count)`.
    pub fn param_counts(&self) -> (usize, usize) {
        match *self {
            LayerSpec::Dense { inputs, units } => (inputs * units, units),
            LayerSpec::Conv2d(g) => (
                g.out_channels * g.in_channels * g.kernel * g.kernel,
                g.out_channels,
            ),
            LayerSpec::Bias { len } => (0, len),
            LayerSpec::Relu | LayerSpec::Flatten | LayerSpec::Softmax => (0, 0),
        }
    }

    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        let count: usize = input.iter().product();
        match *self {
            LayerSpec::Dense { inputs, units } => {
                if count != inputs {
                    return Err(Error::Shape {
                        expected: vec![inputs],
                        actual: input.to_vec(),
                    });
                }
                Ok(vec![units])
            }
            LayerSpec::Conv2d(g) => {
                if input.len() != 3 || input[0] != g.in_channels {
                    return Err(Error::Shape {
                        expected: vec![g.in_channels, 0, 0],
                        actual: input.to_vec(),
                    });
                }
                Ok(vec![
                    g.out_channels,
                    g.output_extent(input[1])?,
                    g.output_extent(input[2])?,
                ])
            }
            LayerSpec::Bias { len } => {
                if count != len {
                    return Err(Error::Shape {
                        expected: vec![len],
                        actual: input.to_vec(),
                    });
                }
                Ok(input.to_vec())
            }
            LayerSpec::Flatten => Ok(vec![count]),
            LayerSpec::Relu | LayerSpec::Softmax => Ok(input.to_vec()),
        }
    }

    /// Keyword used in the weights file header.
    pub fn keyword(&self) -> &'static str {
        match self {
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::Conv2d(_) => "conv2d",
            LayerSpec::Relu => "relu",
            LayerSpec::Flatten => "flatten",
            LayerSpec::Bias { .. } => "bias",
            LayerSpec::Softmax => "softmax",
        }
    }
}

/// Parameter gradients for one layer, laid out like [`Layer`]'s buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LayerGrads {
    pub fn zeros_for(spec: &LayerSpec) -> Self {
        let (w, b) = spec.param_counts();
        Self {
            weight: vec![0.0; w],
            bias: vec![0.0; b],
        }
    }
}

/// A layer with its parameters.
///
/// Dense weights are `[units, inputs]` row-major; conv weights are
/// `[out_channels, in_channels, kernel, kernel]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    spec: LayerSpec,
    weight: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    pub fn new(spec: LayerSpec, weight: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        let (nw, nb) = spec.param_counts();
        if weight.len() != nw || bias.len() != nb {
            return Err(Error::argument(format!(
                "{} layer expects {nw} weights and {nb} biases, got {} and {}",
                spec.keyword(),
                weight.len(),
                bias.len()
            )));
        }
        if weight.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("layer parameters"));
        }
        Ok(Self { spec, weight, bias })
    }

    pub fn dense(inputs: usize, units: usize, weight: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        Self::new(LayerSpec::Dense { inputs, units }, weight, bias)
    }

    pub fn conv2d(geometry: ConvGeometry, weight: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        Self::new(LayerSpec::Conv2d(geometry), weight, bias)
    }

    pub fn bias(values: Vec<f64>) -> Result<Self> {
        Self::new(LayerSpec::Bias { len: values.len() }, Vec::new(), values)
    }

    pub fn relu() -> Self {
        Self::parameterless(LayerSpec::Relu)
    }

    pub fn flatten() -> Self {
        Self::parameterless(LayerSpec::Flatten)
    }

    pub fn softmax() -> Self {
        Self::parameterless(LayerSpec::Softmax)
    }

    fn parameterless(spec: LayerSpec) -> Self {
        Self {
            spec,
            weight: Vec::new(),
            bias: Vec::new(),
        }
    }

    pub fn spec(&self) -> &LayerSpec {
        &self.spec
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn bias_values(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn params_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.weight, &mut self.bias)
    }

    pub(crate) fn forward(&self, input: &Tensor, out_shape: &[usize]) -> Tensor {
        let x = input.data();
        let data = match self.spec {
            LayerSpec::Dense { inputs, units } => {
                let mut y = self.bias.clone();
                for (u, yu) in y.iter_mut().enumerate().take(units) {
                    let row = &self.weight[u * inputs..(u + 1) * inputs];
                    *yu += row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
                }
                y
            }
            LayerSpec::Conv2d(g) => conv_forward(&g, input.shape(), x, &self.weight, &self.bias, out_shape),
            LayerSpec::Relu => x.iter().map(|&v| v.max(0.0)).collect(),
            LayerSpec::Flatten => x.to_vec(),
            LayerSpec::Bias { .. } => x.iter().zip(&self.bias).map(|(a, b)| a + b).collect(),
            LayerSpec::Softmax => softmax(x),
        };
        Tensor::from_parts(out_shape.to_vec(), data)
    }

    /// Vector-Jacobian product: maps `d out` to `d input`, accumulating
    /// parameter gradients into `grads` when given.
    pub(crate) fn backward(
        &self,
        input: &Tensor,
        output: &Tensor,
        grad_out: &[f64],
        grads: Option<&mut LayerGrads>,
    ) -> Vec<f64> {
        let x = input.data();
        match self.spec {
            LayerSpec::Dense { inputs, units } => {
                let mut dx = vec![0.0; inputs];
                for (u, &g) in grad_out.iter().enumerate().take(units) {
                    if g == 0.0 {
                        continue;
                    }
                    let row = &self.weight[u * inputs..(u + 1) * inputs];
                    for (d, w) in dx.iter_mut().zip(row) {
                        *d += w * g;
                    }
                }
                if let Some(grads) = grads {
                    for (u, &g) in grad_out.iter().enumerate().take(units) {
                        grads.bias[u] += g;
                        let row = &mut grads.weight[u * inputs..(u + 1) * inputs];
                        for (dw, v) in row.iter_mut().zip(x) {
                            *dw += g * v;
                        }
                    }
                }
                dx
            }
            LayerSpec::Conv2d(g) => conv_backward(&g, input.shape(), x, &self.weight, output.shape(), grad_out, grads),
            // Subgradient at exactly zero is 0.
            LayerSpec::Relu => x
                .iter()
                .zip(grad_out)
                .map(|(&v, &g)| if v > 0.0 { g } else { 0.0 })
                .collect(),
            LayerSpec::Flatten => grad_out.to_vec(),
            LayerSpec::Bias { .. } => {
                if let Some(grads) = grads {
                    for (b, g) in grads.bias.iter_mut().zip(grad_out) {
                        *b += g;
                    }
                }
                grad_out.to_vec()
            }
            LayerSpec::Softmax => {
                let y = output.data();
                let inner: f64 = y.iter().zip(grad_out).map(|(a, b)| a * b).sum();
                y.iter().zip(grad_out).map(|(yi, gi)| yi * (gi - inner)).collect()
            }
        }
    }
}

fn conv_forward(
    g: &ConvGeometry,
    in_shape: &[usize],
    x: &[f64],
    weight: &[f64],
    bias: &[f64],
    out_shape: &[usize],
) -> Vec<f64> {
    let (h, w) = (in_shape[1], in_shape[2]);
    let (oh, ow) = (out_shape[1], out_shape[2]);
    let k = g.kernel;
    let mut y = vec![0.0; g.out_channels * oh * ow];
    for o in 0..g.out_channels {
        let plane = &mut y[o * oh * ow..(o + 1) * oh * ow];
        plane.iter_mut().for_each(|v| *v = bias[o]);
        for c in 0..g.in_channels {
            let xin = &x[c * h * w..(c + 1) * h * w];
            let kern = &weight[(o * g.in_channels + c) * k * k..(o * g.in_channels + c + 1) * k * k];
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut acc = 0.0;
                    for ky in 0..k {
                        let iy = (oy * g.stride + ky) as isize - g.padding as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        let row = &xin[iy as usize * w..(iy as usize + 1) * w];
                        for kx in 0..k {
                            let ix = (ox * g.stride + kx) as isize - g.padding as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            acc += kern[ky * k + kx] * row[ix as usize];
                        }
                    }
                    plane[oy * ow + ox] += acc;
                }
            }
        }
    }
    y
}

fn conv_backward(
    g: &ConvGeometry,
    in_shape: &[usize],
    x: &[f64],
    weight: &[f64],
    out_shape: &[usize],
    grad_out: &[f64],
    mut grads: Option<&mut LayerGrads>,
) -> Vec<f64> {
    let (h, w) = (in_shape[1], in_shape[2]);
    let (oh, ow) = (out_shape[1], out_shape[2]);
    let k = g.kernel;
    let mut dx = vec![0.0; x.len()];
    for o in 0..g.out_channels {
        let gplane = &grad_out[o * oh * ow..(o + 1) * oh * ow];
        if let Some(grads) = grads.as_deref_mut() {
            grads.bias[o] += gplane.iter().sum::<f64>();
        }
        for c in 0..g.in_channels {
            let base = (o * g.in_channels + c) * k * k;
            for oy in 0..oh {
                for ox in 0..ow {
                    let go = gplane[oy * ow + ox];
                    if go == 0.0 {
                        continue;
                    }
                    for ky in 0..k {
                        let iy = (oy * g.stride + ky) as isize - g.padding as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for kx in 0..k {
                            let ix = (ox * g.stride + kx) as isize - g.padding as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let xi = c * h * w + iy as usize * w + ix as usize;
                            dx[xi] += weight[base + ky * k + kx] * go;
                            if let Some(grads) = grads.as_deref_mut() {
                                grads.weight[base + ky * k + kx] += x[xi] * go;
                            }
                        }
                    }
                }
            }
        }
    }
    dx
}
