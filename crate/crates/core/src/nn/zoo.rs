//! Hand-constructed and randomly initialised networks used by tests,
//! experiments and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::layer::{ConvGeometry, Layer, LayerSpec};
use super::network::Network;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// `F(x) = 1 - ReLU(1 - x)` on a scalar input: zero gradient for `x >= 1`
/// although `F(2) - F(0) = 1`.
pub fn build_example1() -> Network {
    let layers = vec![
        Layer::dense(1, 1, vec![-1.0], vec![1.0]).expect("valid"),
        Layer::relu(),
        Layer::dense(1, 1, vec![-1.0], vec![1.0]).expect("valid"),
    ];
    Network::new(vec![1], layers).expect("valid")
}

/// Single-output linear model `F(x) = w . x`.
pub fn linear(weights: Vec<f64>) -> Result<Network> {
    let n = weights.len();
    Network::new(vec![n], vec![Layer::dense(n, 1, weights, vec![0.0])?])
}

/// Model whose outputs ignore the input.
pub fn constant(input_shape: Vec<usize>, outputs: Vec<f64>) -> Result<Network> {
    let n: usize = input_shape.iter().product();
    let k = outputs.len();
    Network::new(
        input_shape,
        vec![Layer::flatten(), Layer::dense(n, k, vec![0.0; n * k], outputs)?],
    )
}

/// `F(x) = 1 - ReLU(1 - w . x)`: rises linearly along a black-baseline path
/// until `w . x(alpha) = 1`, then stays flat.
pub fn plateau(weights: Vec<f64>) -> Result<Network> {
    let n = weights.len();
    let neg: Vec<f64> = weights.iter().map(|w| -w).collect();
    Network::new(
        vec![n],
        vec![
            Layer::dense(n, 1, neg, vec![1.0])?,
            Layer::relu(),
            Layer::dense(1, 1, vec![-1.0], vec![1.0])?,
        ],
    )
}

/// Dense ReLU network with random weights and biases.
pub fn random_mlp(inputs: usize, hidden: &[usize], outputs: usize, seed: u64) -> Result<Network> {
    let mut specs = Vec::new();
    let mut width = inputs;
    for &h in hidden {
        specs.push(LayerSpec::Dense { inputs: width, units: h });
        specs.push(LayerSpec::Relu);
        width = h;
    }
    specs.push(LayerSpec::Dense { inputs: width, units: outputs });
    randomize_biases(Network::init(vec![inputs], &specs, seed)?, seed)
}

/// Small conv-ReLU-dense network on `[channels, side, side]` inputs with random biases.
pub fn random_convnet(channels: usize, side: usize, outputs: usize, seed: u64) -> Result<Network> {
    let g = ConvGeometry {
        in_channels: channels,
        out_channels: 3,
        kernel: 3,
        stride: 1,
        padding: 1,
    };
    let specs = [
        LayerSpec::Conv2d(g),
        LayerSpec::Relu,
        LayerSpec::Flatten,
        LayerSpec::Dense { inputs: 3 * side * side, units: outputs },
    ];
    randomize_biases(Network::init(vec![channels, side, side], &specs, seed)?, seed)
}

fn randomize_biases(net: Network, seed: u64) -> Result<Network> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_b1a5);
    let input_shape = net.input_shape().to_vec();
    let layers = net
        .layers()
        .iter()
        .map(|l| {
            let bias = l.bias_values().iter().map(|_| rng.gen_range(-0.5..0.5)).collect();
            Layer::new(l.spec().clone(), l.weight().to_vec(), bias)
        })
        .collect::<Result<Vec<_>>>()?;
    Network::new(input_shape, layers)
}

/// Layer stack of the toy shape classifier for `[1, side, side]` images.
///
/// Three stride-2 convolutions shrink the map to `side / 8`, and a final
/// convolution spanning the whole map leaves a 1x1 feature vector for the
/// dense readout.
pub fn toy_cnn_specs(side: usize, classes: usize) -> Result<Vec<LayerSpec>> {
    if side < 16 || !side.is_multiple_of(8) {
        return Err(Error::argument(format!(
            "toy CNN needs a side of at least 16 divisible by 8, got {side}"
        )));
    }
    let conv = |in_channels, out_channels, kernel, stride, padding| {
        LayerSpec::Conv2d(ConvGeometry {
            in_channels,
            out_channels,
            kernel,
            stride,
            padding,
        })
    };
    Ok(vec![
        conv(1, 8, 5, 2, 2),
        LayerSpec::Relu,
        conv(8, 16, 3, 2, 1),
        LayerSpec::Relu,
        conv(16, 32, 3, 2, 1),
        LayerSpec::Relu,
        conv(32, 32, side / 8, 1, 0),
        LayerSpec::Relu,
        LayerSpec::Flatten,
        LayerSpec::Dense { inputs: 32, units: classes },
    ])
}

pub fn toy_cnn(side: usize, classes: usize, seed: u64) -> Result<Network> {
    Network::init(vec![1, side, side], &toy_cnn_specs(side, classes)?, seed)
}

/// Parameters of the steep-logistic construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteepLogistic {
    /// Images are `[1, side, side]`.
    pub side: usize,
    /// ReLU features feeding the score.
    pub hidden: usize,
    /// Linear pieces approximating the logistic readout.
    pub pieces: usize,
    /// Target alpha width holding 90% of the logit growth.
    pub width: f64,
    /// Target alpha at the steepest point.
    pub center: f64,
    /// Final logit on saturation.
    pub height: f64,
}

impl Default for SteepLogistic {
    fn default() -> Self {
        Self {
            side: 16,
            hidden: 256,
            pieces: 16,
            width: 0.05,
            center: 0.3,
            height: 8.0,
        }
    }
}

/// A network whose logit along black-baseline paths is a steep logistic in
/// alpha, together with the seeded noise images it was calibrated on.
///
/// The first stage is a ReLU feature map `s(x) = v . ReLU(U x + b)` with
/// nonnegative `U`, `v` and nonpositive `b`, so `s` is zero at the black
/// baseline and nondecreasing along every path into the unit cube.
/// The readout approximates `height * sigmoid(k (s - s_c))` with
/// `pieces` linear segments built from ReLUs, so the whole model stays
/// piecewise linear. `s_c` and `k` are chosen from the suite-average score
/// curve so the 90% growth band is `width` wide around `center`.
pub fn steep_logistic_suite(cfg: &SteepLogistic, images: usize, seed: u64) -> Result<(Network, Vec<Tensor>)> {
    if cfg.pieces < 2 || cfg.hidden == 0 || images == 0 {
        return Err(Error::argument("steep logistic needs >= 2 pieces, hidden units and images"));
    }
    if !(cfg.width > 0.0 && cfg.center - cfg.width / 2.0 > 0.0 && cfg.center + cfg.width / 2.0 < 1.0) {
        return Err(Error::argument("decision band must lie inside (0, 1)"));
    }
    let n = cfg.side * cfg.side;
    let h = cfg.hidden;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let proj = Normal::<f64>::new(0.0, 1.0 / (n as f64).sqrt()).expect("valid");
    let offs = Normal::<f64>::new(0.0, 0.3).expect("valid");
    let unit = Normal::<f64>::new(0.0, 1.0).expect("valid");
    let u: Vec<f64> = (0..h * n).map(|_| proj.sample(&mut rng).abs()).collect();
    let b: Vec<f64> = (0..h).map(|_| -offs.sample(&mut rng).abs()).collect();
    let v: Vec<f64> = (0..h)
        .map(|_| unit.sample(&mut rng).abs() / (h as f64).sqrt())
        .collect();

    let images: Vec<Tensor> = (0..images)
        .map(|_| {
            let data = (0..n).map(|_| (rng.gen::<f64>() * 255.0).round() / 255.0).collect();
            Tensor::from_parts(vec![1, cfg.side, cfg.side], data)
        })
        .collect();

    let features = Network::new(
        vec![1, cfg.side, cfg.side],
        vec![
            Layer::flatten(),
            Layer::dense(n, h, u.clone(), b.clone())?,
            Layer::relu(),
            Layer::dense(h, 1, v.clone(), vec![0.0])?,
        ],
    )?;
    let mean_score = |alpha: f64| -> Result<f64> {
        let mut total = 0.0;
        for img in &images {
            total += features.output(&img.scale(alpha), 0)?;
        }
        Ok(total / images.len() as f64)
    };
    let s_c = mean_score(cfg.center)?;
    let s_lo = mean_score(cfg.center - cfg.width / 2.0)?;
    let s_hi = mean_score(cfg.center + cfg.width / 2.0)?;
    if s_hi <= s_lo {
        return Err(Error::argument("feature score is not increasing across the decision band"));
    }
    let k = 2.0 * 19f64.ln() / (s_hi - s_lo);
    let half = 8.0 / k;
    let step = 2.0 * half / cfg.pieces as f64;
    let edges: Vec<f64> = (0..=cfg.pieces).map(|i| s_c - half + i as f64 * step).collect();
    let slopes: Vec<f64> = (0..cfg.pieces)
        .map(|i| {
            let mid = 0.5 * (edges[i] + edges[i + 1]);
            let sig = 1.0 / (1.0 + (-k * (mid - s_c)).exp());
            cfg.height * k * sig * (1.0 - sig)
        })
        .collect();
    let mut coeffs = Vec::with_capacity(cfg.pieces + 1);
    let mut prev = 0.0;
    for &s in &slopes {
        coeffs.push(s - prev);
        prev = s;
    }
    coeffs.push(-prev);
    let kinks = cfg.pieces + 1;
    let neg_edges: Vec<f64> = edges.iter().map(|e| -e).collect();

    let net = Network::new(
        vec![1, cfg.side, cfg.side],
        vec![
            Layer::flatten(),
            Layer::dense(n, h, u, b)?,
            Layer::relu(),
            Layer::dense(h, 1, v, vec![0.0])?,
            Layer::dense(1, kinks, vec![1.0; kinks], neg_edges)?,
            Layer::relu(),
            Layer::dense(kinks, 1, coeffs, vec![0.0])?,
        ],
    )?;
    Ok((net, images))
}
