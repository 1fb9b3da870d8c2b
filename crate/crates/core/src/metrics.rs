//! Perturbation metrics: insertion/deletion AUC and AIC/SIC curves.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::attribution::{attribute, AttributionMap, Method, MethodConfig};
use crate::error::{Error, Result};
use crate::nn::Network;
use crate::path::StraightLinePath;
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    Insertion,
    Deletion,
    Aic,
    Sic,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [CurveKind::Insertion, CurveKind::Deletion, CurveKind::Aic, CurveKind::Sic];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Insertion => "insertion",
            CurveKind::Deletion => "deletion",
            CurveKind::Aic => "aic",
            CurveKind::Sic => "sic",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CurveKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let valid: Vec<_> = CurveKind::ALL.iter().map(|k| k.name()).collect();
            Error::argument(format!("unknown metric `{s}`, expected one of {}", valid.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationCurve {
    pub fractions: Vec<f64>,
    pub scores: Vec<f64>,
    pub kind: CurveKind,
}

impl PerturbationCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fraction,score\n");
        for (f, s) in self.fractions.iter().zip(&self.scores) {
            let _ = writeln!(out, "{f},{s}");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    /// Gaussian blur sigma for the insertion base image.
    pub sigma: f64,
    /// Pixels revealed or removed per insertion/deletion step; `None` uses the image width.
    pub pixel_step: Option<usize>,
    /// Growth ratio of the AIC/SIC pixel-count schedule.
    pub ratio: f64,
    /// The AIC/SIC base image is blurred in `blocks x blocks` independent tiles.
    pub blocks: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            sigma: 5.0,
            pixel_step: None,
            ratio: 2.0,
            blocks: 8,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::argument(format!("blur sigma must be positive, got {}", self.sigma)));
        }
        if self.pixel_step == Some(0) {
            return Err(Error::argument("pixel step must be positive"));
        }
        if !(self.ratio > 1.0 && self.ratio.is_finite()) {
            return Err(Error::argument(format!("schedule ratio must exceed 1, got {}", self.ratio)));
        }
        if self.blocks == 0 {
            return Err(Error::argument("block count must be positive"));
        }
        Ok(())
    }
}

/// `(channels, height, width)` of an image-like tensor; vectors count as one row.
fn layout(shape: &[usize]) -> (usize, usize, usize) {
    match *shape {
        [c, h, w] => (c, h, w),
        [h, w] => (1, h, w),
        _ => (1, 1, shape.iter().product()),
    }
}

/// Pixel indices by descending attribution, channels summed; ties keep row-major order.
pub fn rank_pixels(map: &AttributionMap) -> Vec<usize> {
    let (c, h, w) = layout(map.values.shape());
    let pixels = h * w;
    let data = map.values.data();
    let scores: Vec<f64> = (0..pixels).map(|p| (0..c).map(|ch| data[ch * pixels + p]).sum()).collect();
    let mut order: Vec<usize> = (0..pixels).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Widths of `n` box filters whose composition approximates a Gaussian of `sigma`.
fn box_widths(sigma: f64, n: usize) -> Vec<usize> {
    let nf = n as f64;
    let ideal = (12.0 * sigma * sigma / nf + 1.0).sqrt();
    let mut wl = ideal.floor() as i64;
    if wl % 2 == 0 {
        wl -= 1;
    }
    let wl = wl.max(1);
    let wu = wl + 2;
    let wlf = wl as f64;
    let m_ideal = (12.0 * sigma * sigma - nf * wlf * wlf - 4.0 * nf * wlf - 3.0 * nf) / (-4.0 * wlf - 4.0);
    let m = m_ideal.round().max(0.0) as usize;
    (0..n).map(|i| if i < m { wl as usize } else { wu as usize }).collect()
}

/// Half-sample symmetric reflection into `0..n`.
fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    let period = 2 * n;
    let t = i.rem_euclid(period);
    (if t < n { t } else { period - 1 - t }) as usize
}

/// Box filter of odd `width` over `len` values spaced `stride` apart from `start`.
fn box_pass(data: &mut [f64], start: usize, stride: usize, len: usize, width: usize, scratch: &mut Vec<f64>) {
    if width <= 1 || len == 0 {
        return;
    }
    let r = (width / 2) as i64;
    scratch.clear();
    scratch.push(0.0);
    for t in -r..len as i64 + r {
        let v = data[start + reflect(t, len) * stride];
        let last = *scratch.last().expect("seeded with zero");
        scratch.push(last + v);
    }
    let inv = 1.0 / width as f64;
    for i in 0..len {
        data[start + i * stride] = (scratch[i + width] - scratch[i]) * inv;
    }
}

/// Blurs the `rows x cols` window at `(top, left)` of a `width`-wide plane in place.
fn blur_window(plane: &mut [f64], width: usize, (top, left): (usize, usize), (rows, cols): (usize, usize), widths: &[usize]) {
    let mut scratch = Vec::new();
    for &bw in widths {
        for r in top..top + rows {
            box_pass(plane, r * width + left, 1, cols, bw, &mut scratch);
        }
        for c in left..left + cols {
            box_pass(plane, top * width + c, width, rows, bw, &mut scratch);
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::argument(format!("blur sigma must be positive, got {sigma}")));
    }
    Ok(())
}

/// Gaussian blur approximated by three box passes per axis, each channel separately.
pub fn blur_baseline(image: &Tensor, sigma: f64) -> Result<Tensor> {
    check_sigma(sigma)?;
    let (c, h, w) = layout(image.shape());
    let widths = box_widths(sigma, 3);
    let mut data = image.data().to_vec();
    for plane in data.chunks_mut(h * w).take(c) {
        blur_window(plane, w, (0, 0), (h, w), &widths);
    }
    Tensor::new(image.shape().to_vec(), data)
}

/// Blurs each tile of a `blocks x blocks` grid independently, so structure
/// never leaks across tile borders.
pub fn block_blur(image: &Tensor, sigma: f64, blocks: usize) -> Result<Tensor> {
    check_sigma(sigma)?;
    if blocks == 0 {
        return Err(Error::argument("block count must be positive"));
    }
    let (c, h, w) = layout(image.shape());
    let bh = (h / blocks).max(1);
    let bw = (w / blocks).max(1);
    let widths = box_widths(sigma, 3);
    let mut data = image.data().to_vec();
    for plane in data.chunks_mut(h * w).take(c) {
        for top in (0..h).step_by(bh) {
            for left in (0..w).step_by(bw) {
                let rows = bh.min(h - top);
                let cols = bw.min(w - left);
                blur_window(plane, w, (top, left), (rows, cols), &widths);
            }
        }
    }
    Tensor::new(image.shape().to_vec(), data)
}

/// Pixel counts `0, step, 2*step, ..., pixels`.
pub fn linear_schedule(pixels: usize, step: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = (0..pixels).step_by(step.max(1)).collect();
    counts.push(pixels);
    counts
}

/// Pixel counts `0, 1, r, r^2, ..., pixels`, strictly increasing.
pub fn geometric_schedule(pixels: usize, ratio: f64) -> Vec<usize> {
    let mut counts = vec![0];
    let mut next = 1usize;
    while next < pixels {
        counts.push(next);
        next = ((next as f64 * ratio).ceil() as usize).max(next + 1);
    }
    if pixels > 0 {
        counts.push(pixels);
    }
    counts
}

#[derive(Clone, Copy)]
enum Score {
    Probability,
    Correct,
}

fn score(net: &Network, image: &Tensor, class_index: usize, how: Score) -> Result<f64> {
    Ok(match how {
        Score::Probability => net.probabilities(image)?[class_index],
        Score::Correct => f64::from(u8::from(net.predict(image)? == class_index)),
    })
}

/// Moves ranked pixels from `source` into `canvas` following `counts`, scoring after each step.
#[allow(clippy::too_many_arguments)]
fn sweep(
    net: &Network,
    mut canvas: Tensor,
    source: &Tensor,
    order: &[usize],
    counts: &[usize],
    class_index: usize,
    how: Score,
    kind: CurveKind,
) -> Result<PerturbationCurve> {
    let (c, h, w) = layout(source.shape());
    let pixels = h * w;
    let mut fractions = Vec::with_capacity(counts.len());
    let mut scores = Vec::with_capacity(counts.len());
    let mut done = 0;
    for &count in counts {
        for &p in &order[done..count] {
            for ch in 0..c {
                canvas.data_mut()[ch * pixels + p] = source.data()[ch * pixels + p];
            }
        }
        done = count;
        fractions.push(count as f64 / pixels as f64);
        scores.push(score(net, &canvas, class_index, how)?);
    }
    Ok(PerturbationCurve { fractions, scores, kind })
}

fn check_inputs(image: &Tensor, map: &AttributionMap) -> Result<usize> {
    image.ensure_same_shape(&map.values)?;
    let (_, h, w) = layout(image.shape());
    if h * w == 0 {
        return Err(Error::argument("image has no pixels"));
    }
    Ok(h * w)
}

/// Reveals ranked pixels over a blurred copy; scores the target probability.
pub fn insertion_curve(net: &Network, image: &Tensor, map: &AttributionMap, cfg: &MetricConfig) -> Result<PerturbationCurve> {
    cfg.validate()?;
    let pixels = check_inputs(image, map)?;
    let step = cfg.pixel_step.unwrap_or_else(|| layout(image.shape()).2);
    let base = blur_baseline(image, cfg.sigma)?;
    let counts = linear_schedule(pixels, step);
    sweep(net, base, image, &rank_pixels(map), &counts, map.class_index, Score::Probability, CurveKind::Insertion)
}

/// Sets ranked pixels to zero; scores the target probability.
pub fn deletion_curve(net: &Network, image: &Tensor, map: &AttributionMap, cfg: &MetricConfig) -> Result<PerturbationCurve> {
    cfg.validate()?;
    let pixels = check_inputs(image, map)?;
    let step = cfg.pixel_step.unwrap_or_else(|| layout(image.shape()).2);
    let black = Tensor::zeros(image.shape());
    let counts = linear_schedule(pixels, step);
    sweep(net, image.clone(), &black, &rank_pixels(map), &counts, map.class_index, Score::Probability, CurveKind::Deletion)
}

/// Geometric-schedule insertion over a tile-blurred base, scored 1 when the target is the argmax.
pub fn aic_curve(net: &Network, image: &Tensor, map: &AttributionMap, cfg: &MetricConfig) -> Result<PerturbationCurve> {
    cfg.validate()?;
    let pixels = check_inputs(image, map)?;
    let base = block_blur(image, cfg.sigma, cfg.blocks)?;
    let counts = geometric_schedule(pixels, cfg.ratio);
    sweep(net, base, image, &rank_pixels(map), &counts, map.class_index, Score::Correct, CurveKind::Aic)
}

/// Geometric-schedule insertion over a tile-blurred base, scored by target probability.
pub fn sic_curve(net: &Network, image: &Tensor, map: &AttributionMap, cfg: &MetricConfig) -> Result<PerturbationCurve> {
    cfg.validate()?;
    let pixels = check_inputs(image, map)?;
    let base = block_blur(image, cfg.sigma, cfg.blocks)?;
    let counts = geometric_schedule(pixels, cfg.ratio);
    sweep(net, base, image, &rank_pixels(map), &counts, map.class_index, Score::Probability, CurveKind::Sic)
}

pub fn curve(kind: CurveKind, net: &Network, image: &Tensor, map: &AttributionMap, cfg: &MetricConfig) -> Result<PerturbationCurve> {
    match kind {
        CurveKind::Insertion => insertion_curve(net, image, map, cfg),
        CurveKind::Deletion => deletion_curve(net, image, map, cfg),
        CurveKind::Aic => aic_curve(net, image, map, cfg),
        CurveKind::Sic => sic_curve(net, image, map, cfg),
    }
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &PerturbationCurve) -> Result<f64> {
    if curve.fractions.len() < 2 || curve.fractions.len() != curve.scores.len() {
        return Err(Error::argument("AUC needs at least two matching points"));
    }
    Ok(curve
        .fractions
        .windows(2)
        .zip(curve.scores.windows(2))
        .map(|(f, s)| (f[1] - f[0]) * (s[0] + s[1]) / 2.0)
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AucRow {
    pub image_id: usize,
    pub metric: CurveKind,
    pub method: Method,
    pub auc: f64,
    pub curve: PerturbationCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    /// Ordered by image, then method, then metric.
    pub rows: Vec<AucRow>,
    pub methods: Vec<Method>,
    pub metrics: Vec<CurveKind>,
}

impl BatchReport {
    pub fn mean(&self, metric: CurveKind, method: Method) -> Option<f64> {
        let values: Vec<f64> = self.values(metric, method).collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    /// Per-image AUCs for one metric/method pair, in image order.
    pub fn values(&self, metric: CurveKind, method: Method) -> impl Iterator<Item = f64> + '_ {
        self.rows
            .iter()
            .filter(move |r| r.metric == metric && r.method == method)
            .map(|r| r.auc)
    }

    /// `image_id,metric,method,auc` rows followed by `mean` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("image_id,metric,method,auc\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.image_id, r.metric, r.method, r.auc);
        }
        for &method in &self.methods {
            for &metric in &self.metrics {
                if let Some(m) = self.mean(metric, method) {
                    let _ = writeln!(out, "mean,{metric},{method},{m}");
                }
            }
        }
        out
    }
}

/// Attributes every image against a black baseline for its predicted class
/// and scores each requested metric. Images run in parallel on the current
/// rayon pool; rows come back in image order.
pub fn evaluate_batch(
    net: &Network,
    images: &[Tensor],
    methods: &[Method],
    metrics: &[CurveKind],
    method_cfg: &MethodConfig,
    metric_cfg: &MetricConfig,
) -> Result<BatchReport> {
    if images.is_empty() {
        return Err(Error::argument("evaluation needs at least one image"));
    }
    if methods.is_empty() || metrics.is_empty() {
        return Err(Error::argument("evaluation needs at least one method and one metric"));
    }
    metric_cfg.validate()?;
    let per_image = images
        .par_iter()
        .enumerate()
        .map(|(image_id, image)| {
            let class_index = net.predict(image)?;
            let path = StraightLinePath::from_black(image.clone());
            let mut rows = Vec::with_capacity(methods.len() * metrics.len());
            for &method in methods {
                let map = attribute(method, net, &path, class_index, method_cfg)?;
                for &metric in metrics {
                    let c = curve(metric, net, image, &map, metric_cfg)?;
                    rows.push(AucRow {
                        image_id,
                        metric,
                        method,
                        auc: auc(&c)?,
                        curve: c,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchReport {
        rows: per_image.into_iter().flatten().collect(),
        methods: methods.to_vec(),
        metrics: metrics.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::zoo;

    fn map_of(values: Vec<f64>, shape: Vec<usize>, class_index: usize) -> AttributionMap {
        AttributionMap {
            values: Tensor::new(shape, values).unwrap(),
            method: Method::Grad,
            steps: 1,
            class_index,
            warning: None,
        }
    }

    #[test]
    fn ranking() {
        assert_eq!(rank_pixels(&map_of(vec![5.0, 1.0, 3.0], vec![3], 0)), vec![0, 2, 1]);
        assert_eq!(rank_pixels(&map_of(vec![2.0; 4], vec![1, 2, 2], 0)), vec![0, 1, 2, 3]);
        // Pixel 0 holds (1, 1), pixel 1 holds (3, 0); storage is channel-major.
        let m = map_of(vec![1.0, 3.0, 1.0, 0.0], vec![2, 1, 2], 0);
        assert_eq!(rank_pixels(&m), vec![1, 0]);
    }

    #[test]
    fn box_widths_limits() {
        assert_eq!(box_widths(1e-6, 3), vec![1, 1, 1]);
        let w = box_widths(5.0, 3);
        // Variance of the composed boxes should match sigma^2.
        let var: f64 = w.iter().map(|&b| ((b * b) as f64 - 1.0) / 12.0).sum();
        assert!((var.sqrt() - 5.0).abs() < 1.0, "{w:?}");
    }

    #[test]
    fn blur_properties() {
        let c = Tensor::filled(&[1, 9, 7], 0.4);
        let b = blur_baseline(&c, 5.0).unwrap();
        assert!(b.data().iter().all(|v| (v - 0.4).abs() < 1e-12));

        let mut spike = vec![0.0; 81];
        spike[3 * 9 + 5] = 1.0;
        let t = Tensor::new(vec![1, 9, 9], spike).unwrap();
        let b = blur_baseline(&t, 2.0).unwrap();
        assert!((b.sum() - 1.0).abs() < 1e-9);
        assert!(b.data().iter().all(|&v| (0.0..1.0).contains(&v)));

        let img = Tensor::new(vec![1, 3, 3], (0..9).map(f64::from).collect()).unwrap();
        assert_eq!(blur_baseline(&img, 1e-6).unwrap(), img);
        assert!(blur_baseline(&img, 0.0).is_err());
    }

    #[test]
    fn block_blur_keeps_tiles_separate() {
        // Left half 1, right half 0, tiles aligned with the split: nothing bleeds across.
        let mut d = vec![0.0; 64];
        for r in 0..8 {
            for c in 0..4 {
                d[r * 8 + c] = 1.0;
            }
        }
        let t = Tensor::new(vec![1, 8, 8], d).unwrap();
        assert_eq!(block_blur(&t, 3.0, 2).unwrap(), t);
        let mass = block_blur(&Tensor::new(vec![1, 8, 8], (0..64).map(f64::from).collect()).unwrap(), 3.0, 4).unwrap();
        assert!((mass.sum() - (0..64).sum::<i32>() as f64).abs() < 1e-9);
    }

    #[test]
    fn schedules() {
        assert_eq!(linear_schedule(9, 3), vec![0, 3, 6, 9]);
        assert_eq!(linear_schedule(10, 3), vec![0, 3, 6, 9, 10]);
        let g = geometric_schedule(1024, 2.0);
        let expected: Vec<usize> = std::iter::once(0).chain((0..=10).map(|k| 1 << k)).collect();
        assert_eq!(g, expected);
        let g = geometric_schedule(1000, 1.5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*g.last().unwrap(), 1000);
    }

    #[test]
    fn auc_examples() {
        let mk = |f: Vec<f64>, s: Vec<f64>| PerturbationCurve { fractions: f, scores: s, kind: CurveKind::Insertion };
        assert_eq!(auc(&mk(vec![0.0, 0.5, 1.0], vec![0.5; 3])).unwrap(), 0.5);
        assert_eq!(auc(&mk(vec![0.0, 0.25, 1.0], vec![0.0, 0.25, 1.0])).unwrap(), 0.5);
        assert_eq!(auc(&mk(vec![0.0, 1.0], vec![0.0, 1.0])).unwrap(), 0.5);
        assert!(auc(&mk(vec![0.0], vec![1.0])).is_err());
    }

    #[test]
    fn endpoints() {
        let net = zoo::toy_cnn(16, 3, 3).unwrap();
        let img = Tensor::new(vec![1, 16, 16], (0..256).map(|i| ((i * 37) % 255) as f64 / 255.0).collect()).unwrap();
        let class = net.predict(&img).unwrap();
        let map = map_of(img.data().to_vec(), vec![1, 16, 16], class);
        let cfg = MetricConfig::default();
        let p = |x: &Tensor| net.probabilities(x).unwrap()[class];

        let ins = insertion_curve(&net, &img, &map, &cfg).unwrap();
        assert_eq!(ins.fractions.len(), 17);
        assert_eq!(ins.scores[0], p(&blur_baseline(&img, 5.0).unwrap()));
        assert_eq!(*ins.scores.last().unwrap(), p(&img));

        let del = deletion_curve(&net, &img, &map, &cfg).unwrap();
        assert_eq!(del.scores[0], p(&img));
        assert_eq!(*del.scores.last().unwrap(), p(&Tensor::zeros(&[1, 16, 16])));

        let sic = sic_curve(&net, &img, &map, &cfg).unwrap();
        assert_eq!(sic.fractions[0], 0.0);
        assert_eq!(*sic.fractions.last().unwrap(), 1.0);
        assert_eq!(*sic.scores.last().unwrap(), p(&img));
        for c in [&ins, &del, &sic] {
            let a = auc(c).unwrap();
            assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn uniform_map_deletes_in_row_major_order() {
        let net = zoo::toy_cnn(16, 3, 5).unwrap();
        let img = Tensor::filled(&[1, 16, 16], 0.7);
        let cfg = MetricConfig::default();
        let del = deletion_curve(&net, &img, &map_of(vec![1.0; 256], vec![1, 16, 16], 0), &cfg).unwrap();
        for (k, s) in del.scores.iter().enumerate() {
            let mut d = vec![0.7; 256];
            d[..k * 16].iter_mut().for_each(|v| *v = 0.0);
            let manual = net.probabilities(&Tensor::new(vec![1, 16, 16], d).unwrap()).unwrap()[0];
            assert_eq!(*s, manual);
        }
    }

    #[test]
    fn aic_constant_models() {
        let img = Tensor::filled(&[1, 16, 16], 0.5);
        let net = zoo::constant(vec![1, 16, 16], vec![1.0, 0.0]).unwrap();
        let cfg = MetricConfig::default();
        let always = aic_curve(&net, &img, &map_of(vec![0.0; 256], vec![1, 16, 16], 0), &cfg).unwrap();
        assert_eq!(auc(&always).unwrap(), 1.0);
        let never = aic_curve(&net, &img, &map_of(vec![0.0; 256], vec![1, 16, 16], 1), &cfg).unwrap();
        assert_eq!(auc(&never).unwrap(), 0.0);
    }

    #[test]
    fn batch_report_single_image_mean() {
        let net = zoo::toy_cnn(16, 3, 11).unwrap();
        let img = Tensor::new(vec![1, 16, 16], (0..256).map(|i| (i % 7) as f64 / 7.0).collect()).unwrap();
        let r = evaluate_batch(
            &net,
            &[img],
            &[Method::Ig, Method::Idg],
            &[CurveKind::Deletion, CurveKind::Insertion],
            &MethodConfig::default(),
            &MetricConfig::default(),
        )
        .unwrap();
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.mean(CurveKind::Deletion, Method::Ig), Some(r.rows[0].auc));
        let csv = r.to_csv();
        assert!(csv.starts_with("image_id,metric,method,auc\n0,deletion,ig,"));
        assert_eq!(csv.lines().count(), 1 + 4 + 4);
        assert!(evaluate_batch(&net, &[], &[Method::Ig], &[CurveKind::Deletion], &MethodConfig::default(), &MetricConfig::default()).is_err());
    }
}
