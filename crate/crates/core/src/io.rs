//! Text formats: `DGNET1` weights files, plain PGM images and CSV tensors.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! writer/reader pair here reproduces values bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::data::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::nn::{ConvGeometry, Layer, LayerSpec, Network};
use crate::tensor::Tensor;

const MAGIC: &str = "DGNET1";

pub fn write_weights(net: &Network) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str("input");
    for d in net.input_shape() {
        let _ = write!(out, " {d}");
    }
    out.push('\n');
    let _ = writeln!(out, "layers {}", net.layers().len());
    for layer in net.layers() {
        let spec = layer.spec();
        out.push_str(spec.keyword());
        match *spec {
            LayerSpec::Dense { inputs, units } => {
                let _ = write!(out, " {inputs} {units}");
            }
            LayerSpec::Conv2d(g) => {
                let _ = write!(
                    out,
                    " {} {} {} {} {}",
                    g.in_channels, g.out_channels, g.kernel, g.stride, g.padding
                );
            }
            LayerSpec::Bias { len } => {
                let _ = write!(out, " {len}");
            }
            LayerSpec::Relu | LayerSpec::Flatten | LayerSpec::Softmax => {}
        }
        out.push('\n');
    }
    let _ = writeln!(out, "params {}", net.param_count());
    for layer in net.layers() {
        for v in layer.weight().iter().chain(layer.bias_values()) {
            let _ = writeln!(out, "{v}");
        }
    }
    out
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what}")))
}

pub fn read_weights(text: &str) -> Result<Network> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse(0, format!("unexpected end of file, expected {what}")))
    };

    let (ln, magic) = next("magic")?;
    if magic != MAGIC {
        return Err(Error::parse(ln, format!("expected magic {MAGIC}")));
    }
    let (ln, input) = next("input shape")?;
    let mut toks = input.split_whitespace();
    if toks.next() != Some("input") {
        return Err(Error::parse(ln, "expected `input`"));
    }
    let input_shape = toks
        .map(|t| t.parse::<usize>().map_err(|_| Error::parse(ln, "invalid input dimension")))
        .collect::<Result<Vec<_>>>()?;

    let (ln, header) = next("layer count")?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("layers") {
        return Err(Error::parse(ln, "expected `layers`"));
    }
    let count = parse_usize(toks.next(), ln, "layer count")?;

    let mut specs = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, line) = next("layer")?;
        let mut t = line.split_whitespace();
        let spec = match t.next() {
            Some("dense") => LayerSpec::Dense {
                inputs: parse_usize(t.next(), ln, "inputs")?,
                units: parse_usize(t.next(), ln, "units")?,
            },
            Some("conv2d") => LayerSpec::Conv2d(ConvGeometry {
                in_channels: parse_usize(t.next(), ln, "in_channels")?,
                out_channels: parse_usize(t.next(), ln, "out_channels")?,
                kernel: parse_usize(t.next(), ln, "kernel")?,
                stride: parse_usize(t.next(), ln, "stride")?,
                padding: parse_usize(t.next(), ln, "padding")?,
            }),
            Some("bias") => LayerSpec::Bias {
                len: parse_usize(t.next(), ln, "length")?,
            },
            Some("relu") => LayerSpec::Relu,
            Some("flatten") => LayerSpec::Flatten,
            Some("softmax") => LayerSpec::Softmax,
            Some(other) => return Err(Error::parse(ln, format!("unknown layer kind `{other}`"))),
            None => return Err(Error::parse(ln, "empty layer line")),
        };
        specs.push(spec);
    }

    let (ln, header) = next("params")?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("params") {
        return Err(Error::parse(ln, "expected `params`"));
    }
    let declared = parse_usize(toks.next(), ln, "parameter count")?;
    let mut values = Vec::with_capacity(declared);
    for (ln, line) in lines {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(ln, format!("invalid parameter `{tok}`")))?;
            values.push(v);
        }
    }
    let expected: usize = specs.iter().map(|s| s.param_counts()).map(|(w, b)| w + b).sum();
    if declared != expected || values.len() != expected {
        return Err(Error::parse(
            0,
            format!("expected {expected} parameters, header says {declared}, found {}", values.len()),
        ));
    }

    let mut rest = values.as_slice();
    let mut layers = Vec::with_capacity(specs.len());
    for spec in specs {
        let (nw, nb) = spec.param_counts();
        let (w, tail) = rest.split_at(nw);
        let (b, tail) = tail.split_at(nb);
        rest = tail;
        layers.push(Layer::new(spec, w.to_vec(), b.to_vec())?);
    }
    Network::new(input_shape, layers)
}

pub fn save_weights(path: &Path, net: &Network) -> Result<()> {
    write_file(path, &write_weights(net))
}

pub fn load_weights(path: &Path) -> Result<Network> {
    read_weights(&read_file(path)?)
}

/// Grayscale `[1, h, w]` or `[h, w]` tensor in `[0, 1]` as plain PGM (P2, maxval 255).
pub fn write_pgm(image: &Tensor) -> Result<String> {
    let (h, w) = match *image.shape() {
        [1, h, w] | [h, w] => (h, w),
        _ => {
            return Err(Error::argument(format!(
                "PGM needs a single-channel image, got shape {:?}",
                image.shape()
            )))
        }
    };
    let mut out = format!("P2\n{w} {h}\n255\n");
    for row in image.data().chunks(w) {
        let line: Vec<String> = row
            .iter()
            .map(|v| ((v.clamp(0.0, 1.0) * 255.0).round() as u8).to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Parses a plain PGM into a `[1, h, w]` tensor scaled to `[0, 1]`.
pub fn read_pgm(text: &str) -> Result<Tensor> {
    let mut tokens = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        tokens.extend(content.split_whitespace().map(|t| (i + 1, t)));
    }
    let mut it = tokens.into_iter();
    match it.next() {
        Some((_, "P2")) => {}
        Some((ln, _)) => return Err(Error::parse(ln, "expected P2 magic")),
        None => return Err(Error::parse(1, "empty PGM")),
    }
    let mut header = [0usize; 3];
    for (slot, what) in header.iter_mut().zip(["width", "height", "maxval"]) {
        let (ln, tok) = it.next().ok_or_else(|| Error::parse(0, format!("missing {what}")))?;
        *slot = tok.parse().map_err(|_| Error::parse(ln, format!("invalid {what}")))?;
    }
    let [w, h, maxval] = header;
    if maxval == 0 {
        return Err(Error::parse(0, "maxval must be positive"));
    }
    let mut data = Vec::with_capacity(w * h);
    for (ln, tok) in it {
        let v: usize = tok.parse().map_err(|_| Error::parse(ln, format!("invalid pixel `{tok}`")))?;
        if v > maxval {
            return Err(Error::parse(ln, format!("pixel {v} exceeds maxval {maxval}")));
        }
        data.push(v as f64 / maxval as f64);
    }
    if data.len() != w * h {
        return Err(Error::parse(0, format!("expected {} pixels, found {}", w * h, data.len())));
    }
    Tensor::new(vec![1, h, w], data)
}

/// `shape:d1,d2,...` header then one value per line.
pub fn write_tensor_csv(t: &Tensor) -> String {
    let dims: Vec<String> = t.shape().iter().map(usize::to_string).collect();
    let mut out = format!("shape:{}\n", dims.join(","));
    for v in t.data() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn read_tensor_csv(text: &str) -> Result<Tensor> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty tensor file"))?;
    let dims = header
        .trim()
        .strip_prefix("shape:")
        .ok_or_else(|| Error::parse(1, "expected `shape:` header"))?;
    let shape = dims
        .split(',')
        .filter(|d| !d.is_empty())
        .map(|d| d.trim().parse::<usize>().map_err(|_| Error::parse(1, format!("invalid dimension `{d}`"))))
        .collect::<Result<Vec<_>>>()?;
    let mut data = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        data.push(
            line.parse::<f64>()
                .map_err(|_| Error::parse(i + 1, format!("invalid value `{line}`")))?,
        );
    }
    Tensor::new(shape, data).map_err(|e| Error::parse(0, e.to_string()))
}

pub const LABELS_FILE: &str = "labels.csv";

/// Writes `img_NNNNN.pgm` per sample plus a `file,label` index.
pub fn save_dataset(dir: &Path, data: &Dataset) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut index = String::from("file,label\n");
    for (i, s) in data.samples.iter().enumerate() {
        let name = format!("img_{i:05}.pgm");
        write_file(&dir.join(&name), &write_pgm(&s.image)?)?;
        let _ = writeln!(index, "{name},{}", s.label);
    }
    write_file(&dir.join(LABELS_FILE), &index)
}

/// Reads a directory written by [`save_dataset`]. Masks are not stored, so
/// loaded samples have empty masks.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let index = read_file(&dir.join(LABELS_FILE))?;
    let mut lines = index.lines().enumerate();
    match lines.next() {
        Some((_, "file,label")) => {}
        _ => return Err(Error::parse(1, "expected `file,label` header")),
    }
    let mut samples = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (file, label) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(i + 1, "expected `file,label`"))?;
        let label = label
            .trim()
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("invalid label `{label}`")))?;
        let image = read_pgm(&read_file(&dir.join(file.trim()))?)?;
        samples.push(Sample {
            image,
            label,
            mask: Vec::new(),
        });
    }
    Ok(Dataset { samples })
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::zoo;
    use proptest::prelude::*;

    #[test]
    fn weights_round_trip_bit_exact() {
        let net = zoo::toy_cnn(16, 3, 42).unwrap();
        let text = write_weights(&net);
        assert!(text.starts_with("DGNET1\ninput 1 16 16\nlayers 10\nconv2d 1 8 5 2 2\n"));
        let back = read_weights(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(write_weights(&back), text);
    }

    #[test]
    fn weights_reject_bad_files() {
        assert!(read_weights("DGNET2\n").is_err());
        let net = zoo::build_example1();
        let text = write_weights(&net);
        let truncated: String = text.lines().take(text.lines().count() - 1).collect::<Vec<_>>().join("\n");
        assert!(read_weights(&truncated).is_err());
        assert!(read_weights(&text.replace("relu", "gelu")).is_err());
    }

    #[test]
    fn pgm_round_trip_and_comments() {
        let img = Tensor::new(vec![1, 2, 3], vec![0.0, 1.0, 0.2, 0.4, 0.6, 0.8]).unwrap();
        let text = write_pgm(&img).unwrap();
        assert_eq!(text, "P2\n3 2\n255\n0 255 51\n102 153 204\n");
        let back = read_pgm(&text).unwrap();
        assert_eq!(back, img);
        let commented = "P2\n# made by hand\n2 1\n4\n0 4\n";
        assert_eq!(read_pgm(commented).unwrap().data(), &[0.0, 1.0]);
        assert!(read_pgm("P2\n2 1\n4\n0 5\n").is_err());
        assert!(write_pgm(&Tensor::zeros(&[2, 2, 2])).is_err());
    }

    #[test]
    fn dataset_directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let data = crate::data::make_dataset(crate::data::DatasetKind::Shapes, 6, 16, 3).unwrap();
        save_dataset(dir.path(), &data).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.len(), 6);
        for (a, b) in back.samples.iter().zip(&data.samples) {
            assert_eq!(a.image, b.image);
            assert_eq!(a.label, b.label);
        }
        assert!(matches!(load_dataset(&dir.path().join("missing")), Err(Error::Io { .. })));
    }

    proptest! {
        #[test]
        fn tensor_csv_round_trips(values in proptest::collection::vec(-1e12f64..1e12, 1..40)) {
            let t = Tensor::vector(values).unwrap();
            let back = read_tensor_csv(&write_tensor_csv(&t)).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
