use std::fmt;
use std::path::{Path, PathBuf};

use idg_core::nn::zoo::{self, SteepLogistic};
use idg_core::{io, Error, Network, Tensor};

/// Errors surfaced to the shell; each maps to a fixed exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or inputs that fail validation (exit code 2).
    Usage(String),
    /// Filesystem failures (exit code 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub const BUILTIN_EXAMPLE1: &str = "builtin:example1";
pub const BUILTIN_STEEP: &str = "builtin:steep";
pub const STEEP_IMAGES: usize = 10;

/// A model plus any images that ship with it.
pub struct LoadedModel {
    pub net: Network,
    pub images: Vec<Tensor>,
}

/// Reads a weights file, or builds `builtin:example1` / `builtin:steep`.
pub fn load_model(spec: &str, seed: u64) -> CliResult<LoadedModel> {
    match spec {
        BUILTIN_EXAMPLE1 => Ok(LoadedModel {
            net: zoo::build_example1(),
            images: Vec::new(),
        }),
        BUILTIN_STEEP => {
            let (net, images) = zoo::steep_logistic_suite(&SteepLogistic::default(), STEEP_IMAGES, seed)?;
            Ok(LoadedModel { net, images })
        }
        path => Ok(LoadedModel {
            net: io::load_weights(Path::new(path))?,
            images: Vec::new(),
        }),
    }
}

/// Reads a PGM (`.pgm`) or tensor CSV and reshapes it to the model input.
pub fn load_input(path: &Path, net: &Network) -> CliResult<Tensor> {
    let text = io::read_file(path)?;
    let is_pgm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let t = if is_pgm { io::read_pgm(&text)? } else { io::read_tensor_csv(&text)? };
    let want: usize = net.input_shape().iter().product();
    if t.len() != want {
        return Err(CliError::Usage(format!(
            "{} holds {} values but the model expects shape {:?}",
            path.display(),
            t.len(),
            net.input_shape()
        )));
    }
    Ok(t.reshape(net.input_shape().to_vec())?)
}

/// `auto` picks the argmax of the input's outputs.
pub fn resolve_class(class: &str, net: &Network, x: &Tensor) -> CliResult<usize> {
    if class == "auto" {
        return Ok(net.predict(x)?);
    }
    let c: usize = class
        .parse()
        .map_err(|_| CliError::Usage(format!("class must be `auto` or an index, got `{class}`")))?;
    if c >= net.class_count() {
        return Err(CliError::Usage(format!(
            "class {c} out of range for {} outputs",
            net.class_count()
        )));
    }
    Ok(c)
}

/// Images from `--data`, else those bundled with the model.
pub fn experiment_images(data: Option<&Path>, model: &LoadedModel, limit: usize) -> CliResult<Vec<Tensor>> {
    let images: Vec<Tensor> = match data {
        Some(dir) => require_dataset(dir)?.samples.into_iter().map(|s| s.image).collect(),
        None if !model.images.is_empty() => model.images.clone(),
        None => return Err(CliError::Usage("this model ships no images; pass --data".into())),
    };
    let images: Vec<Tensor> = images.into_iter().take(limit).collect();
    if images.is_empty() {
        return Err(CliError::Usage("no images to process".into()));
    }
    Ok(images)
}

/// Loads a dataset directory; a missing or empty one is a usage error.
pub fn require_dataset(dir: &Path) -> CliResult<idg_core::Dataset> {
    if !dir.join(io::LABELS_FILE).is_file() {
        return Err(CliError::Usage(format!(
            "no dataset at {} (missing {})",
            dir.display(),
            io::LABELS_FILE
        )));
    }
    let data = io::load_dataset(dir)?;
    if data.is_empty() {
        return Err(CliError::Usage(format!("dataset at {} is empty", dir.display())));
    }
    Ok(data)
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_output(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    io::write_file(&path, contents)?;
    Ok(path)
}

/// Parses `a,b,c` into a list.
pub fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> CliResult<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Usage(format!("invalid {what} `{s}`")))
        })
        .collect()
}
