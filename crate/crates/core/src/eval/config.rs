//! `key=value` experiment configuration files.
//!
//! ```text
//! # synthetic source
//! source=synthetic
//! ambient=50
//! subspaces=5*4x20          # comma list of <dim>x<count>, `r*` repeats
//! coeff_scale=1
//! basis=independent-orthogonal
//! noise=gaussian            # none | gaussian | pixel
//! rho=0.05
//! clip=0,255
//! noise_stage=before-split  # or after-split
//! method=pce                # pce | pca | lle-npe | raw
//! lambda=10
//! center=false
//! dim=20                    # pca, lle-npe
//! neighbors=5               # lle-npe
//! reg=0.001                 # lle-npe
//! classifier=nn
//! trials=10
//! train_fraction=0.5
//! base_seed=0
//! output=report.csv
//! ```
//!
//! A file source uses `source=file` and `data=<path>`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use super::experiment::{Classifier, DataSource, ExperimentConfig, Method, NoiseStage};
use crate::data::format::{content_lines, FormatError, Line};
use crate::data::{BasisRule, NoiseKind, NoiseSpec, SubspaceBlock, SubspaceSpec};
use crate::pce::DEFAULT_LAMBDA;

const KEYS: &[&str] = &[
    "source",
    "data",
    "ambient",
    "subspaces",
    "coeff_scale",
    "basis",
    "noise",
    "rho",
    "clip",
    "noise_stage",
    "method",
    "lambda",
    "center",
    "dim",
    "neighbors",
    "reg",
    "classifier",
    "trials",
    "train_fraction",
    "base_seed",
    "output",
];

struct Entry<'a> {
    line: Line<'a>,
    column: usize,
    value: &'a str,
}

impl Entry<'_> {
    fn error(&self, message: impl Into<String>) -> FormatError {
        self.line.error(self.column, message)
    }

    fn parse<T: std::str::FromStr>(&self, what: &str) -> Result<T, FormatError> {
        self.value
            .parse()
            .map_err(|_| self.error(format!("invalid {what} `{}`", self.value)))
    }

    fn float(&self) -> Result<f64, FormatError> {
        let v: f64 = self.parse("number")?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.error(format!("non-finite number `{}`", self.value)))
        }
    }

    fn boolean(&self) -> Result<bool, FormatError> {
        match self.value {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(self.error(format!("invalid boolean `{other}`"))),
        }
    }
}

struct Entries<'a> {
    map: BTreeMap<&'a str, Entry<'a>>,
}

impl<'a> Entries<'a> {
    fn get(&self, key: &str) -> Option<&Entry<'a>> {
        self.map.get(key)
    }

    fn required(&self, key: &str, context: &str) -> Result<&Entry<'a>, FormatError> {
        self.get(key)
            .ok_or_else(|| FormatError::at(1, 1, format!("`{key}` is required {context}")))
    }

    fn float_or(&self, key: &str, default: f64) -> Result<f64, FormatError> {
        self.get(key).map_or(Ok(default), Entry::float)
    }

    fn count_or(&self, key: &str, default: usize) -> Result<usize, FormatError> {
        self.get(key).map_or(Ok(default), |e| e.parse("count"))
    }
}

pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig, FormatError> {
    let mut map = BTreeMap::new();
    for line in content_lines(text) {
        let body = line.text.split_once(" #").map_or(line.text, |(b, _)| b);
        let indent = body.len() - body.trim_start().len();
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| line.error(indent + 1, "expected key=value"))?;
        let key_trimmed = key.trim();
        if !KEYS.contains(&key_trimmed) {
            return Err(line.error(
                indent + 1,
                format!("unknown key `{key_trimmed}` (valid keys: {})", KEYS.join(", ")),
            ));
        }
        let value_trimmed = value.trim();
        let column = key.len() + 2 + (value.len() - value.trim_start().len());
        if map.contains_key(key_trimmed) {
            return Err(line.error(indent + 1, format!("duplicate key `{key_trimmed}`")));
        }
        map.insert(
            key_trimmed,
            Entry {
                line,
                column,
                value: value_trimmed,
            },
        );
    }
    let entries = Entries { map };

    let source = match entries.get("source").map(|e| (e, e.value)) {
        None | Some((_, "synthetic")) => {
            if let Some(e) = entries.get("data") {
                if entries.get("source").is_none() {
                    DataSource::File(PathBuf::from(e.value))
                } else {
                    return Err(e.error("`data` is only valid with source=file"));
                }
            } else {
                DataSource::Synthetic(parse_spec(&entries)?)
            }
        }
        Some((_, "file")) => {
            let e = entries.required("data", "when source=file")?;
            DataSource::File(PathBuf::from(e.value))
        }
        Some((e, other)) => return Err(e.error(format!("unknown source `{other}` (valid: synthetic, file)"))),
    };

    let noise = match entries.get("noise").map(|e| (e, e.value)) {
        None | Some((_, "none")) => None,
        Some((e, kind)) => {
            let rho = entries.required("rho", "when noise is enabled")?.float()?;
            let kind = match kind {
                "gaussian" => NoiseKind::Gaussian {
                    clip: entries.get("clip").map(parse_clip).transpose()?,
                },
                "pixel" => NoiseKind::Pixel,
                other => return Err(e.error(format!("unknown noise `{other}` (valid: none, gaussian, pixel)"))),
            };
            let spec = NoiseSpec { kind, rho };
            spec.validate().map_err(|err| e.error(err.to_string()))?;
            Some(spec)
        }
    };

    let noise_stage = match entries.get("noise_stage") {
        None => NoiseStage::default(),
        Some(e) => match e.value {
            "before-split" => NoiseStage::BeforeSplit,
            "after-split" => NoiseStage::AfterSplit,
            other => {
                return Err(e.error(format!(
                    "unknown noise_stage `{other}` (valid: before-split, after-split)"
                )))
            }
        },
    };

    let method_entry = entries.get("method");
    let method = match method_entry.map_or("pce", |e| e.value) {
        "pce" => Method::Pce {
            lambda: entries.float_or("lambda", DEFAULT_LAMBDA)?,
            center: entries.get("center").map_or(Ok(false), Entry::boolean)?,
        },
        "pca" => Method::Pca {
            dim: entries.required("dim", "for method=pca")?.parse("dimension")?,
        },
        "lle-npe" => Method::LleNpe {
            neighbors: entries.count_or("neighbors", 5)?,
            dim: entries.required("dim", "for method=lle-npe")?.parse("dimension")?,
            reg: entries.float_or("reg", 1e-3)?,
        },
        "raw" => Method::Raw,
        other => {
            return Err(method_entry.expect("default method is valid").error(format!(
                "unknown method `{other}` (valid methods: {})",
                Method::NAMES.join(", ")
            )))
        }
    };

    let classifier = match entries.get("classifier") {
        None => Classifier::Nn,
        Some(e) if e.value == "nn" => Classifier::Nn,
        Some(e) => return Err(e.error(format!("unknown classifier `{}` (valid: nn)", e.value))),
    };

    let cfg = ExperimentConfig {
        source,
        noise,
        noise_stage,
        method,
        classifier,
        trials: entries.count_or("trials", 10)?,
        train_fraction: entries.float_or("train_fraction", 0.5)?,
        base_seed: entries.get("base_seed").map_or(Ok(0), |e| e.parse("seed"))?,
        output: entries.get("output").map(|e| PathBuf::from(e.value)),
    };
    cfg.validate().map_err(|e| FormatError::at(1, 1, e.to_string()))?;
    Ok(cfg)
}

fn parse_clip(e: &Entry<'_>) -> Result<(f64, f64), FormatError> {
    let (lo, hi) = e
        .value
        .split_once(',')
        .ok_or_else(|| e.error("clip must be `low,high`"))?;
    let parse = |s: &str| -> Result<f64, FormatError> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| e.error(format!("invalid clip bound `{s}`")))
    };
    Ok((parse(lo)?, parse(hi)?))
}

fn parse_spec(entries: &Entries<'_>) -> Result<SubspaceSpec, FormatError> {
    let ambient = entries.required("ambient", "for a synthetic source")?.parse("count")?;
    let subspaces = entries.required("subspaces", "for a synthetic source")?;
    let blocks = parse_blocks(subspaces)?;
    let basis_rule = match entries.get("basis") {
        None => BasisRule::IndependentOrthogonal,
        Some(e) => BasisRule::parse(e.value).ok_or_else(|| {
            e.error(format!(
                "unknown basis `{}` (valid: independent-orthogonal, random-gaussian)",
                e.value
            ))
        })?,
    };
    let spec = SubspaceSpec {
        ambient,
        blocks,
        coeff_scale: entries.float_or("coeff_scale", 1.0)?,
        basis_rule,
    };
    spec.validate().map_err(|err| subspaces.error(err.to_string()))?;
    Ok(spec)
}

/// `5*4x20,3x10` -> five 4-dimensional blocks of 20 samples, then one 3x10.
fn parse_blocks(e: &Entry<'_>) -> Result<Vec<SubspaceBlock>, FormatError> {
    let mut blocks = Vec::new();
    for item in e.value.split(',') {
        let item = item.trim();
        let bad = || e.error(format!("invalid subspace block `{item}` (expected [r*]<dim>x<count>)"));
        let (repeat, shape) = match item.split_once('*') {
            Some((r, s)) => (r.trim().parse::<usize>().map_err(|_| bad())?, s),
            None => (1, item),
        };
        let (dim, count) = shape.split_once('x').ok_or_else(bad)?;
        let block = SubspaceBlock {
            dim: dim.trim().parse().map_err(|_| bad())?,
            count: count.trim().parse().map_err(|_| bad())?,
        };
        if repeat == 0 || blocks.len() + repeat > 100_000 {
            return Err(bad());
        }
        blocks.extend(std::iter::repeat_n(block, repeat));
    }
    Ok(blocks)
}
