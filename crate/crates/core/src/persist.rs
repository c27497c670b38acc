//! Text model files.
//!
//! ```text
//! pce-model v1
//! lambda=<float>
//! k=<int>
//! m=<int>
//! n=<int>
//! spectrum=<floats>
//! mean=<m floats>          # only for centered fits
//! meta.<key>=<text>        # any number
//! theta:
//! <m rows of k floats>
//! ```
//!
//! `#` comment lines and blank lines are ignored everywhere.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::data::format::{
    content_lines, format_f64, parse_f64, parse_usize, read_text, write_atomic, FormatError, Line,
};
use crate::error::PceError;
use crate::pce::PceModel;

pub const MODEL_MAGIC: &str = "pce-model";
pub const MODEL_VERSION: &str = "v1";

/// A model plus free-form metadata lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: PceModel,
    pub meta: BTreeMap<String, String>,
}

impl ModelFile {
    pub fn new(model: PceModel) -> Self {
        Self {
            model,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }
}

fn valid_meta_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
}

fn join_floats(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(format_f64).collect::<Vec<_>>().join(" ")
}

pub fn format_model(file: &ModelFile) -> Result<String, PceError> {
    let model = &file.model;
    let mut out = format!("{MODEL_MAGIC} {MODEL_VERSION}\n");
    let _ = writeln!(out, "lambda={}", format_f64(model.lambda));
    let _ = writeln!(out, "k={}", model.k);
    let _ = writeln!(out, "m={}", model.input_dim());
    let _ = writeln!(out, "n={}", model.train_cols);
    let _ = writeln!(out, "spectrum={}", join_floats(model.spectrum.iter().copied()));
    if let Some(mean) = &model.mean {
        let _ = writeln!(out, "mean={}", join_floats(mean.iter().copied()));
    }
    for (key, value) in &file.meta {
        if !valid_meta_key(key) {
            return Err(PceError::InvalidArgument(format!("invalid metadata key `{key}`")));
        }
        if value.contains(['\n', '\r']) || value.trim() != value {
            return Err(PceError::InvalidArgument(format!(
                "metadata `{key}` must be a single line without surrounding blanks"
            )));
        }
        let _ = writeln!(out, "meta.{key}={value}");
    }
    out.push_str("theta:\n");
    for row in model.theta.row_iter() {
        out.push_str(&join_floats(row.iter().copied()));
        out.push('\n');
    }
    Ok(out)
}

struct Field<'a> {
    line: Line<'a>,
    column: usize,
    value: &'a str,
}

impl Field<'_> {
    fn count(&self) -> Result<usize, FormatError> {
        parse_usize(&self.line, self.column, self.value.trim())
    }

    fn floats(&self) -> Result<Vec<f64>, FormatError> {
        let offset = self.column - 1;
        Line {
            number: self.line.number,
            text: self.value,
        }
        .tokens()
        .map(|(col, tok)| parse_f64(&self.line, col + offset, tok))
        .collect()
    }
}

pub fn parse_model(text: &str) -> Result<ModelFile, FormatError> {
    let mut lines = content_lines(text);
    let header = lines.next().ok_or_else(|| FormatError::at(1, 1, "empty model file"))?;
    let mut tokens = header.tokens();
    match tokens.next() {
        Some((_, MODEL_MAGIC)) => {}
        Some((col, other)) => return Err(header.error(col, format!("expected `{MODEL_MAGIC}`, found `{other}`"))),
        None => return Err(header.error(1, "missing header")),
    }
    match tokens.next() {
        Some((_, MODEL_VERSION)) => {}
        Some((col, other)) => return Err(header.error(col, format!("unsupported model version `{other}`"))),
        None => return Err(header.error(header.text.len() + 1, "missing model version")),
    }
    if let Some((col, tok)) = tokens.next() {
        return Err(header.error(col, format!("unexpected `{tok}` after the header")));
    }

    let mut fields: BTreeMap<&str, Field<'_>> = BTreeMap::new();
    let mut meta = BTreeMap::new();
    let mut theta_line = None;
    for line in lines.by_ref() {
        let indent = line.text.len() - line.text.trim_start().len();
        if line.text.trim() == "theta:" {
            theta_line = Some(line);
            break;
        }
        let (key, value) = line
            .text
            .split_once('=')
            .ok_or_else(|| line.error(indent + 1, "expected key=value or `theta:`"))?;
        let key = key.trim();
        let column = line.text.len() - value.len() + 1;
        if let Some(meta_key) = key.strip_prefix("meta.") {
            if !valid_meta_key(meta_key) {
                return Err(line.error(indent + 1, format!("invalid metadata key `{meta_key}`")));
            }
            if meta.insert(meta_key.to_string(), value.trim().to_string()).is_some() {
                return Err(line.error(indent + 1, format!("duplicate metadata `{meta_key}`")));
            }
            continue;
        }
        if !["lambda", "k", "m", "n", "spectrum", "mean"].contains(&key) {
            return Err(line.error(indent + 1, format!("unknown model field `{key}`")));
        }
        if fields.insert(key, Field { line, column, value }).is_some() {
            return Err(line.error(indent + 1, format!("duplicate model field `{key}`")));
        }
    }
    let theta_line =
        theta_line.ok_or_else(|| FormatError::at(text.lines().count().max(1), 1, "missing `theta:` section"))?;
    let field = |key: &str| {
        fields
            .get(key)
            .ok_or_else(|| theta_line.error(1, format!("missing `{key}=` before `theta:`")))
    };

    let lambda_field = field("lambda")?;
    let lambda = parse_f64(&lambda_field.line, lambda_field.column, lambda_field.value.trim())?;
    if lambda <= 0.0 {
        return Err(FormatError::Invalid(PceError::InvalidLambda(lambda)));
    }
    let k_field = field("k")?;
    let k = k_field.count()?;
    if k == 0 {
        return Err(k_field.line.error(k_field.column, "`k` must be positive"));
    }
    let m_field = field("m")?;
    let m = m_field.count()?;
    if m == 0 {
        return Err(m_field.line.error(m_field.column, "`m` must be positive"));
    }
    let n = field("n")?.count()?;
    let spectrum_field = field("spectrum")?;
    let spectrum = spectrum_field.floats()?;
    if spectrum.is_empty() {
        return Err(spectrum_field.line.error(spectrum_field.column, "empty spectrum"));
    }
    if let Some(i) = (1..spectrum.len()).find(|&i| spectrum[i] > spectrum[i - 1] || spectrum[i] < 0.0) {
        return Err(FormatError::Invalid(PceError::NotSorted { index: i }));
    }
    if spectrum[0] < 0.0 {
        return Err(FormatError::Invalid(PceError::NotSorted { index: 0 }));
    }
    if k > spectrum.len() || k > m {
        return Err(k_field.line.error(
            k_field.column,
            format!("k={k} exceeds the spectrum length {} or m={m}", spectrum.len()),
        ));
    }
    let mean = match fields.get("mean") {
        Some(f) => {
            let mean = f.floats()?;
            if mean.len() != m {
                return Err(f
                    .line
                    .error(f.column, format!("mean has {} values, expected m={m}", mean.len())));
            }
            Some(mean)
        }
        None => None,
    };

    let mut entries = Vec::with_capacity(m.saturating_mul(k).min(1 << 24));
    let mut rows = 0;
    for line in lines {
        if rows == m {
            return Err(line.error(1, format!("unexpected content after {m} theta rows")));
        }
        let before = entries.len();
        for (col, tok) in line.tokens() {
            if entries.len() - before == k {
                return Err(FormatError::Shape {
                    row: rows + 1,
                    line: line.number,
                    expected: k,
                    found: line.tokens().count(),
                });
            }
            entries.push(parse_f64(&line, col, tok)?);
        }
        if entries.len() - before != k {
            return Err(FormatError::Shape {
                row: rows + 1,
                line: line.number,
                expected: k,
                found: entries.len() - before,
            });
        }
        rows += 1;
    }
    if rows != m {
        return Err(FormatError::at(
            text.lines().count().max(1),
            1,
            format!("theta has {rows} rows, expected m={m}"),
        ));
    }

    Ok(ModelFile {
        model: PceModel {
            lambda,
            k,
            theta: DMatrix::from_row_slice(m, k, &entries),
            spectrum,
            train_cols: n,
            mean,
        },
        meta,
    })
}

pub fn save_model(file: &ModelFile, path: &Path) -> Result<(), FormatError> {
    write_atomic(path, &format_model(file)?)
}

pub fn load_model(path: &Path) -> Result<ModelFile, FormatError> {
    parse_model(&read_text(path)?)
}
