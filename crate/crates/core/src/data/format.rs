//! Plain-text matrix and data set files.
//!
//! ```text
//! pce-dataset v1 m=<m> n=<n> classes=<s>
//! <n labels>
//! <m rows of n floats>
//! ```
//!
//! Unlabeled matrices use the header `pce-matrix v1 m=<m> n=<n>` and omit the
//! label line. Lines whose first non-blank character is `#` and blank lines
//! are ignored. Floats are written in shortest round-trip form, so a reload
//! reproduces every bit.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use super::LabeledDataset;
use crate::error::PceError;
use crate::matrix::DataMatrix;

pub const DATASET_MAGIC: &str = "pce-dataset";
pub const MATRIX_MAGIC: &str = "pce-matrix";
pub const FORMAT_VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: data row {row} has {found} values, expected {expected}")]
    Shape {
        row: usize,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error(transparent)]
    Invalid(#[from] PceError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl FormatError {
    pub(crate) fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        FormatError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// A content line with its 1-based line number.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Line<'a> {
    pub number: usize,
    pub text: &'a str,
}

impl<'a> Line<'a> {
    /// Whitespace-separated tokens with their 1-based byte columns.
    pub fn tokens(&self) -> impl Iterator<Item = (usize, &'a str)> + 'a {
        let text = self.text;
        text.split_ascii_whitespace().map(move |tok| {
            let offset = tok.as_ptr() as usize - text.as_ptr() as usize;
            (offset + 1, tok)
        })
    }

    pub fn error(&self, column: usize, message: impl Into<String>) -> FormatError {
        FormatError::at(self.number, column, message)
    }
}

/// Non-blank, non-comment lines.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some(Line {
                number: i + 1,
                text: raw,
            })
        }
    })
}

pub(crate) fn parse_f64(line: &Line<'_>, column: usize, token: &str) -> Result<f64, FormatError> {
    let value: f64 = token
        .parse()
        .map_err(|_| line.error(column, format!("invalid number `{token}`")))?;
    if !value.is_finite() {
        return Err(line.error(column, format!("non-finite value `{token}`")));
    }
    Ok(value)
}

pub(crate) fn parse_usize(line: &Line<'_>, column: usize, token: &str) -> Result<usize, FormatError> {
    token
        .parse()
        .map_err(|_| line.error(column, format!("invalid count `{token}`")))
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn format_f64(value: f64) -> String {
    format!("{value:?}")
}

/// Parsed `magic version key=value...` header.
struct Header {
    magic: String,
    fields: Vec<(String, usize, usize)>,
    line: usize,
}

impl Header {
    fn parse(line: Line<'_>, allowed: &[&str], expect_magic: &[&str]) -> Result<Self, FormatError> {
        let mut tokens = line.tokens();
        let (col, magic) = tokens.next().ok_or_else(|| line.error(1, "missing header"))?;
        if !expect_magic.contains(&magic) {
            return Err(line.error(
                col,
                format!("expected header `{}`, found `{magic}`", expect_magic.join("` or `")),
            ));
        }
        let (col, version) = tokens
            .next()
            .ok_or_else(|| line.error(col + magic.len(), "missing format version"))?;
        if version != FORMAT_VERSION {
            return Err(line.error(col, format!("unsupported format version `{version}`")));
        }
        let mut fields: Vec<(String, usize, usize)> = Vec::new();
        for (col, tok) in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| line.error(col, format!("expected key=value, found `{tok}`")))?;
            if !allowed.contains(&key) {
                return Err(line.error(col, format!("unknown header field `{key}`")));
            }
            if fields.iter().any(|(k, _, _)| k == key) {
                return Err(line.error(col, format!("duplicate header field `{key}`")));
            }
            let value = parse_usize(&line, col + key.len() + 1, value)?;
            fields.push((key.to_string(), value, col));
        }
        Ok(Self {
            magic: magic.to_string(),
            fields,
            line: line.number,
        })
    }

    fn get(&self, key: &str) -> Result<(usize, usize), FormatError> {
        self.fields
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|&(_, v, c)| (v, c))
            .ok_or_else(|| FormatError::at(self.line, 1, format!("header is missing `{key}=`")))
    }

    fn positive(&self, key: &str) -> Result<usize, FormatError> {
        let (value, col) = self.get(key)?;
        if value == 0 {
            return Err(FormatError::at(self.line, col, format!("`{key}` must be positive")));
        }
        Ok(value)
    }
}

/// Either kind of data file.
#[derive(Debug, Clone, PartialEq)]
pub enum DataFile {
    Labeled(LabeledDataset),
    Matrix(DataMatrix),
}

impl DataFile {
    pub fn matrix(&self) -> &DataMatrix {
        match self {
            DataFile::Labeled(ds) => &ds.matrix,
            DataFile::Matrix(m) => m,
        }
    }

    pub fn labels(&self) -> Option<&[usize]> {
        match self {
            DataFile::Labeled(ds) => Some(&ds.labels),
            DataFile::Matrix(_) => None,
        }
    }
}

/// Parses a labeled or unlabeled file, dispatching on the header.
pub fn parse_data_file(text: &str) -> Result<DataFile, FormatError> {
    let mut lines = content_lines(text);
    let first = lines.next().ok_or_else(|| FormatError::at(1, 1, "empty file"))?;
    let header = Header::parse(first, &["m", "n", "classes"], &[DATASET_MAGIC, MATRIX_MAGIC])?;
    let m = header.positive("m")?;
    let n = header.positive("n")?;
    if header.magic == MATRIX_MAGIC {
        if let Some((_, _, col)) = header.fields.iter().find(|(k, _, _)| k == "classes") {
            return Err(FormatError::at(
                header.line,
                *col,
                "`classes` is not valid for a matrix file",
            ));
        }
        let values = parse_rows(&mut lines, m, n, header.line)?;
        return Ok(DataFile::Matrix(DataMatrix::from_row_major(m, n, &values)?));
    }
    let classes = header.positive("classes")?;
    let label_line = lines
        .next()
        .ok_or_else(|| FormatError::at(header.line + 1, 1, "missing label line"))?;
    let mut labels = Vec::new();
    let mut seen = vec![false; classes.min(n)];
    for (col, tok) in label_line.tokens() {
        let label = parse_usize(&label_line, col, tok)?;
        if label >= classes {
            return Err(label_line.error(col, format!("label {label} outside 0..{classes}")));
        }
        if label >= seen.len() {
            // more classes than samples: some class must be empty
            return Err(label_line.error(col, format!("{classes} classes cannot fit in {n} samples")));
        }
        seen[label] = true;
        labels.push(label);
    }
    if labels.len() != n {
        return Err(label_line.error(1, format!("expected {n} labels, found {}", labels.len())));
    }
    if let Some(missing) = (0..classes).find(|&c| c >= seen.len() || !seen[c]) {
        return Err(label_line.error(1, format!("class {missing} has no samples")));
    }
    let values = parse_rows(&mut lines, m, n, label_line.number)?;
    let matrix = DataMatrix::from_row_major(m, n, &values)?;
    Ok(DataFile::Labeled(LabeledDataset::new(matrix, labels)?))
}

/// Reads exactly `m` rows of `n` floats and rejects trailing content.
fn parse_rows<'a>(
    lines: &mut impl Iterator<Item = Line<'a>>,
    m: usize,
    n: usize,
    previous_line: usize,
) -> Result<Vec<f64>, FormatError> {
    let mut values = Vec::new();
    let mut lengths: Vec<(usize, usize)> = Vec::new();
    let mut last_line = previous_line;
    for line in lines {
        if lengths.len() == m {
            return Err(line.error(1, format!("unexpected content after {m} data rows")));
        }
        let before = values.len();
        for (col, tok) in line.tokens() {
            values.push(parse_f64(&line, col, tok)?);
        }
        lengths.push((values.len() - before, line.number));
        last_line = line.number;
    }
    if lengths.len() != m {
        return Err(FormatError::at(
            last_line,
            1,
            format!("header declares m={m}, found {} data rows", lengths.len()),
        ));
    }
    let first = lengths[0].0;
    if first != n && lengths.iter().all(|&(len, _)| len == first) {
        return Err(FormatError::at(
            lengths[0].1,
            1,
            format!("header declares n={n}, rows have {first} values"),
        ));
    }
    if let Some((row, &(found, line))) = lengths.iter().enumerate().find(|(_, (len, _))| *len != n) {
        return Err(FormatError::Shape {
            row: row + 1,
            line,
            expected: n,
            found,
        });
    }
    Ok(values)
}

pub fn parse_dataset(text: &str) -> Result<LabeledDataset, FormatError> {
    match parse_data_file(text)? {
        DataFile::Labeled(ds) => Ok(ds),
        DataFile::Matrix(_) => Err(FormatError::at(1, 1, "expected a labeled `pce-dataset` file")),
    }
}

pub fn parse_matrix(text: &str) -> Result<DataMatrix, FormatError> {
    match parse_data_file(text)? {
        DataFile::Matrix(m) => Ok(m),
        DataFile::Labeled(_) => Err(FormatError::at(1, 1, "expected an unlabeled `pce-matrix` file")),
    }
}

fn write_rows(out: &mut String, m: &DataMatrix) {
    let mat = m.as_matrix();
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| format_f64(mat[(r, c)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

pub fn format_dataset(ds: &LabeledDataset) -> String {
    let mut out = String::new();
    let (m, n) = ds.matrix.shape();
    let _ = writeln!(
        out,
        "{DATASET_MAGIC} {FORMAT_VERSION} m={m} n={n} classes={}",
        ds.classes()
    );
    for (k, v) in &ds.meta {
        let _ = writeln!(out, "# {k}={}", v.replace('\n', " "));
    }
    let labels: Vec<String> = ds.labels.iter().map(usize::to_string).collect();
    out.push_str(&labels.join(" "));
    out.push('\n');
    write_rows(&mut out, &ds.matrix);
    out
}

pub fn format_matrix(m: &DataMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MATRIX_MAGIC} {FORMAT_VERSION} m={} n={}", m.rows(), m.cols());
    write_rows(&mut out, m);
    out
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), FormatError> {
    let file_name = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = path.with_file_name(format!(".{file_name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| FormatError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        FormatError::io(path, e)
    })
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|e| FormatError::io(path, e))
}

pub fn load_data_file(path: &Path) -> Result<DataFile, FormatError> {
    let file = parse_data_file(&read_text(path)?)?;
    Ok(match file {
        DataFile::Labeled(ds) => DataFile::Labeled(ds.with_meta("source", path.display().to_string())),
        other => other,
    })
}

pub fn load_dataset(path: &Path) -> Result<LabeledDataset, FormatError> {
    Ok(parse_dataset(&read_text(path)?)?.with_meta("source", path.display().to_string()))
}

pub fn save_dataset(ds: &LabeledDataset, path: &Path) -> Result<(), FormatError> {
    write_atomic(path, &format_dataset(ds))
}

pub fn load_matrix(path: &Path) -> Result<DataMatrix, FormatError> {
    parse_matrix(&read_text(path)?)
}

pub fn save_matrix(m: &DataMatrix, path: &Path) -> Result<(), FormatError> {
    write_atomic(path, &format_matrix(m))
}
