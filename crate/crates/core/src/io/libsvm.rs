//! LIBSVM text format: `<label> <index>:<value> ...`, 1-based strictly
//! increasing indices, one example per line. Blank lines and `#` comments are
//! ignored.

use super::IoError;
use crate::objectives::{Dataset, Features, LabeledExample};
use std::io::BufRead;
use std::path::Path;

/// How raw labels become training labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMap {
    /// `±1` kept; otherwise `{1, 2}` as in [`LabelMap::OneTwo`]; otherwise `{0, 1} → {−1, +1}`.
    #[default]
    Auto,
    /// Labels must already be `±1`.
    Signed,
    /// `1 → +1`, `2 → −1` (the mushrooms coding).
    OneTwo,
    /// Keep the numeric value (regression targets).
    Raw,
}

fn map_labels(raw: &[f64], map: LabelMap) -> Result<Vec<f64>, String> {
    let all_in = |set: &[f64]| raw.iter().all(|y| set.contains(y));
    let effective = match map {
        LabelMap::Auto if all_in(&[-1.0, 1.0]) => LabelMap::Signed,
        LabelMap::Auto if all_in(&[1.0, 2.0]) => LabelMap::OneTwo,
        LabelMap::Auto if all_in(&[0.0, 1.0]) => {
            return Ok(raw.iter().map(|&y| if y == 0.0 { -1.0 } else { 1.0 }).collect());
        }
        LabelMap::Auto => return Err("labels are not binary ({-1,1}, {1,2} or {0,1})".into()),
        other => other,
    };
    raw.iter()
        .map(|&y| match effective {
            LabelMap::Signed if y == 1.0 || y == -1.0 => Ok(y),
            LabelMap::OneTwo if y == 1.0 => Ok(1.0),
            LabelMap::OneTwo if y == 2.0 => Ok(-1.0),
            LabelMap::Raw => Ok(y),
            _ => Err(format!("label {y} cannot be mapped with {effective:?}")),
        })
        .collect()
}

/// Label, indices and values of one parsed line.
type SparseRow = (f64, Vec<usize>, Vec<f64>);

fn parse_line(line: &str, line_no: usize) -> Result<Option<SparseRow>, IoError> {
    let content = line.split('#').next().unwrap_or("").trim();
    if content.is_empty() {
        return Ok(None);
    }
    let err = |message: String| IoError::Parse { line: line_no, message };
    let mut tokens = content.split_whitespace();
    let label_tok = tokens.next().unwrap_or_default();
    let label: f64 = label_tok.parse().map_err(|_| err(format!("invalid label '{label_tok}'")))?;
    if !label.is_finite() {
        return Err(err(format!("non-finite label '{label_tok}'")));
    }
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for tok in tokens {
        let (i, v) = tok.split_once(':').ok_or_else(|| err(format!("expected index:value, found '{tok}'")))?;
        let index: usize = i.parse().map_err(|_| err(format!("invalid index '{i}'")))?;
        if index == 0 {
            return Err(err("indices are 1-based; found 0".into()));
        }
        if indices.last().is_some_and(|&prev| index - 1 <= prev) {
            return Err(err(format!("index {index} is not strictly increasing")));
        }
        let value: f64 = v.parse().map_err(|_| err(format!("invalid value '{v}'")))?;
        if !value.is_finite() {
            return Err(err(format!("non-finite value '{v}'")));
        }
        indices.push(index - 1);
        values.push(value);
    }
    Ok(Some((label, indices, values)))
}

/// Parses LIBSVM text. The dimension is the largest index seen.
pub fn parse_libsvm(reader: impl BufRead, labels: LabelMap) -> Result<Dataset, IoError> {
    let mut rows = Vec::new();
    let mut line_numbers = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| IoError::Io { path: "<input>".into(), message: e.to_string() })?;
        if let Some(row) = parse_line(&line, i + 1)? {
            rows.push(row);
            line_numbers.push(i + 1);
        }
    }
    if rows.is_empty() {
        return Err(IoError::Data(crate::objectives::ObjectiveError::EmptyDataset));
    }
    let raw: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mapped = map_labels(&raw, labels).map_err(|message| {
        let bad = raw.iter().zip(&line_numbers).find(|(&y, _)| map_labels(&[y], labels).is_err());
        IoError::Parse { line: bad.map_or(line_numbers[0], |(_, &l)| l), message }
    })?;
    let dim = rows.iter().filter_map(|r| r.1.last().map(|&i| i + 1)).max().unwrap_or(1);
    let examples = rows
        .into_iter()
        .zip(mapped)
        .map(|((_, idx, val), y)| LabeledExample { features: Features::sparse(idx, val), label: y })
        .collect();
    Ok(Dataset::new(examples, dim)?)
}

pub fn parse_libsvm_str(text: &str, labels: LabelMap) -> Result<Dataset, IoError> {
    parse_libsvm(text.as_bytes(), labels)
}

pub fn load_libsvm(path: &Path, labels: LabelMap) -> Result<Dataset, IoError> {
    let file = std::fs::File::open(path)
        .map_err(|e| IoError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_libsvm(std::io::BufReader::new(file), labels)
}
