//! CSV input: a header row, an optional leading time/label column and one
//! numeric column per coordinate.

use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tdacpd::TimeSeries;

use crate::error::{CliError, Result};

/// Header names recognised as a time/label column in [`LabelColumn::Auto`] mode.
const LABEL_NAMES: &[&str] = &["t", "time", "date", "year", "label", "index", "period"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelColumn {
    /// First column is a label when its header looks like a time column.
    #[default]
    Auto,
    First,
    None,
}

/// Parsed input with its labels and column names.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSeries {
    pub series: TimeSeries,
    /// One label per observation when the file has a label column.
    pub labels: Option<Vec<String>>,
    pub columns: Vec<String>,
}

impl LabeledSeries {
    /// Label of the 1-based observation `index`.
    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.as_ref()?.get(index.checked_sub(1)?).map(String::as_str)
    }
}

pub fn ingest_csv(path: &Path, mode: LabelColumn) -> Result<LabeledSeries> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    ingest_reader(file, path, mode)
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.to_ascii_lowercase().as_str(), "" | "na" | "nan" | "null" | "n/a" | "?")
}

pub fn ingest_reader(reader: impl Read, path: &Path, mode: LabelColumn) -> Result<LabeledSeries> {
    let path = PathBuf::from(path);
    let parse_err = |line: u64, column: &str, message: String| CliError::Parse {
        path: path.clone(),
        line,
        column: column.to_string(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_err(1, "-", e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(parse_err(1, "-", "missing header row".into()));
    }
    let has_label = match mode {
        LabelColumn::First => true,
        LabelColumn::None => false,
        LabelColumn::Auto => LABEL_NAMES.contains(&header[0].to_ascii_lowercase().as_str()),
    };
    let first_value = usize::from(has_label);
    let columns = header[first_value..].to_vec();
    if columns.is_empty() {
        return Err(parse_err(1, "-", "no value columns".into()));
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, "-", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                "-",
                format!("ragged row: expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        if has_label {
            labels.push(record[0].to_string());
        }
        for (j, cell) in record.iter().enumerate().skip(first_value) {
            let name = &header[j];
            if is_missing(cell) {
                return Err(parse_err(line, name, "missing value".into()));
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => return Err(parse_err(line, name, format!("non-numeric value {cell:?}"))),
            }
        }
    }
    if values.is_empty() {
        return Err(parse_err(1, "-", "no data rows".into()));
    }
    let series = TimeSeries::from_flat(values, columns.len())?;
    Ok(LabeledSeries { series, labels: has_label.then_some(labels), columns })
}
