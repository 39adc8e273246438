//! Atomic file output with provenance headers.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_vec_pretty(value).expect("artifact serializes");
    text.push(b'\n');
    write_atomic(path, &text)
}

/// CSV table whose first line is `# config = <json>`.
pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
    config_line: String,
}

impl CsvTable {
    pub fn new(config_json: &str, header: &[String]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer, config_line: format!("# config = {config_json}\n") }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        let body = self.writer.into_inner().expect("in-memory flush");
        let mut out = self.config_line.into_bytes();
        out.extend(body);
        out
    }

    pub fn write(self, path: &Path) -> Result<()> {
        write_atomic(path, &self.into_bytes())
    }
}

/// Shortest round-trip formatting; empty for NaN.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}
