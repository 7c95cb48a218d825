//! Deterministic file emission: CSV and JSON writers with round-trip-safe
//! floating-point formatting (17 significant digits, '.' separator, LF).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::CliError;

/// 17 significant digits in scientific notation; parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A JSON object assembled field by field so numbers keep the 17-digit form.
pub struct JsonObject {
    body: String,
}

impl JsonObject {
    pub fn new() -> Self {
        JsonObject { body: String::new() }
    }

    fn push_key(&mut self, key: &str) {
        if !self.body.is_empty() {
            self.body.push(',');
        }
        let _ = write!(self.body, "\"{key}\":");
    }

    pub fn string(mut self, key: &str, value: &str) -> Self {
        self.push_key(key);
        let _ = write!(self.body, "\"{value}\"");
        self
    }

    pub fn number(mut self, key: &str, value: f64) -> Self {
        self.push_key(key);
        self.body.push_str(&fmt_f64(value));
        self
    }

    pub fn integer(mut self, key: &str, value: u64) -> Self {
        self.push_key(key);
        let _ = write!(self.body, "{value}");
        self
    }

    pub fn optional_integer(mut self, key: &str, value: Option<u64>) -> Self {
        self.push_key(key);
        match value {
            Some(v) => {
                let _ = write!(self.body, "{v}");
            }
            None => self.body.push_str("null"),
        }
        self
    }

    pub fn number_array(mut self, key: &str, values: &[f64]) -> Self {
        self.push_key(key);
        self.body.push('[');
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            self.body.push_str(&fmt_f64(*v));
        }
        self.body.push(']');
        self
    }

    pub fn finish(self) -> String {
        format!("{{{}}}\n", self.body)
    }
}

/// Rows of one CSV file; all floats go through [`fmt_f64`].
pub struct Csv {
    body: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            body: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[CsvField]) {
        debug_assert_eq!(fields.len(), self.columns);
        for (i, field) in fields.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            match field {
                CsvField::Float(x) => self.body.push_str(&fmt_f64(*x)),
                CsvField::Integer(v) => {
                    let _ = write!(self.body, "{v}");
                }
                CsvField::Text(s) => self.body.push_str(s),
                CsvField::Empty => {}
            }
        }
        self.body.push('\n');
    }

    pub fn into_string(self) -> String {
        self.body
    }
}

pub enum CsvField<'a> {
    Float(f64),
    Integer(u64),
    Text(&'a str),
    Empty,
}

/// Write one run artifact under the config's output directory, named by the
/// config hash, and return its path.
pub fn write_artifact(
    config: &RunConfig,
    suffix: &str,
    contents: &str,
) -> Result<PathBuf, CliError> {
    let dir = Path::new(config.out_dir());
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.{suffix}", config.file_stem()));
    fs::write(&path, contents)?;
    Ok(path)
}

/// Emit the canonical config next to the results.
pub fn write_config(config: &RunConfig) -> Result<PathBuf, CliError> {
    write_artifact(config, "config.json", &format!("{}\n", config.canonical_json()))
}
