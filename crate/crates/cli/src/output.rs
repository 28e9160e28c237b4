//! CSV and JSON writers. Every file opens with the tool version and the
//! resolved configuration, and nothing time-dependent is written.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Resolved;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const UNITS: &str = "frequencies, energies and rates in Grad/s (1e9 rad/s); time in ns; lengths in m";

pub struct Writer<'a> {
    dir: PathBuf,
    command: &'a str,
    config: String,
}

impl<'a> Writer<'a> {
    pub fn new(dir: &Path, command: &'a str, resolved: &Resolved) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        let config = serde_json::to_string(resolved).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            command,
            config,
        })
    }

    fn header(&self) -> String {
        format!(
            "# shuttle {VERSION} {} config={}\n# units: {UNITS}\n",
            self.command, self.config
        )
    }

    /// Write `name` with `columns` and rows of values; `notes` become extra
    /// comment lines after the header.
    pub fn csv(
        &self,
        name: &str,
        columns: &[&str],
        rows: &[Row],
        notes: &[String],
    ) -> Result<PathBuf, CliError> {
        let mut text = self.header();
        for note in notes {
            let _ = writeln!(text, "# {}", note.replace('\n', " "));
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            match row {
                Row::Values(values) => {
                    let cells: Vec<String> = values.iter().map(|v| format_value(*v)).collect();
                    text.push_str(&cells.join(","));
                    text.push('\n');
                }
                Row::Error(msg) => {
                    let _ = writeln!(text, "# error: {}", msg.replace('\n', " "));
                }
            }
        }
        self.write(name, &text)
    }

    /// Write `payload` wrapped with version and configuration.
    pub fn json(&self, name: &str, payload: impl Serialize) -> Result<PathBuf, CliError> {
        let config: Value = serde_json::from_str(&self.config).map_err(|e| CliError::Io(e.to_string()))?;
        let doc = json!({
            "tool": "shuttle",
            "version": VERSION,
            "command": self.command,
            "units": UNITS,
            "config": config,
            "result": payload,
        });
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

pub enum Row {
    Values(Vec<f64>),
    Error(String),
}

/// Shortest representation that round-trips.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:?}")
    }
}
