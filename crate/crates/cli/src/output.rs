use std::fs;
use std::path::{Path, PathBuf};

use critmet_core::output::Table;
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Writes tables under one output directory, each headed by the resolved configuration.
pub struct Writer {
    dir: PathBuf,
    format: Format,
    header: String,
    command: &'static str,
}

impl Writer {
    pub fn new(dir: &Path, command: &'static str, config: &RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::from(e).context(&dir.display().to_string()))?;
        Ok(Self { dir: dir.to_owned(), format: config.format, header: config.to_json(), command })
    }

    /// Writes `<stem>.<ext>` and returns its path.
    pub fn write(&self, stem: &str, table: &Table, notes: &[String]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(format!("{stem}.{}", self.format.extension()));
        let text = match self.format {
            Format::Csv => {
                let mut comments = vec![format!("critmet {}", self.command), format!("config: {}", self.header)];
                comments.extend(notes.iter().cloned());
                table.to_csv(&comments)
            }
            Format::Json => {
                let config: serde_json::Value = serde_json::from_str(&self.header).expect("header is valid JSON");
                let doc = json!({
                    "command": self.command,
                    "config": config,
                    "notes": notes,
                    "columns": table.columns(),
                    "rows": table.to_json(),
                });
                serde_json::to_string_pretty(&doc).expect("document is serializable") + "\n"
            }
        };
        fs::write(&path, text).map_err(|e| CliError::from(e).context(&path.display().to_string()))?;
        Ok(path)
    }
}
