use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    schema_version: u32,
    config: &'a RunConfig,
    /// Names of CSV and SVG side files written next to the report.
    side_files: &'a [String],
    results: &'a R,
}

/// Collects side files for one run and writes the JSON report last.
pub struct ReportWriter {
    dir: PathBuf,
    side_files: Vec<String>,
}

impl ReportWriter {
    pub fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            side_files: Vec::new(),
        })
    }

    pub fn side_file(&mut self, name: &str, content: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, content).map_err(|e| io(&path, e))?;
        self.side_files.push(name.to_string());
        Ok(path)
    }

    pub fn finish<R: Serialize>(self, name: &str, config: &RunConfig, results: &R) -> CliResult<PathBuf> {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            config,
            side_files: &self.side_files,
            results,
        };
        let text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Internal(e.to_string()))?;
        let path = self.dir.join(name);
        fs::write(&path, text + "\n").map_err(|e| io(&path, e))?;
        Ok(path)
    }
}

fn io(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// CSV text from a header and rows of already formatted cells.
pub fn csv(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// Shortest round-trip representation, so CSV values re-parse bit-exactly.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}
