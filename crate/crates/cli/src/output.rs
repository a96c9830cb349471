use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Output directory that records every file written for the manifest.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<OutputFile>,
    started: Instant,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a RunConfig,
    elapsed_seconds: f64,
    outputs: &'a [OutputFile],
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.files.push(OutputFile {
            name: name.to_string(),
            bytes: contents.len(),
            sha256: hex(&Sha256::digest(contents)),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn finish(self, command: &str, config: &RunConfig) -> Result<(), CliError> {
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            elapsed_seconds: self.started.elapsed().as_secs_f64(),
            outputs: &self.files,
        };
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

/// CSV text from a header and rows of numbers.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
