//! Output directory bookkeeping: every file written through a [`Stage`] is
//! digested and listed in the run manifest together with stage timings.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub name: String,
    pub seconds: f64,
    pub outputs: Vec<FileDigest>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: PipelineConfig,
    pub inputs: Vec<FileDigest>,
    pub stages: Vec<StageRecord>,
}

pub struct Run {
    out: PathBuf,
    manifest: RunManifest,
}

impl Run {
    pub fn new(command: impl Into<String>, config: &PipelineConfig) -> Result<Self> {
        std::fs::create_dir_all(&config.out).map_err(|e| CliError::io(&config.out, e))?;
        Ok(Self {
            out: config.out.clone(),
            manifest: RunManifest {
                tool: "trendscape",
                version: env!("CARGO_PKG_VERSION"),
                command: command.into(),
                config: config.clone(),
                inputs: Vec::new(),
                stages: Vec::new(),
            },
        })
    }

    pub fn out(&self) -> &Path {
        &self.out
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.manifest.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    /// Runs `f` as stage `name`, timing it and collecting what it writes.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Stage) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let mut stage = Stage {
            name: name.to_string(),
            out: self.out.clone(),
            outputs: Vec::new(),
        };
        let value = f(&mut stage);
        self.manifest.stages.push(StageRecord {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
            outputs: stage.outputs,
        });
        value
    }

    /// Writes the manifest as `file_name` in the output directory.
    pub fn finish(self, file_name: &str) -> Result<PathBuf> {
        let path = self.out.join(file_name);
        let mut json = serde_json::to_vec_pretty(&self.manifest).expect("manifest serialises");
        json.push(b'\n');
        std::fs::write(&path, json).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

pub struct Stage {
    name: String,
    out: PathBuf,
    outputs: Vec<FileDigest>,
}

impl Stage {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Maps a library error to a failure of this stage.
    pub fn fail(&self) -> impl FnOnce(trendscape::Error) -> CliError {
        CliError::stage(self.name.clone())
    }

    pub fn write(&mut self, file_name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out.join(file_name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(FileDigest {
            path: file_name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_csv(&mut self, file_name: &str, table: Table) -> Result<()> {
        self.write(file_name, &table.into_bytes())
    }
}

/// A CSV document under construction.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer
            .write_record(header.iter().map(AsRef::as_ref))
            .expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

/// Shortest round-trip decimal form; empty for missing values.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}
