use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::manifest::RunManifest;
use crate::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] rotovac_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 0 ok, 1 verification failure, 2 domain error, 64 usage.
    pub fn exit_code(&self) -> u8 {
        use rotovac_core::Error as E;
        match self {
            CliError::Verification(_) => 1,
            CliError::Domain(E::Config(_) | E::InvalidInput(_)) => 64,
            CliError::Domain(_) => 2,
            CliError::Usage(_) | CliError::Io { .. } => 64,
        }
    }
}

pub fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Where the main output goes.
pub struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(path: Option<PathBuf>) -> Self {
        Self { path }
    }

    pub fn name(&self) -> String {
        self.path.as_ref().map_or_else(|| "stdout".to_string(), |p| p.display().to_string())
    }

    pub fn write(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.path {
            Some(p) => std::fs::write(p, bytes).map_err(io_err(p)),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes).and_then(|_| out.flush()).map_err(io_err(Path::new("stdout")))
            }
        }
    }
}

pub fn csv_bytes<R: Serialize>(manifest: &RunManifest, rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut buf = manifest.comment_lines().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
        }
        w.flush().map_err(io_err(Path::new("csv buffer")))?;
    }
    Ok(buf)
}

#[derive(Serialize)]
struct Document<'a, D: Serialize> {
    manifest: &'a RunManifest,
    data: D,
}

pub fn json_bytes<D: Serialize>(manifest: &RunManifest, data: D) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(&Document { manifest, data }).map_err(|e| CliError::Usage(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// Rows as CSV with a manifest header, or as a JSON document.
pub fn emit_rows<R: Serialize>(sink: &Sink, manifest: &RunManifest, format: Format, rows: &[R]) -> Result<(), CliError> {
    let bytes = match format {
        Format::Csv => csv_bytes(manifest, rows)?,
        Format::Json => json_bytes(manifest, rows)?,
    };
    sink.write(&bytes)
}
