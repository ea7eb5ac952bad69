//! Command layer for the `dg-risklab` binary: flag plumbing, artifact
//! files, and the randomized audit suite. All numeric work lives in the
//! core crate; this one only arranges inputs and writes outputs.

pub mod audit;
pub mod commands;
pub mod manifest;
pub mod outfmt;

use std::path::{Path, PathBuf};

use thiserror::Error;

use outfmt::OutputFormat;

/// Command failure split by exit status: rejected input is 2, a failed
/// check or internal assertion is 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    pub fn input(message: impl std::fmt::Display) -> Self {
        CliError::Input(message.to_string())
    }

    pub fn failure(message: impl std::fmt::Display) -> Self {
        CliError::Failure(message.to_string())
    }
}

/// Global flags shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    /// Worker threads for parallel sections; 0 means "let rayon pick".
    pub jobs: usize,
}

impl RunContext {
    pub fn ensure_out_dir(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out_dir).map_err(|e| {
            CliError::failure(format!("cannot create {}: {e}", self.out_dir.display()))
        })
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

pub(crate) fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::failure(format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::failure(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}
