//! Run manifests. Every command drops one next to its artifacts so a rerun
//! can be checked byte-for-byte; the wall-clock duration is the only field
//! allowed to differ between identical runs, and it sits last so diffs are
//! one line.

use std::time::Instant;

use serde::Serialize;

use crate::{CliError, RunContext};

#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub artifact_version: &'static str,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

pub const FILE_NAME: &str = "manifest.json";

/// Writes `manifest.json` into the output directory. `outputs` lists the
/// artifact files the command wrote, relative to that directory.
pub fn emit(
    ctx: &RunContext,
    subcommand: &'static str,
    config: serde_json::Value,
    master_seed: u64,
    outputs: &[&str],
    started: Instant,
) -> Result<(), CliError> {
    let manifest = RunManifest {
        subcommand,
        config,
        master_seed,
        artifact_version: env!("CARGO_PKG_VERSION"),
        outputs: outputs.iter().map(|o| o.to_string()).collect(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    crate::write_json(&ctx.out_path(FILE_NAME), &manifest)
}
