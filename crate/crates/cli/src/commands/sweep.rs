//! `sweep`: histogram capacity ladder from a config file.

use std::path::{Path, PathBuf};
use std::time::Instant;

use dg_risklab_core::erm::config::parse_sweep_config;
use dg_risklab_core::erm::histogram::{capacity_sweep, SweepMode, SweepRow};
use dg_risklab_core::erm::sample_training_set;
use serde_json::json;

use crate::outfmt::{sig12, RowTable};
use crate::{manifest, CliError, RunContext};

pub struct SweepArgs {
    pub config_path: PathBuf,
}

fn rows_table(rows: &[SweepRow]) -> RowTable {
    let mut table = RowTable::new(&[
        "k",
        "pool_risk",
        "dg_risk",
        "gap",
        "empirical_pool_risk",
        "empirical_dg_risk",
    ]);
    for r in rows {
        table.push_row(vec![
            r.k.to_string(),
            sig12(r.pool_risk),
            sig12(r.dg_risk),
            sig12(r.gap),
            r.empirical_pool_risk.map(sig12).unwrap_or_default(),
            r.empirical_dg_risk.map(sig12).unwrap_or_default(),
        ]);
    }
    table
}

pub fn run(ctx: &RunContext, args: &SweepArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let text = crate::read_text(&args.config_path)?;
    let cfg = parse_sweep_config(&text).map_err(CliError::input)?;
    let base_dir = args
        .config_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let f = cfg.generator.instantiate(base_dir).map_err(CliError::input)?;
    let j = f.joint();

    // One training set serves every capacity, so the empirical columns
    // differ only through the family, not through fresh sampling noise.
    let ts = match cfg.sampling {
        Some(s) => Some(
            sample_training_set(&f, s.n_domains, s.size_rule, s.seed)
                .map_err(CliError::input)?,
        ),
        None => None,
    };
    let mode = match &ts {
        Some(ts) => SweepMode::Empirical(ts),
        None => SweepMode::Exact,
    };
    let rows = capacity_sweep(&j, cfg.range, &cfg.ks, mode).map_err(CliError::input)?;

    ctx.ensure_out_dir()?;
    let table = rows_table(&rows);
    crate::write_text(&ctx.out_path("sweep.csv"), &table.to_csv())?;
    print!("{}", table.render(ctx.format));

    let sampling = cfg.sampling.map(|s| {
        json!({
            "n_domains": s.n_domains,
            "size_rule": serde_json::to_value(s.size_rule).expect("size rule serializes"),
            "seed": s.seed,
        })
    });
    manifest::emit(
        ctx,
        "sweep",
        json!({
            "config_path": args.config_path.display().to_string(),
            "generator": serde_json::to_value(&cfg.generator)
                .map_err(|e| CliError::failure(format!("generator does not serialize: {e}")))?,
            "ks": cfg.ks,
            "range": [cfg.range.0, cfg.range.1],
            "sampling": sampling,
        }),
        cfg.sampling.map(|s| s.seed).unwrap_or(ctx.seed),
        &["sweep.csv"],
        started,
    )?;
    Ok(())
}
