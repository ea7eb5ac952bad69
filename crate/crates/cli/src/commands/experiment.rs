//! `experiment`: Monte Carlo ERM trials from a config file.

use std::path::{Path, PathBuf};
use std::time::Instant;

use dg_risklab_core::erm::config::parse_experiment_config;
use dg_risklab_core::erm::experiment::{run_experiment, ExperimentError, ExperimentResult};
use serde::Serialize;
use serde_json::json;

use crate::outfmt::{sig12, RowTable, Summary};
use crate::{manifest, CliError, RunContext};

pub struct ExperimentArgs {
    pub config_path: PathBuf,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    config: &'a dg_risklab_core::erm::experiment::ExperimentConfig,
    bayes_pool_risk: f64,
    bayes_dg_risk: f64,
    trials: usize,
    summary: &'a dg_risklab_core::erm::experiment::ExperimentSummary,
}

fn classify_error(e: ExperimentError) -> CliError {
    match e {
        // A valid config can only reach this through an internal identity
        // breaking, which is an assertion failure, not an input problem.
        ExperimentError::Bayes(inner) => CliError::failure(inner),
        other => CliError::input(other),
    }
}

pub fn run(ctx: &RunContext, args: &ExperimentArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let text = crate::read_text(&args.config_path)?;
    let cfg = parse_experiment_config(&text).map_err(CliError::input)?;
    let base_dir = args
        .config_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let result = run_experiment(&cfg, base_dir).map_err(classify_error)?;

    ctx.ensure_out_dir()?;
    crate::write_text(&ctx.out_path("trials.csv"), &trials_csv(&result))?;
    let summary = SummaryFile {
        config: &result.config,
        bayes_pool_risk: result.bayes_pool_risk,
        bayes_dg_risk: result.bayes_dg_risk,
        trials: result.trials.len(),
        summary: &result.summary,
    };
    crate::write_json(&ctx.out_path("summary.json"), &summary)?;

    let mut block = Summary::new(&format!("experiment: {}", args.config_path.display()));
    block.push("family", result.config.family.name());
    block.push("trials", result.trials.len().to_string());
    block.push_f64("bayes_pool_risk", result.bayes_pool_risk);
    block.push_f64("bayes_dg_risk", result.bayes_dg_risk);
    block.push_f64("train_pool_mean", result.summary.train_pool.mean);
    block.push_f64("train_pool_se", result.summary.train_pool.se);
    block.push_f64("train_dg_mean", result.summary.train_dg.mean);
    block.push_f64("train_dg_se", result.summary.train_dg.se);
    block.push_f64("pop_pool_mean", result.summary.pop_pool.mean);
    block.push_f64("pop_pool_se", result.summary.pop_pool.se);
    block.push_f64("pop_dg_mean", result.summary.pop_dg.mean);
    block.push_f64("pop_dg_se", result.summary.pop_dg.se);
    print!("{}", block.render(ctx.format));

    manifest::emit(
        ctx,
        "experiment",
        json!({
            "config_path": args.config_path.display().to_string(),
            "config": serde_json::to_value(&cfg)
                .map_err(|e| CliError::failure(format!("config does not serialize: {e}")))?,
        }),
        cfg.seed,
        &["trials.csv", "summary.json"],
        started,
    )?;
    Ok(())
}

/// One row per trial plus `mean` and `se` aggregate rows; the aggregate
/// rows leave the seed column empty.
fn trials_csv(result: &ExperimentResult) -> String {
    let mut table = RowTable::new(&[
        "trial",
        "seed",
        "train_risk_pool",
        "train_risk_dg",
        "pop_risk_pool",
        "pop_risk_dg",
    ]);
    for t in &result.trials {
        table.push_row(vec![
            t.trial.to_string(),
            t.seed.to_string(),
            sig12(t.train_risk_pool),
            sig12(t.train_risk_dg),
            sig12(t.pop_risk_pool),
            sig12(t.pop_risk_dg),
        ]);
    }
    let s = &result.summary;
    table.push_row(vec![
        "mean".to_string(),
        String::new(),
        sig12(s.train_pool.mean),
        sig12(s.train_dg.mean),
        sig12(s.pop_pool.mean),
        sig12(s.pop_dg.mean),
    ]);
    table.push_row(vec![
        "se".to_string(),
        String::new(),
        sig12(s.train_pool.se),
        sig12(s.train_dg.se),
        sig12(s.pop_pool.se),
        sig12(s.pop_dg.se),
    ]);
    table.to_csv()
}
