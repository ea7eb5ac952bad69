//! `figure1`: posterior-curve export for the two-curve illustration, plus
//! the exact risk report of the discretized instance.

use std::time::Instant;

use dg_risklab_core::bayes;
use dg_risklab_core::generators::{make_figure1, Figure1Config, Figure1Scenario};
use serde_json::json;

use crate::outfmt::{sig12, RowTable, Summary};
use crate::{manifest, CliError, RunContext};

pub struct Figure1Args {
    pub scenario: Figure1Scenario,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

pub fn run(ctx: &RunContext, args: &Figure1Args) -> Result<(), CliError> {
    let started = Instant::now();
    let config = Figure1Config::for_scenario(args.scenario).with_grid(
        args.x_min,
        args.x_max,
        args.n_points,
    );
    let output = make_figure1(&config).map_err(CliError::input)?;
    let j = output.distribution.joint();
    let b = bayes::solve_bayes(&j);
    let report = bayes::risks(&j, &b).map_err(CliError::failure)?;

    ctx.ensure_out_dir()?;
    let mut table = RowTable::new(&["x", "eta1", "eta2", "eta_pooled"]);
    for row in &output.curves {
        table.push_row(vec![
            sig12(row.x),
            sig12(row.eta1),
            sig12(row.eta2),
            sig12(row.eta_pooled),
        ]);
    }
    crate::write_text(&ctx.out_path("curves.csv"), &table.to_csv())?;
    crate::write_json(&ctx.out_path("report.json"), &report)?;

    let mut block = Summary::new(&format!("posterior curves: {}", args.scenario.name()));
    block.push("points", output.curves.len().to_string());
    block.push_f64("r_pool", report.r_pool);
    block.push_f64("r_dg", report.r_dg);
    block.push_f64("gap_pool_dg", report.gap_pool_dg);
    block.push_f64("thm1_lower", report.thm1_lower);
    block.push_f64("thm1_upper", report.thm1_upper);
    print!("{}", block.render(ctx.format));

    manifest::emit(
        ctx,
        "figure1",
        json!({
            "config": serde_json::to_value(config)
                .map_err(|e| CliError::failure(format!("config does not serialize: {e}")))?,
        }),
        ctx.seed,
        &["curves.csv", "report.json"],
        started,
    )?;
    Ok(())
}
