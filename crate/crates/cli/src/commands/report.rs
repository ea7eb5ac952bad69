//! `report`: exact risk report for one distribution spec file.

use std::path::PathBuf;
use std::time::Instant;

use dg_risklab_core::{bayes, specfile};
use serde::Serialize;
use serde_json::json;

use crate::outfmt::Summary;
use crate::{manifest, CliError, RunContext};

pub struct ReportArgs {
    pub spec_path: PathBuf,
}

#[derive(Serialize)]
struct Certificates {
    /// Membership at the instance's own margin floor and disagreement
    /// level; true unless the floor itself is degenerate.
    margin_class: bayes::PdClassCertificate,
    covariate_shift: bool,
}

pub fn run(ctx: &RunContext, args: &ReportArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let f = specfile::load_spec(&args.spec_path).map_err(CliError::input)?;
    let j = f.joint();
    let b = bayes::solve_bayes(&j);
    let report = bayes::risks(&j, &b).map_err(CliError::failure)?;
    let margin_class = bayes::pd_class_certificate(&j, &b, report.gamma_min, report.epsilon_hat)
        .map_err(CliError::failure)?;
    let covariate_shift =
        bayes::covariate_shift_certificate(&j, &b, 1e-12).map_err(CliError::failure)?;
    let certificates = Certificates {
        margin_class,
        covariate_shift,
    };

    ctx.ensure_out_dir()?;
    crate::write_json(&ctx.out_path("report.json"), &report)?;
    crate::write_json(&ctx.out_path("certificates.json"), &certificates)?;

    let mut block = Summary::new(&format!("risk report: {}", args.spec_path.display()));
    block.push_f64("r_pool", report.r_pool);
    block.push_f64("r_dg", report.r_dg);
    block.push_f64("r_full", report.r_full);
    block.push_f64("gap_pool_dg", report.gap_pool_dg);
    block.push_f64("gap_dg_full", report.gap_dg_full);
    block.push_f64("thm1_lower", report.thm1_lower);
    block.push_f64("thm1_upper", report.thm1_upper);
    block.push_f64("thm3_lower", report.thm3_lower);
    block.push_f64("thm3_upper", report.thm3_upper);
    block.push_f64("disagreement_prob_pool_dg", report.disagreement_prob_pool_dg);
    block.push_f64("disagreement_prob_full_dg", report.disagreement_prob_full_dg);
    block.push_f64("epsilon_hat", report.epsilon_hat);
    block.push_f64("gamma_min", report.gamma_min);
    block.push(
        "margin_class_member",
        if certificates.margin_class.member { "true" } else { "false" },
    );
    block.push_f64("guaranteed_gap", certificates.margin_class.guaranteed_gap);
    block.push(
        "undefined_xm_cells",
        certificates.margin_class.undefined_xm_cells.to_string(),
    );
    block.push(
        "covariate_shift",
        if certificates.covariate_shift { "true" } else { "false" },
    );
    crate::write_text(
        &ctx.out_path("report.txt"),
        &block.render(crate::outfmt::OutputFormat::Table),
    )?;

    print!("{}", block.render(ctx.format));

    manifest::emit(
        ctx,
        "report",
        json!({ "spec_path": args.spec_path.display().to_string() }),
        ctx.seed,
        &["report.json", "report.txt", "certificates.json"],
        started,
    )?;
    Ok(())
}
