//! `verify`: run the randomized invariant audit and fail loudly on any
//! violation.

use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::audit::{self, Fault, SuiteOutcome, WorstSlacks};
use crate::outfmt::{sig12, Summary};
use crate::{manifest, CliError, RunContext};

pub struct VerifyArgs {
    pub instances: usize,
    pub fault: Option<Fault>,
}

/// At most this many offending instances are dumped as spec files; the
/// summary still lists every violation.
const MAX_DUMPS: usize = 8;

#[derive(Serialize)]
struct ViolationRow<'a> {
    instance: &'a str,
    what: &'a str,
    dump: Option<String>,
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    instances: usize,
    checks: usize,
    violations: usize,
    worst_slacks: &'a WorstSlacks,
    failures: Vec<ViolationRow<'a>>,
}

pub fn run(ctx: &RunContext, args: &VerifyArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if args.instances == 0 {
        return Err(CliError::input("need at least one instance to verify"));
    }
    let outcome = run_suite(ctx, args)?;

    ctx.ensure_out_dir()?;
    let mut failures = Vec::with_capacity(outcome.violations.len());
    for (i, v) in outcome.violations.iter().enumerate() {
        let dump = if i < MAX_DUMPS && !v.spec_text.is_empty() {
            let name = format!("violation_{i}.spec");
            crate::write_text(&ctx.out_path(&name), &v.spec_text)?;
            Some(name)
        } else {
            None
        };
        failures.push(ViolationRow {
            instance: &v.instance,
            what: &v.what,
            dump,
        });
    }
    let summary = VerifySummary {
        instances: outcome.instances,
        checks: outcome.checks,
        violations: outcome.violations.len(),
        worst_slacks: &outcome.worst,
        failures,
    };
    crate::write_json(&ctx.out_path("verify_summary.json"), &summary)?;

    let mut block = Summary::new("invariant audit");
    block.push("instances", outcome.instances.to_string());
    block.push("checks", outcome.checks.to_string());
    block.push("violations", outcome.violations.len().to_string());
    for (name, value, _) in outcome.worst.rows() {
        let text = if value.is_finite() {
            sig12(value)
        } else {
            "n/a".to_string()
        };
        block.push(name, text);
    }
    print!("{}", block.render(ctx.format));
    for v in outcome.violations.iter().take(MAX_DUMPS) {
        eprintln!("violation: {}: {}", v.instance, v.what);
    }
    if outcome.violations.len() > MAX_DUMPS {
        eprintln!("... and {} more", outcome.violations.len() - MAX_DUMPS);
    }

    manifest::emit(
        ctx,
        "verify",
        json!({
            "instances": args.instances,
            "inject_fault": args.fault.map(|_| "margin"),
        }),
        ctx.seed,
        &["verify_summary.json"],
        started,
    )?;

    if outcome.violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::failure(format!(
            "{} of {} checks failed across {} instances",
            outcome.violations.len(),
            outcome.checks,
            outcome.instances
        )))
    }
}

fn run_suite(ctx: &RunContext, args: &VerifyArgs) -> Result<SuiteOutcome, CliError> {
    let run = || audit::run_random_suite(args.instances, ctx.seed, args.fault);
    if ctx.jobs == 0 {
        return Ok(run());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.jobs)
        .build()
        .map_err(|e| CliError::failure(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(run))
}
