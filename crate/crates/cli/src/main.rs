use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dg_risklab::audit::Fault;
use dg_risklab::commands::{example1, experiment, figure1, report, sweep, verify};
use dg_risklab::outfmt::OutputFormat;
use dg_risklab::{CliError, RunContext};
use dg_risklab_core::generators::Figure1Scenario;

/// Exact decision-theoretic laboratory for pooled vs. metadata-informed
/// classification: risk reports, invariant audits, and seeded ERM
/// experiments on small finite instances.
#[derive(Parser)]
#[command(name = "dg-risklab", version, max_term_width = 100)]
struct Cli {
    /// Master seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Directory for artifact files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Stdout rendering: table, csv, or json. Artifact files keep their
    /// fixed formats regardless.
    #[arg(long, global = true, default_value = "table")]
    format: String,

    /// Worker threads for parallel sections (0 = all cores). Falls back to
    /// the DG_RISKLAB_JOBS environment variable.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact risk report for a distribution spec file.
    Report {
        /// Path to the spec file.
        spec: PathBuf,
    },
    /// Randomized audit of every structural invariant.
    Verify {
        /// Random instances to generate (structured ones are added on top).
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        /// Corrupt one stored margin per instance (negative control for
        /// the audit itself). Accepts: margin.
        #[arg(long, value_name = "FAULT")]
        inject_fault: Option<String>,
    },
    /// Monte Carlo ERM experiment from a config file.
    Experiment {
        /// Path to the experiment config.
        config: PathBuf,
    },
    /// Two-range threshold study: analytic optimum vs. fitted thresholds.
    Example1 {
        /// Mixture weights of the first domain, comma separated.
        #[arg(long = "p", value_delimiter = ',', default_values_t = vec![0.5, 0.6, 0.7, 0.9])]
        ps: Vec<f64>,
        /// Grid points per unit of feature range.
        #[arg(long, default_value_t = 200)]
        grid_n: usize,
        /// Samples per trial.
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        /// Independent trials per p.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Histogram capacity ladder from a config file.
    Sweep {
        /// Path to the sweep config.
        config: PathBuf,
    },
    /// Posterior-curve export for the two-curve illustration.
    Figure1 {
        /// Scenario: agree or disagree.
        scenario: String,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 121)]
        n_points: usize,
    },
}

fn resolve_jobs(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(jobs) = flag {
        return Ok(jobs);
    }
    match std::env::var("DG_RISKLAB_JOBS") {
        Ok(text) => text.parse().map_err(|_| {
            CliError::input(format!("DG_RISKLAB_JOBS must be an integer, got '{text}'"))
        }),
        Err(_) => Ok(0),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let format = OutputFormat::parse(&cli.format).ok_or_else(|| {
        CliError::input(format!(
            "unknown format '{}' (use table, csv, or json)",
            cli.format
        ))
    })?;
    let ctx = RunContext {
        seed: cli.seed,
        out_dir: cli.out,
        format,
        jobs: resolve_jobs(cli.jobs)?,
    };
    match cli.command {
        Command::Report { spec } => report::run(&ctx, &report::ReportArgs { spec_path: spec }),
        Command::Verify {
            instances,
            inject_fault,
        } => {
            let fault = match inject_fault {
                None => None,
                Some(name) => Some(Fault::parse(&name).ok_or_else(|| {
                    CliError::input(format!("unknown fault '{name}' (use margin)"))
                })?),
            };
            verify::run(&ctx, &verify::VerifyArgs { instances, fault })
        }
        Command::Experiment { config } => {
            experiment::run(&ctx, &experiment::ExperimentArgs { config_path: config })
        }
        Command::Example1 {
            ps,
            grid_n,
            samples,
            trials,
        } => example1::run(
            &ctx,
            &example1::Example1Args {
                ps,
                grid_n,
                samples,
                trials,
            },
        ),
        Command::Sweep { config } => sweep::run(&ctx, &sweep::SweepArgs { config_path: config }),
        Command::Figure1 {
            scenario,
            x_min,
            x_max,
            n_points,
        } => {
            let scenario = Figure1Scenario::parse(&scenario).ok_or_else(|| {
                CliError::input(format!("unknown scenario '{scenario}' (use agree or disagree)"))
            })?;
            figure1::run(
                &ctx,
                &figure1::Figure1Args {
                    scenario,
                    x_min,
                    x_max,
                    n_points,
                },
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
