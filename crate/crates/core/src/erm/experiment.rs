//! Repeated-trial training experiments: draw a training set, fit the exact
//! empirical minimizer of a family in both modes, and score everything
//! against the generating distribution.

use serde::Serialize;
use thiserror::Error;

use crate::bayes::{self, BayesError};
use crate::distribution::JointTable;
use crate::erm::histogram::{fit_histogram, HistogramError, HistogramParams};
use crate::erm::tabular::fit_tabular;
use crate::erm::threshold::{fit_threshold, ThresholdError};
use crate::erm::training::{
    sample_training_set, ClassifierMode, SampleSizeRule, TrainingError, TrainingSet,
};
use crate::generators::{GeneratorError, GeneratorSpec};
use crate::seed;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("bad experiment config: {message}")]
    BadConfig { message: String },
    #[error("histogram family needs bin parameters")]
    MissingHistogramParams,
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Training(#[from] TrainingError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Histogram(#[from] HistogramError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Tabular,
    Threshold,
    Histogram,
}

impl Family {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "tabular" => Some(Family::Tabular),
            "threshold" => Some(Family::Threshold),
            "histogram" => Some(Family::Histogram),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Tabular => "tabular",
            Family::Threshold => "threshold",
            Family::Histogram => "histogram",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    pub family: Family,
    /// Required iff `family` is `Histogram`.
    pub histogram: Option<HistogramParams>,
    pub n_domains: usize,
    pub size_rule: SampleSizeRule,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub train_risk_pool: f64,
    pub train_risk_dg: f64,
    pub pop_risk_pool: f64,
    pub pop_risk_dg: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SummaryStat {
    pub mean: f64,
    pub se: f64,
}

impl SummaryStat {
    fn over(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count();
        let mean = values.clone().sum::<f64>() / n as f64;
        let se = if n < 2 {
            0.0
        } else {
            let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        SummaryStat { mean, se }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExperimentSummary {
    pub train_pool: SummaryStat,
    pub train_dg: SummaryStat,
    pub pop_pool: SummaryStat,
    pub pop_dg: SummaryStat,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub bayes_pool_risk: f64,
    pub bayes_dg_risk: f64,
    pub trials: Vec<TrialOutcome>,
    pub summary: ExperimentSummary,
}

struct FittedPair {
    train_pool: f64,
    train_dg: f64,
    pop_pool: f64,
    pop_dg: f64,
}

fn fit_both(
    cfg: &ExperimentConfig,
    j: &JointTable,
    ts: &TrainingSet,
) -> Result<FittedPair, ExperimentError> {
    let pair = match cfg.family {
        Family::Tabular => {
            let pool = fit_tabular(ts, ClassifierMode::Pool);
            let dg = fit_tabular(ts, ClassifierMode::Dg);
            FittedPair {
                train_pool: ts.empirical_risk(|x, m| pool.classify(x, m)),
                train_dg: ts.empirical_risk(|x, m| dg.classify(x, m)),
                pop_pool: j.risk_of(|x, m| pool.classify(x, m)),
                pop_dg: j.risk_of(|x, m| dg.classify(x, m)),
            }
        }
        Family::Threshold => {
            let pool = fit_threshold(ts, ClassifierMode::Pool)?;
            let dg = fit_threshold(ts, ClassifierMode::Dg)?;
            let xs = ts.support().x_values().to_vec();
            FittedPair {
                train_pool: ts.empirical_risk(|x, m| pool.classify_value(xs[x], m)),
                train_dg: ts.empirical_risk(|x, m| dg.classify_value(xs[x], m)),
                pop_pool: pool.population_risk(j),
                pop_dg: dg.population_risk(j),
            }
        }
        Family::Histogram => {
            let params = cfg.histogram.ok_or(ExperimentError::MissingHistogramParams)?;
            let pool = fit_histogram(ts, ClassifierMode::Pool, params)?;
            let dg = fit_histogram(ts, ClassifierMode::Dg, params)?;
            let xs = ts.support().x_values().to_vec();
            FittedPair {
                train_pool: ts.empirical_risk(|x, m| pool.classify_value(xs[x], m)),
                train_dg: ts.empirical_risk(|x, m| dg.classify_value(xs[x], m)),
                pop_pool: pool.population_risk(j),
                pop_dg: dg.population_risk(j),
            }
        }
    };
    Ok(pair)
}

/// Runs `cfg.trials` independent trials. Trial `t` draws its training set
/// from a seed derived as `(cfg.seed, t)`, so reruns and subsets reproduce
/// exactly. Relative generator paths resolve against `base_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    base_dir: &std::path::Path,
) -> Result<ExperimentResult, ExperimentError> {
    if cfg.trials == 0 {
        return Err(ExperimentError::BadConfig {
            message: "trials must be at least 1".into(),
        });
    }
    if cfg.family == Family::Histogram && cfg.histogram.is_none() {
        return Err(ExperimentError::MissingHistogramParams);
    }
    let f = cfg.generator.instantiate(base_dir)?;
    let j = f.joint();
    let solution = bayes::solve_bayes(&j);
    let report = bayes::risks(&j, &solution)?;
    let mut trials = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let trial_seed = seed::derive(cfg.seed, t as u64);
        let ts = sample_training_set(&f, cfg.n_domains, cfg.size_rule, trial_seed)?;
        let fitted = fit_both(cfg, &j, &ts)?;
        trials.push(TrialOutcome {
            trial: t,
            seed: trial_seed,
            train_risk_pool: fitted.train_pool,
            train_risk_dg: fitted.train_dg,
            pop_risk_pool: fitted.pop_pool,
            pop_risk_dg: fitted.pop_dg,
        });
    }
    let summary = ExperimentSummary {
        train_pool: SummaryStat::over(trials.iter().map(|t| t.train_risk_pool)),
        train_dg: SummaryStat::over(trials.iter().map(|t| t.train_risk_dg)),
        pop_pool: SummaryStat::over(trials.iter().map(|t| t.pop_risk_pool)),
        pop_dg: SummaryStat::over(trials.iter().map(|t| t.pop_risk_dg)),
    };
    Ok(ExperimentResult {
        config: cfg.clone(),
        bayes_pool_risk: report.r_pool,
        bayes_dg_risk: report.r_dg,
        trials,
        summary,
    })
}
