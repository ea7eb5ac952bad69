//! ERM laboratory: finite-sample training sets drawn from a factored law,
//! exact 0-1 minimizers over small function families, and experiment
//! orchestration around them.
//!
//! The families are deliberately tiny (lookup tables, single thresholds,
//! fixed-width histograms) so the empirical minimizer can be found by
//! enumeration and the population risk of any fitted rule can be evaluated
//! exactly against the generating distribution. No optimizer noise, no
//! test-set noise; what remains is pure sampling noise in the training
//! draw.

pub mod config;
pub mod experiment;
pub mod histogram;
pub mod tabular;
pub mod threshold;
pub mod training;

pub use experiment::{run_experiment, ExperimentConfig, ExperimentResult, Family};
pub use training::{sample_training_set, ClassifierMode, SampleSizeRule, TrainingSet};
