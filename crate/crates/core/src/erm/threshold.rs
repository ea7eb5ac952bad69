//! Single-threshold classifiers on scalar features, binary labels only.
//!
//! The empirical minimizer is found exactly: error as a function of the
//! threshold is piecewise constant and can only change at the data points,
//! so scanning candidate cuts at `-inf`, the midpoints between consecutive
//! distinct feature values, and `+inf` visits every achievable error. The
//! same scan run on distribution masses instead of sample weights gives the
//! exact population optimum of the family.

use serde::Serialize;
use thiserror::Error;

use crate::distribution::JointTable;
use crate::erm::training::{ClassifierMode, TrainingSet};

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error("threshold family needs exactly 2 classes, support has {y_count}")]
    NotBinary { y_count: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Class 1 strictly right of the threshold.
    Plus,
    /// Class 1 at or left of the threshold.
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdRule {
    /// May be infinite; an infinite threshold makes the rule constant.
    pub threshold: f64,
    pub orientation: Orientation,
}

impl ThresholdRule {
    pub fn classify_value(&self, x: f64) -> usize {
        let right = x > self.threshold;
        match self.orientation {
            Orientation::Plus => usize::from(right),
            Orientation::Minus => usize::from(!right),
        }
    }
}

/// One rule for pool mode; one per metadata symbol for dg mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdClassifier {
    mode: ClassifierMode,
    rules: Vec<ThresholdRule>,
}

impl ThresholdClassifier {
    pub fn mode(&self) -> ClassifierMode {
        self.mode
    }

    pub fn rules(&self) -> &[ThresholdRule] {
        &self.rules
    }

    pub fn classify_value(&self, x: f64, m: usize) -> usize {
        let rule = match self.mode {
            ClassifierMode::Pool => &self.rules[0],
            ClassifierMode::Dg => &self.rules[m],
        };
        rule.classify_value(x)
    }

    /// Exact population 0-1 risk against a joint table on the same support.
    pub fn population_risk(&self, j: &JointTable) -> f64 {
        let x_values = j.support().x_values().to_vec();
        j.risk_of(|x, m| self.classify_value(x_values[x], m))
    }
}

struct WeightedSample {
    x: f64,
    y: usize,
    w: f64,
}

/// Exact minimizer over (threshold, orientation); ties resolved toward the
/// smallest threshold, then `Plus`. Returns the rule and its error, the
/// latter recomputed by direct summation so separable data reports an
/// exact zero instead of the running scan's rounding dust.
fn best_threshold(samples: &mut [WeightedSample]) -> (ThresholdRule, f64) {
    samples.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("finite features"));
    let w_total: f64 = samples.iter().map(|s| s.w).sum();
    // At -inf everything is to the right: Plus predicts all 1.
    let mut err_plus: f64 = samples.iter().filter(|s| s.y == 0).map(|s| s.w).sum();
    let mut best_rule = ThresholdRule {
        threshold: f64::NEG_INFINITY,
        orientation: Orientation::Plus,
    };
    let mut best_err = err_plus;
    // Minus mispredicts exactly where Plus is correct.
    if w_total - err_plus < best_err {
        best_err = w_total - err_plus;
        best_rule.orientation = Orientation::Minus;
    }
    let mut i = 0;
    while i < samples.len() {
        let v = samples[i].x;
        while i < samples.len() && samples[i].x == v {
            // The group at v moves to the predicted-0 side.
            if samples[i].y == 1 {
                err_plus += samples[i].w;
            } else {
                err_plus -= samples[i].w;
            }
            i += 1;
        }
        let threshold = if i == samples.len() {
            f64::INFINITY
        } else {
            (v + samples[i].x) / 2.0
        };
        for (orientation, err) in [
            (Orientation::Plus, err_plus),
            (Orientation::Minus, w_total - err_plus),
        ] {
            if err < best_err {
                best_err = err;
                best_rule = ThresholdRule {
                    threshold,
                    orientation,
                };
            }
        }
    }
    let err = samples
        .iter()
        .filter(|s| best_rule.classify_value(s.x) != s.y)
        .map(|s| s.w)
        .sum();
    (best_rule, err)
}

/// Fits the threshold family to a training set. In dg mode a metadata
/// symbol with no training records inherits the pooled rule; that keeps
/// predictions defined everywhere without inventing data.
pub fn fit_threshold(
    ts: &TrainingSet,
    mode: ClassifierMode,
) -> Result<ThresholdClassifier, ThresholdError> {
    let s = ts.support();
    if s.y_count() != 2 {
        return Err(ThresholdError::NotBinary {
            y_count: s.y_count(),
        });
    }
    let x_values = s.x_values();
    let collect = |keep_m: Option<usize>| -> Vec<WeightedSample> {
        let mut samples = Vec::new();
        for (i, record) in ts.records().iter().enumerate() {
            if keep_m.is_some_and(|m| m != record.m()) {
                continue;
            }
            let w = ts.sample_weight(i);
            for &(x, y) in record.samples() {
                samples.push(WeightedSample {
                    x: x_values[x],
                    y,
                    w,
                });
            }
        }
        samples
    };
    let (pooled_rule, _) = best_threshold(&mut collect(None));
    let rules = match mode {
        ClassifierMode::Pool => vec![pooled_rule],
        ClassifierMode::Dg => (0..s.m_count())
            .map(|m| {
                let mut samples = collect(Some(m));
                if samples.is_empty() {
                    pooled_rule
                } else {
                    best_threshold(&mut samples).0
                }
            })
            .collect(),
    };
    Ok(ThresholdClassifier { mode, rules })
}

/// Exact population optima of the threshold family.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdOptima {
    pub pool_risk: f64,
    pub dg_risk: f64,
    pub pool_rule: ThresholdRule,
    pub dg_rules: Vec<ThresholdRule>,
}

/// Exact best-in-family risks against the distribution itself: the scan
/// runs on probability masses instead of sample weights. `dg_risk` sums
/// each metadata context's own optimum, weighted by context mass.
pub fn optimal_threshold_risks(j: &JointTable) -> Result<ThresholdOptima, ThresholdError> {
    let s = j.support();
    if s.y_count() != 2 {
        return Err(ThresholdError::NotBinary {
            y_count: s.y_count(),
        });
    }
    let (nx, nm, nd) = (s.x_count(), s.m_count(), s.d_count());
    let x_values = s.x_values();
    let mass_xym = |x: usize, y: usize, m: usize| -> f64 {
        (0..nd).map(|d| j.mass(x, y, m, d)).sum()
    };
    let mut pooled: Vec<WeightedSample> = Vec::with_capacity(nx * 2);
    for (x, &xv) in x_values.iter().enumerate() {
        for y in 0..2 {
            let w: f64 = (0..nm).map(|m| mass_xym(x, y, m)).sum();
            pooled.push(WeightedSample { x: xv, y, w });
        }
    }
    let (pool_rule, pool_risk) = best_threshold(&mut pooled);
    let mut dg_risk = 0.0;
    let mut dg_rules = Vec::with_capacity(nm);
    for m in 0..nm {
        let mut samples: Vec<WeightedSample> = Vec::with_capacity(nx * 2);
        for (x, &xv) in x_values.iter().enumerate() {
            for y in 0..2 {
                samples.push(WeightedSample {
                    x: xv,
                    y,
                    w: mass_xym(x, y, m),
                });
            }
        }
        let (rule, err) = best_threshold(&mut samples);
        dg_rules.push(rule);
        dg_risk += err;
    }
    Ok(ThresholdOptima {
        pool_risk,
        dg_risk,
        pool_rule,
        dg_rules,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erm::training::DomainRecord;
    use crate::support::Support;

    fn line_support(xs: Vec<f64>) -> Support {
        Support::new(xs, 2, vec!["m1".into()], vec!["d1".into()]).unwrap()
    }

    #[test]
    fn two_separable_points() {
        let ts = TrainingSet::from_records(
            line_support(vec![0.0, 1.0]),
            vec![DomainRecord::new(0, vec![(0, 0), (1, 1)])],
            0,
        )
        .unwrap();
        let fit = fit_threshold(&ts, ClassifierMode::Pool).unwrap();
        let rule = fit.rules()[0];
        assert_eq!(rule.orientation, Orientation::Plus);
        assert!(rule.threshold > 0.0 && rule.threshold < 1.0);
        assert_eq!(ts.empirical_risk(|x, m| fit.classify_value([0.0, 1.0][x], m)), 0.0);
    }

    #[test]
    fn reversed_points_need_minus_orientation() {
        let ts = TrainingSet::from_records(
            line_support(vec![0.0, 1.0]),
            vec![DomainRecord::new(0, vec![(0, 1), (1, 0)])],
            0,
        )
        .unwrap();
        let fit = fit_threshold(&ts, ClassifierMode::Pool).unwrap();
        let rule = fit.rules()[0];
        assert_eq!(rule.orientation, Orientation::Minus);
        assert_eq!(rule.classify_value(0.0), 1);
        assert_eq!(rule.classify_value(1.0), 0);
    }

    #[test]
    fn constant_data_uses_infinite_threshold() {
        let ts = TrainingSet::from_records(
            line_support(vec![0.0, 1.0]),
            vec![DomainRecord::new(0, vec![(0, 1), (1, 1)])],
            0,
        )
        .unwrap();
        let fit = fit_threshold(&ts, ClassifierMode::Pool).unwrap();
        let rule = fit.rules()[0];
        // All-1 prediction appears first as Plus at -inf.
        assert_eq!(rule.threshold, f64::NEG_INFINITY);
        assert_eq!(rule.orientation, Orientation::Plus);
        assert_eq!(rule.classify_value(0.5), 1);
    }

    #[test]
    fn ties_prefer_smallest_threshold_then_plus() {
        // One point each way at the same x: every rule errs by half, so
        // the first candidate (-inf, Plus) must win.
        let ts = TrainingSet::from_records(
            line_support(vec![0.0]),
            vec![DomainRecord::new(0, vec![(0, 0), (0, 1)])],
            0,
        )
        .unwrap();
        let fit = fit_threshold(&ts, ClassifierMode::Pool).unwrap();
        let rule = fit.rules()[0];
        assert_eq!(rule.threshold, f64::NEG_INFINITY);
        assert_eq!(rule.orientation, Orientation::Plus);
    }

    #[test]
    fn unseen_metadata_context_inherits_the_pooled_rule() {
        let support = Support::new(
            vec![0.0, 1.0],
            2,
            vec!["m1".into(), "m2".into()],
            vec!["d1".into()],
        )
        .unwrap();
        let ts = TrainingSet::from_records(
            support,
            vec![DomainRecord::new(0, vec![(0, 0), (1, 1)])],
            0,
        )
        .unwrap();
        let fit = fit_threshold(&ts, ClassifierMode::Dg).unwrap();
        assert_eq!(fit.rules()[1], fit.rules()[0]);
    }

    #[test]
    fn non_binary_supports_are_rejected() {
        let support =
            Support::new(vec![0.0], 3, vec!["m1".into()], vec!["d1".into()]).unwrap();
        let ts = TrainingSet::from_records(
            support,
            vec![DomainRecord::new(0, vec![(0, 2)])],
            0,
        )
        .unwrap();
        assert!(matches!(
            fit_threshold(&ts, ClassifierMode::Pool),
            Err(ThresholdError::NotBinary { y_count: 3 })
        ));
    }
}
