//! Two-stage training-set sampling.
//!
//! A training set is a list of domain draws: for each record, a hidden
//! domain `d_i ~ p_d`, an observed metadata symbol `m_i ~ p(m | d_i)`, and
//! `n_i` feature/label pairs drawn iid from the domain's table. Learners
//! see `m_i` and the samples, never `d_i`; the domain index is retained
//! only for diagnostics.
//!
//! The empirical objective weights every record equally: sample `j` of
//! record `i` carries weight `1 / (N * n_i)`, so large domains do not
//! drown out small ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::distribution::FactoredDistribution;
use crate::support::Support;

/// Which inputs a fitted classifier may condition on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierMode {
    /// Features only.
    Pool,
    /// Features and metadata.
    Dg,
}

/// Per-record sample count rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSizeRule {
    Constant(usize),
    /// Inclusive range, drawn uniformly per record.
    UniformRange { lo: usize, hi: usize },
}

#[derive(Debug, Error)]
pub enum TrainingError {
    #[error("need at least one domain record")]
    NoDomains,
    #[error("per-record sample sizes must satisfy 1 <= lo <= hi, got {lo}..={hi}")]
    BadSizeRule { lo: usize, hi: usize },
    #[error("record {index} has no samples")]
    EmptyRecord { index: usize },
    #[error("record {index}: {what} index out of support")]
    OutOfSupport { index: usize, what: &'static str },
}

/// One domain draw: observed metadata plus its samples, as support indices.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainRecord {
    m: usize,
    samples: Vec<(usize, usize)>,
    domain: Option<usize>,
}

impl DomainRecord {
    /// Handmade record with no hidden domain attached (test fixtures,
    /// exhaustive enumerations).
    pub fn new(m: usize, samples: Vec<(usize, usize)>) -> Self {
        DomainRecord {
            m,
            samples,
            domain: None,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `(x, y)` support-index pairs.
    pub fn samples(&self) -> &[(usize, usize)] {
        &self.samples
    }

    /// The hidden domain index, when this record came from the sampler.
    /// Diagnostics only; fitting code must not touch this.
    pub fn domain_for_diagnostics(&self) -> Option<usize> {
        self.domain
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    support: Support,
    records: Vec<DomainRecord>,
    master_seed: u64,
    source_fingerprint: u64,
}

impl TrainingSet {
    /// Assembles a training set from explicit records, validating the
    /// invariants the sampler guarantees by construction.
    pub fn from_records(
        support: Support,
        records: Vec<DomainRecord>,
        master_seed: u64,
    ) -> Result<Self, TrainingError> {
        if records.is_empty() {
            return Err(TrainingError::NoDomains);
        }
        for (index, record) in records.iter().enumerate() {
            if record.samples.is_empty() {
                return Err(TrainingError::EmptyRecord { index });
            }
            if record.m >= support.m_count() {
                return Err(TrainingError::OutOfSupport {
                    index,
                    what: "metadata",
                });
            }
            for &(x, y) in &record.samples {
                if x >= support.x_count() {
                    return Err(TrainingError::OutOfSupport {
                        index,
                        what: "feature",
                    });
                }
                if y >= support.y_count() {
                    return Err(TrainingError::OutOfSupport {
                        index,
                        what: "label",
                    });
                }
            }
        }
        Ok(TrainingSet {
            support,
            records,
            master_seed,
            source_fingerprint: 0,
        })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn records(&self) -> &[DomainRecord] {
        &self.records
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Fingerprint of the generating distribution, for tying artifacts
    /// back to their source.
    pub fn source_fingerprint(&self) -> u64 {
        self.source_fingerprint
    }

    pub fn total_samples(&self) -> usize {
        self.records.iter().map(|r| r.samples.len()).sum()
    }

    /// Weight carried by each sample of record `i`: `1 / (N * n_i)`.
    pub fn sample_weight(&self, record: usize) -> f64 {
        1.0 / (self.records.len() as f64 * self.records[record].samples.len() as f64)
    }

    /// Record-weighted empirical 0-1 risk of a classifier over `(x, m)`.
    pub fn empirical_risk(&self, classify: impl Fn(usize, usize) -> usize) -> f64 {
        let mut risk = 0.0;
        for (i, record) in self.records.iter().enumerate() {
            let w = self.sample_weight(i);
            for &(x, y) in &record.samples {
                if classify(x, record.m) != y {
                    risk += w;
                }
            }
        }
        risk
    }
}

/// Inverse-CDF draw from unnormalized nonnegative weights.
fn draw_categorical(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        cumulative += w;
        if target < cumulative {
            return i;
        }
    }
    // Round-off can push the target past the last positive weight; land on
    // the last index with mass rather than out of support.
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .expect("weights have positive total")
}

/// Draws a training set of `n_domains` records. Fully deterministic given
/// `master_seed`; the draw order per record is fixed (domain, metadata,
/// sample count, then samples) so adding records never perturbs earlier
/// ones.
pub fn sample_training_set(
    f: &FactoredDistribution,
    n_domains: usize,
    rule: SampleSizeRule,
    master_seed: u64,
) -> Result<TrainingSet, TrainingError> {
    if n_domains == 0 {
        return Err(TrainingError::NoDomains);
    }
    let (lo, hi) = match rule {
        SampleSizeRule::Constant(n) => (n, n),
        SampleSizeRule::UniformRange { lo, hi } => (lo, hi),
    };
    if lo == 0 || lo > hi {
        return Err(TrainingError::BadSizeRule { lo, hi });
    }
    let support = f.support().clone();
    let y_count = support.y_count();
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    let mut records = Vec::with_capacity(n_domains);
    for _ in 0..n_domains {
        let d = draw_categorical(&mut rng, f.p_d());
        let m = draw_categorical(&mut rng, f.p_m_given_d(d));
        let n_i = if lo == hi {
            lo
        } else {
            rng.gen_range(lo..=hi)
        };
        let table = f.p_xy_given_d(d);
        let mut samples = Vec::with_capacity(n_i);
        for _ in 0..n_i {
            let cell = draw_categorical(&mut rng, table);
            samples.push((cell / y_count, cell % y_count));
        }
        records.push(DomainRecord {
            m,
            samples,
            domain: Some(d),
        });
    }
    Ok(TrainingSet {
        support,
        records,
        master_seed,
        source_fingerprint: f.fingerprint(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make_random, RandomSizes};

    fn small() -> FactoredDistribution {
        make_random(
            RandomSizes {
                x_count: 3,
                y_count: 2,
                m_count: 2,
                d_count: 2,
            },
            11,
        )
        .unwrap()
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = small();
        let a = sample_training_set(&f, 20, SampleSizeRule::Constant(5), 77).unwrap();
        let b = sample_training_set(&f, 20, SampleSizeRule::Constant(5), 77).unwrap();
        assert_eq!(a, b);
        let c = sample_training_set(&f, 20, SampleSizeRule::Constant(5), 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn size_rules_are_respected() {
        let f = small();
        let ts = sample_training_set(
            &f,
            50,
            SampleSizeRule::UniformRange { lo: 2, hi: 6 },
            1,
        )
        .unwrap();
        assert!(ts
            .records()
            .iter()
            .all(|r| (2..=6).contains(&r.samples().len())));
        assert!(matches!(
            sample_training_set(&f, 5, SampleSizeRule::UniformRange { lo: 3, hi: 2 }, 1),
            Err(TrainingError::BadSizeRule { .. })
        ));
        assert!(matches!(
            sample_training_set(&f, 0, SampleSizeRule::Constant(1), 1),
            Err(TrainingError::NoDomains)
        ));
    }

    #[test]
    fn empirical_risk_of_perfect_memorizer_can_exceed_zero_only_on_conflicts() {
        let f = small();
        let ts = sample_training_set(&f, 10, SampleSizeRule::Constant(3), 5).unwrap();
        // Predicting a fixed class gives risk equal to the weighted share
        // of other classes; bounded by 1.
        let risk = ts.empirical_risk(|_, _| 0);
        assert!((0.0..=1.0).contains(&risk));
    }

    #[test]
    fn record_weights_sum_to_one() {
        let f = small();
        let ts = sample_training_set(
            &f,
            17,
            SampleSizeRule::UniformRange { lo: 1, hi: 4 },
            9,
        )
        .unwrap();
        let total: f64 = (0..ts.records().len())
            .map(|i| ts.sample_weight(i) * ts.records()[i].samples().len() as f64)
            .sum();
        assert!((total - 1.0).abs() <= 1e-9);
    }
}
