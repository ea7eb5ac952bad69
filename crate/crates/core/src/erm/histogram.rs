//! Fixed-width histogram classifiers of capacity `k`: equal bins over a
//! stated feature range, one label per bin (pool) or per bin and metadata
//! symbol (dg). The dg family contains every pool classifier (take labels
//! constant in metadata), so the exact dg optimum can never be worse at
//! any capacity; the computation below preserves that ordering bit-exactly
//! in f64, not just in real arithmetic.

use serde::Serialize;
use thiserror::Error;

use crate::distribution::JointTable;
use crate::erm::training::{ClassifierMode, TrainingSet};

#[derive(Debug, Error)]
pub enum HistogramError {
    #[error("need at least one bin, got {bins}")]
    NoBins { bins: usize },
    #[error("bin range must be finite with lo < hi, got [{lo}, {hi}]")]
    BadRange { lo: f64, hi: f64 },
    #[error("capacity list must be nonempty and strictly increasing")]
    BadCapacities,
}

/// Equal-width binning of a feature range. Values outside the range clamp
/// to the boundary bins.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistogramParams {
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
}

impl HistogramParams {
    pub fn validate(&self) -> Result<(), HistogramError> {
        if self.bins == 0 {
            return Err(HistogramError::NoBins { bins: self.bins });
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(HistogramError::BadRange {
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(())
    }

    pub fn bin_of(&self, x: f64) -> usize {
        let scaled = (x - self.lo) / (self.hi - self.lo) * self.bins as f64;
        let raw = scaled.floor();
        if raw < 0.0 {
            0
        } else {
            (raw as usize).min(self.bins - 1)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramClassifier {
    mode: ClassifierMode,
    m_count: usize,
    params: HistogramParams,
    labels: Vec<Option<usize>>,
    fallback: usize,
}

impl HistogramClassifier {
    pub fn mode(&self) -> ClassifierMode {
        self.mode
    }

    pub fn params(&self) -> HistogramParams {
        self.params
    }

    pub fn classify_value(&self, x: f64, m: usize) -> usize {
        let bin = self.params.bin_of(x);
        let cell = match self.mode {
            ClassifierMode::Pool => bin,
            ClassifierMode::Dg => bin * self.m_count + m,
        };
        self.labels[cell].unwrap_or(self.fallback)
    }

    pub fn population_risk(&self, j: &JointTable) -> f64 {
        let x_values = j.support().x_values().to_vec();
        j.risk_of(|x, m| self.classify_value(x_values[x], m))
    }
}

fn weighted_argmax(weights: &[f64]) -> usize {
    let mut best = 0;
    for (y, &w) in weights.iter().enumerate() {
        if w > weights[best] {
            best = y;
        }
    }
    best
}

/// Exact empirical minimizer over the histogram family: per-cell weighted
/// majority, unseen cells fall back to the global majority.
pub fn fit_histogram(
    ts: &TrainingSet,
    mode: ClassifierMode,
    params: HistogramParams,
) -> Result<HistogramClassifier, HistogramError> {
    params.validate()?;
    let s = ts.support();
    let (ny, nm) = (s.y_count(), s.m_count());
    let x_values = s.x_values();
    let n_cells = match mode {
        ClassifierMode::Pool => params.bins,
        ClassifierMode::Dg => params.bins * nm,
    };
    let mut cell_weight = vec![0.0f64; n_cells * ny];
    let mut global_weight = vec![0.0f64; ny];
    for (i, record) in ts.records().iter().enumerate() {
        let w = ts.sample_weight(i);
        for &(x, y) in record.samples() {
            let bin = params.bin_of(x_values[x]);
            let cell = match mode {
                ClassifierMode::Pool => bin,
                ClassifierMode::Dg => bin * nm + record.m(),
            };
            cell_weight[cell * ny + y] += w;
            global_weight[y] += w;
        }
    }
    let labels = (0..n_cells)
        .map(|cell| {
            let row = &cell_weight[cell * ny..(cell + 1) * ny];
            if row.iter().all(|&w| w == 0.0) {
                None
            } else {
                Some(weighted_argmax(row))
            }
        })
        .collect();
    Ok(HistogramClassifier {
        mode,
        m_count: nm,
        params,
        labels,
        fallback: weighted_argmax(&global_weight),
    })
}

/// Exact best-in-family risks computed against the distribution.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HistogramOptima {
    pub pool_risk: f64,
    pub dg_risk: f64,
}

/// Best histogram risks of both modes, from the per-(bin, metadata, class)
/// mass table.
///
/// The pooled correct mass per bin is `max_y sum_m W[b][m][y]` and the dg
/// correct mass is `sum_m max_y W[b][m][y]`. Every pooled summand is
/// bounded by its dg counterpart, the sums run in the same order, and f64
/// addition and subtraction are monotone, so `pool_risk >= dg_risk` holds
/// for the returned values exactly, never just up to rounding.
pub fn exact_histogram_optima(
    j: &JointTable,
    params: HistogramParams,
) -> Result<HistogramOptima, HistogramError> {
    params.validate()?;
    let s = j.support();
    let (ny, nm, nd) = (s.y_count(), s.m_count(), s.d_count());
    let x_values = s.x_values();
    let nb = params.bins;
    let mut w = vec![0.0f64; nb * nm * ny];
    for (x, &xv) in x_values.iter().enumerate() {
        let bin = params.bin_of(xv);
        for y in 0..ny {
            for m in 0..nm {
                for d in 0..nd {
                    w[(bin * nm + m) * ny + y] += j.mass(x, y, m, d);
                }
            }
        }
    }
    let mut total = 0.0;
    let mut pool_correct = 0.0;
    let mut dg_correct = 0.0;
    for b in 0..nb {
        let cell = |m: usize, y: usize| w[(b * nm + m) * ny + y];
        for m in 0..nm {
            for y in 0..ny {
                total += cell(m, y);
            }
        }
        let mut best_pooled = f64::NEG_INFINITY;
        for y in 0..ny {
            let mut mass = 0.0;
            for m in 0..nm {
                mass += cell(m, y);
            }
            best_pooled = best_pooled.max(mass);
        }
        pool_correct += best_pooled;
        for m in 0..nm {
            let mut best = 0.0f64;
            for y in 0..ny {
                best = best.max(cell(m, y));
            }
            dg_correct += best;
        }
    }
    // Clamping at zero is monotone, so it cannot break the ordering.
    Ok(HistogramOptima {
        pool_risk: (total - pool_correct).max(0.0),
        dg_risk: (total - dg_correct).max(0.0),
    })
}

/// One capacity step of a sweep. Empirical columns are present only when
/// the sweep was given a training set to fit.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub pool_risk: f64,
    pub dg_risk: f64,
    pub gap: f64,
    pub empirical_pool_risk: Option<f64>,
    pub empirical_dg_risk: Option<f64>,
}

pub enum SweepMode<'a> {
    /// Exact family optima only.
    Exact,
    /// Additionally fit both modes on this training set and evaluate the
    /// fitted classifiers' exact population risks.
    Empirical(&'a TrainingSet),
}

/// Runs the capacity ladder. Capacities must be strictly increasing. The
/// exact columns satisfy `pool_risk >= dg_risk` on every row by
/// construction; the assert documents the invariant rather than guarding a
/// plausible failure.
pub fn capacity_sweep(
    j: &JointTable,
    range: (f64, f64),
    ks: &[usize],
    mode: SweepMode<'_>,
) -> Result<Vec<SweepRow>, HistogramError> {
    if ks.is_empty() || ks.windows(2).any(|pair| pair[0] >= pair[1]) {
        return Err(HistogramError::BadCapacities);
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let params = HistogramParams {
            bins: k,
            lo: range.0,
            hi: range.1,
        };
        let optima = exact_histogram_optima(j, params)?;
        assert!(
            optima.pool_risk >= optima.dg_risk,
            "histogram optima ordering broke at k={k}"
        );
        let (empirical_pool_risk, empirical_dg_risk) = match mode {
            SweepMode::Exact => (None, None),
            SweepMode::Empirical(ts) => {
                let pool = fit_histogram(ts, ClassifierMode::Pool, params)?;
                let dg = fit_histogram(ts, ClassifierMode::Dg, params)?;
                (Some(pool.population_risk(j)), Some(dg.population_risk(j)))
            }
        };
        rows.push(SweepRow {
            k,
            pool_risk: optima.pool_risk,
            dg_risk: optima.dg_risk,
            gap: optima.pool_risk - optima.dg_risk,
            empirical_pool_risk,
            empirical_dg_risk,
        });
    }
    Ok(rows)
}
