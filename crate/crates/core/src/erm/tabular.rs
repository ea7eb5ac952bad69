//! Unrestricted lookup-table classifiers: the exact empirical minimizer is
//! a per-cell weighted majority vote.

use serde::Serialize;

use crate::erm::training::{ClassifierMode, TrainingSet};

/// Lookup table over `x` (pool) or `(x, m)` (dg). Cells never seen in
/// training hold `None` and fall back to the global majority label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TabularClassifier {
    mode: ClassifierMode,
    m_count: usize,
    labels: Vec<Option<usize>>,
    fallback: usize,
}

impl TabularClassifier {
    pub fn mode(&self) -> ClassifierMode {
        self.mode
    }

    pub fn fallback(&self) -> usize {
        self.fallback
    }

    pub fn classify(&self, x: usize, m: usize) -> usize {
        let cell = match self.mode {
            ClassifierMode::Pool => x,
            ClassifierMode::Dg => x * self.m_count + m,
        };
        self.labels[cell].unwrap_or(self.fallback)
    }

    /// Fraction of cells that were actually constrained by training data.
    pub fn coverage(&self) -> f64 {
        let seen = self.labels.iter().filter(|l| l.is_some()).count();
        seen as f64 / self.labels.len() as f64
    }
}

/// Smallest index with the maximum weight.
fn weighted_argmax(weights: &[f64]) -> usize {
    let mut best = 0;
    for (y, &w) in weights.iter().enumerate() {
        if w > weights[best] {
            best = y;
        }
    }
    best
}

/// Exact minimizer of the record-weighted empirical 0-1 risk over the
/// tabular family: each cell independently takes the label with the
/// largest weighted count, ties toward the smaller label.
pub fn fit_tabular(ts: &TrainingSet, mode: ClassifierMode) -> TabularClassifier {
    let s = ts.support();
    let (nx, ny, nm) = (s.x_count(), s.y_count(), s.m_count());
    let n_cells = match mode {
        ClassifierMode::Pool => nx,
        ClassifierMode::Dg => nx * nm,
    };
    let mut cell_weight = vec![0.0f64; n_cells * ny];
    let mut global_weight = vec![0.0f64; ny];
    for (i, record) in ts.records().iter().enumerate() {
        let w = ts.sample_weight(i);
        for &(x, y) in record.samples() {
            let cell = match mode {
                ClassifierMode::Pool => x,
                ClassifierMode::Dg => x * nm + record.m(),
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
    TabularClassifier {
        mode,
        m_count: nm,
        labels,
        fallback: weighted_argmax(&global_weight),
    }
}
