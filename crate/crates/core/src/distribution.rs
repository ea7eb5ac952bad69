//! Factored finite joint distributions over `(X, Y, M, D)`.
//!
//! The generative model is stored in factored form: domain weights `p_d`, a
//! metadata emission row per domain `p_m_given_d`, and a per-domain table
//! over feature/label pairs `p_xy_given_d`. The induced joint is
//!
//! ```text
//! p(x, y, m, d) = p_d(d) * p_m_given_d(m | d) * p_xy_given_d(x, y | d)
//! ```
//!
//! so `P(x, y | m, d) = P(x, y | d)` holds identically: metadata carries no
//! information about the feature/label pair beyond the domain. Keeping the
//! factors private behind a validating constructor turns that structural
//! assumption into a construction-time guarantee. Dense [`JointTable`]s can
//! also be loaded directly so the independence checker has something to
//! check, but such tables are flagged unverified.
//!
//! Probabilities are plain `f64`. Validation enforces row sums to within
//! [`tol::STRUCTURAL`]; zero entries are legal and every downstream
//! computation either skips zero-mass conditioning events or fails loudly,
//! never silently substitutes a uniform.

use serde::Serialize;
use thiserror::Error;

use crate::support::{Axis, Support, SupportError};
use crate::tol;

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error(transparent)]
    Support(#[from] SupportError),
    #[error("{factor} {location}: expected {expected} entries, found {found}")]
    Shape {
        factor: &'static str,
        location: String,
        expected: usize,
        found: usize,
    },
    #[error("{factor} {location}: entry {index} is negative or non-finite ({value})")]
    Entry {
        factor: &'static str,
        location: String,
        index: usize,
        value: f64,
    },
    #[error("{factor} {location}: sums to {sum:.17} but must be 1 within {tol:e}")]
    Sum {
        factor: &'static str,
        location: String,
        sum: f64,
        tol: f64,
    },
}

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("marginal requires at least one axis to keep")]
    EmptyAxisSet,
    #[error("axis {axis} is not present in this table")]
    AxisNotPresent { axis: &'static str },
    #[error("index {index} out of range for axis {axis} of length {len}")]
    IndexOutOfRange {
        axis: &'static str,
        index: usize,
        len: usize,
    },
    #[error("conditioning event {event} has zero probability; the posterior is undefined")]
    ZeroProbabilityEvent { event: String },
}

fn check_row(
    factor: &'static str,
    location: String,
    expected: usize,
    row: &[f64],
) -> Result<(), ValidationError> {
    if row.len() != expected {
        return Err(ValidationError::Shape {
            factor,
            location,
            expected,
            found: row.len(),
        });
    }
    for (index, &value) in row.iter().enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(ValidationError::Entry {
                factor,
                location,
                index,
                value,
            });
        }
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > tol::STRUCTURAL {
        return Err(ValidationError::Sum {
            factor,
            location,
            sum,
            tol: tol::STRUCTURAL,
        });
    }
    Ok(())
}

/// A joint law over `(X, Y, M, D)` given by its generative factors.
///
/// Immutable after construction; the only way to obtain an expanded joint
/// from it is [`FactoredDistribution::joint`], which multiplies the factors
/// out cell by cell.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredDistribution {
    support: Support,
    p_d: Vec<f64>,
    p_m_given_d: Vec<Vec<f64>>,
    p_xy_given_d: Vec<Vec<f64>>,
}

impl FactoredDistribution {
    /// Validates shapes, signs, and row sums. `p_xy_given_d` holds one table
    /// per domain, flattened x-major: entry `x * y_count + y`.
    pub fn new(
        support: Support,
        p_d: Vec<f64>,
        p_m_given_d: Vec<Vec<f64>>,
        p_xy_given_d: Vec<Vec<f64>>,
    ) -> Result<Self, ValidationError> {
        let nd = support.d_count();
        let nm = support.m_count();
        let nxy = support.x_count() * support.y_count();

        check_row("p_d", "vector".to_string(), nd, &p_d)?;
        if p_m_given_d.len() != nd {
            return Err(ValidationError::Shape {
                factor: "p_m_given_d",
                location: "row count".to_string(),
                expected: nd,
                found: p_m_given_d.len(),
            });
        }
        for (d, row) in p_m_given_d.iter().enumerate() {
            let location = format!("row {}", support.d_values()[d]);
            check_row("p_m_given_d", location, nm, row)?;
        }
        if p_xy_given_d.len() != nd {
            return Err(ValidationError::Shape {
                factor: "p_xy_given_d",
                location: "block count".to_string(),
                expected: nd,
                found: p_xy_given_d.len(),
            });
        }
        for (d, table) in p_xy_given_d.iter().enumerate() {
            let location = format!("block {}", support.d_values()[d]);
            check_row("p_xy_given_d", location, nxy, table)?;
        }
        Ok(FactoredDistribution {
            support,
            p_d,
            p_m_given_d,
            p_xy_given_d,
        })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn p_d(&self) -> &[f64] {
        &self.p_d
    }

    pub fn p_m_given_d(&self, d: usize) -> &[f64] {
        &self.p_m_given_d[d]
    }

    /// Flattened `(x, y)` table for domain `d`; entry `x * y_count + y`.
    pub fn p_xy_given_d(&self, d: usize) -> &[f64] {
        &self.p_xy_given_d[d]
    }

    pub fn p_xy(&self, d: usize, x: usize, y: usize) -> f64 {
        self.p_xy_given_d[d][x * self.support.y_count() + y]
    }

    /// Expands the factors into a dense joint table. The result carries a
    /// verified-factored flag, since by construction it satisfies the
    /// conditional-independence structure exactly (up to f64 products).
    pub fn joint(&self) -> JointTable {
        let s = &self.support;
        let (nx, ny, nm, nd) = (s.x_count(), s.y_count(), s.m_count(), s.d_count());
        let mut p = vec![0.0; nx * ny * nm * nd];
        for x in 0..nx {
            for y in 0..ny {
                for m in 0..nm {
                    for d in 0..nd {
                        let cell = self.p_d[d] * self.p_m_given_d[d][m] * self.p_xy(d, x, y);
                        p[((x * ny + y) * nm + m) * nd + d] = cell;
                    }
                }
            }
        }
        JointTable {
            support: self.support.clone(),
            p,
            factored: true,
        }
    }

    /// Stable 64-bit identifier: FNV-1a over the canonical text serialization.
    /// Used to tie training sets back to the distribution they came from.
    pub fn fingerprint(&self) -> u64 {
        let text = crate::specfile::emit_spec(self);
        let mut hash: u64 = 0xcbf29ce484222325;
        for byte in text.bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x100000001b3);
        }
        hash
    }
}

/// Dense probability table over all four axes, x-major:
/// index `((x * |Y| + y) * |M| + m) * |D| + d`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    support: Support,
    p: Vec<f64>,
    factored: bool,
}

/// Outcome of the conditional-independence check
/// `P(x, y | m, d) = P(x, y | d)` over all positive-mass `(m, d)` pairs.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IndependenceReport {
    pub holds: bool,
    /// Largest `|P(x,y|m,d) - P(x,y|d)|` seen; 0 when no pair has mass.
    pub max_violation: f64,
}

/// Conditioning event for [`JointTable::posterior`]: any subset of the
/// non-label axes pinned to support indices.
#[derive(Clone, Copy, Debug, Default)]
pub struct Condition {
    pub x: Option<usize>,
    pub m: Option<usize>,
    pub d: Option<usize>,
}

impl Condition {
    fn describe(&self, support: &Support) -> String {
        let mut parts = Vec::new();
        if let Some(x) = self.x {
            parts.push(format!("X={}", support.x_values()[x]));
        }
        if let Some(m) = self.m {
            parts.push(format!("M={}", support.m_values()[m]));
        }
        if let Some(d) = self.d {
            parts.push(format!("D={}", support.d_values()[d]));
        }
        if parts.is_empty() {
            "(unconditional)".to_string()
        } else {
            parts.join(", ")
        }
    }
}

impl JointTable {
    /// Loads a dense joint directly. The table is validated for sign and
    /// total mass but nothing guarantees the factored structure, so the
    /// result is flagged unverified; [`Self::check_conditional_independence`]
    /// is the tool for deciding whether it has it.
    pub fn from_dense(support: Support, p: Vec<f64>) -> Result<Self, ValidationError> {
        let expected =
            support.x_count() * support.y_count() * support.m_count() * support.d_count();
        if p.len() != expected {
            return Err(ValidationError::Shape {
                factor: "joint",
                location: "dense table".to_string(),
                expected,
                found: p.len(),
            });
        }
        for (index, &value) in p.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ValidationError::Entry {
                    factor: "joint",
                    location: "dense table".to_string(),
                    index,
                    value,
                });
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tol::STRUCTURAL {
            return Err(ValidationError::Sum {
                factor: "joint",
                location: "dense table".to_string(),
                sum,
                tol: tol::STRUCTURAL,
            });
        }
        Ok(JointTable {
            support,
            p,
            factored: false,
        })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    /// Whether this table was expanded from validated factors.
    pub fn is_factored(&self) -> bool {
        self.factored
    }

    #[inline]
    fn idx(&self, x: usize, y: usize, m: usize, d: usize) -> usize {
        let s = &self.support;
        ((x * s.y_count() + y) * s.m_count() + m) * s.d_count() + d
    }

    pub fn mass(&self, x: usize, y: usize, m: usize, d: usize) -> f64 {
        self.p[self.idx(x, y, m, d)]
    }

    pub fn total_mass(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Marginal over the kept axes, always reported in canonical X, Y, M, D
    /// order regardless of the order in `keep`.
    pub fn marginal(&self, keep: &[Axis]) -> Result<MarginalTable, QueryError> {
        let axes: Vec<Axis> = Axis::ALL
            .iter()
            .copied()
            .filter(|a| keep.contains(a))
            .collect();
        if axes.is_empty() {
            return Err(QueryError::EmptyAxisSet);
        }
        let dims: Vec<usize> = axes.iter().map(|&a| self.support.axis_len(a)).collect();
        let mut p = vec![0.0; dims.iter().product()];
        let s = &self.support;
        for x in 0..s.x_count() {
            for y in 0..s.y_count() {
                for m in 0..s.m_count() {
                    for d in 0..s.d_count() {
                        let coords = [x, y, m, d];
                        let mut flat = 0;
                        for (pos, &axis) in axes.iter().enumerate() {
                            let c = match axis {
                                Axis::X => coords[0],
                                Axis::Y => coords[1],
                                Axis::M => coords[2],
                                Axis::D => coords[3],
                            };
                            flat = flat * dims[pos] + c;
                        }
                        p[flat] += self.mass(x, y, m, d);
                    }
                }
            }
        }
        Ok(MarginalTable { axes, dims, p })
    }

    /// Posterior over labels given the conditioning event. Fails with
    /// [`QueryError::ZeroProbabilityEvent`] when the event has no mass.
    pub fn posterior(&self, condition: &Condition) -> Result<Vec<f64>, QueryError> {
        let s = &self.support;
        for (axis, idx, len) in [
            ("X", condition.x, s.x_count()),
            ("M", condition.m, s.m_count()),
            ("D", condition.d, s.d_count()),
        ] {
            if let Some(i) = idx {
                if i >= len {
                    return Err(QueryError::IndexOutOfRange {
                        axis,
                        index: i,
                        len,
                    });
                }
            }
        }
        let mut numer = vec![0.0; s.y_count()];
        for x in 0..s.x_count() {
            if condition.x.is_some_and(|c| c != x) {
                continue;
            }
            for m in 0..s.m_count() {
                if condition.m.is_some_and(|c| c != m) {
                    continue;
                }
                for d in 0..s.d_count() {
                    if condition.d.is_some_and(|c| c != d) {
                        continue;
                    }
                    for (y, cell) in numer.iter_mut().enumerate() {
                        *cell += self.mass(x, y, m, d);
                    }
                }
            }
        }
        let denom: f64 = numer.iter().sum();
        if denom <= 0.0 {
            return Err(QueryError::ZeroProbabilityEvent {
                event: condition.describe(s),
            });
        }
        Ok(numer.into_iter().map(|v| v / denom).collect())
    }

    /// Checks `P(x, y | m, d) = P(x, y | d)` over every `(m, d)` pair with
    /// positive mass. Zero-mass pairs are skipped: they condition on nothing.
    pub fn check_conditional_independence(&self, tolerance: f64) -> IndependenceReport {
        let s = &self.support;
        let mut p_d = vec![0.0; s.d_count()];
        let mut p_md = vec![0.0; s.m_count() * s.d_count()];
        let mut p_xyd = vec![0.0; s.x_count() * s.y_count() * s.d_count()];
        for x in 0..s.x_count() {
            for y in 0..s.y_count() {
                for m in 0..s.m_count() {
                    for d in 0..s.d_count() {
                        let cell = self.mass(x, y, m, d);
                        p_d[d] += cell;
                        p_md[m * s.d_count() + d] += cell;
                        p_xyd[(x * s.y_count() + y) * s.d_count() + d] += cell;
                    }
                }
            }
        }
        let mut max_violation = 0.0f64;
        for m in 0..s.m_count() {
            for d in 0..s.d_count() {
                let mass_md = p_md[m * s.d_count() + d];
                if mass_md <= 0.0 {
                    continue;
                }
                for x in 0..s.x_count() {
                    for y in 0..s.y_count() {
                        let lhs = self.mass(x, y, m, d) / mass_md;
                        let rhs = p_xyd[(x * s.y_count() + y) * s.d_count() + d] / p_d[d];
                        max_violation = max_violation.max((lhs - rhs).abs());
                    }
                }
            }
        }
        IndependenceReport {
            holds: max_violation <= tolerance,
            max_violation,
        }
    }

    /// Exact population 0-1 risk of a classifier that sees `(x, m)`.
    /// The closure maps support indices to a 0-based label index.
    pub fn risk_of(&self, classify: impl Fn(usize, usize) -> usize) -> f64 {
        let s = &self.support;
        let mut risk = 0.0;
        for x in 0..s.x_count() {
            for m in 0..s.m_count() {
                let label = classify(x, m);
                for y in 0..s.y_count() {
                    if y == label {
                        continue;
                    }
                    for d in 0..s.d_count() {
                        risk += self.mass(x, y, m, d);
                    }
                }
            }
        }
        risk
    }
}

/// Dense marginal over a subset of axes, in canonical axis order.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalTable {
    axes: Vec<Axis>,
    dims: Vec<usize>,
    p: Vec<f64>,
}

impl MarginalTable {
    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Value at a multi-index given in the table's own axis order.
    pub fn value(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.dims.len(), "index arity mismatch");
        let mut flat = 0;
        for (pos, &c) in index.iter().enumerate() {
            assert!(c < self.dims[pos], "index out of range");
            flat = flat * self.dims[pos] + c;
        }
        self.p[flat]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Marginalizes further; `keep` must be a nonempty subset of this
    /// table's axes.
    pub fn marginal(&self, keep: &[Axis]) -> Result<MarginalTable, QueryError> {
        for axis in keep {
            if !self.axes.contains(axis) {
                return Err(QueryError::AxisNotPresent { axis: axis.name() });
            }
        }
        let axes: Vec<Axis> = self
            .axes
            .iter()
            .copied()
            .filter(|a| keep.contains(a))
            .collect();
        if axes.is_empty() {
            return Err(QueryError::EmptyAxisSet);
        }
        let dims: Vec<usize> = axes
            .iter()
            .map(|a| self.dims[self.axes.iter().position(|b| b == a).unwrap()])
            .collect();
        let mut p = vec![0.0; dims.iter().product()];
        let mut index = vec![0usize; self.dims.len()];
        for (flat_src, &mass) in self.p.iter().enumerate() {
            let mut rem = flat_src;
            for pos in (0..self.dims.len()).rev() {
                index[pos] = rem % self.dims[pos];
                rem /= self.dims[pos];
            }
            let mut flat = 0;
            for (pos, &axis) in axes.iter().enumerate() {
                let src_pos = self.axes.iter().position(|b| *b == axis).unwrap();
                flat = flat * dims[pos] + index[src_pos];
            }
            p[flat] += mass;
        }
        Ok(MarginalTable { axes, dims, p })
    }
}
