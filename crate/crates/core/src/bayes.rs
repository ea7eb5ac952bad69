//! Exact Bayes classifiers and risk accounting on a finite joint table.
//!
//! Three observation regimes are compared: pooling (the classifier sees
//! only `x`), metadata-informed (`x` and `m`), and full information (`x`
//! and `d`). For each conditioning cell the optimal decision is the
//! posterior argmax, ties broken toward the smallest class index, and the
//! cell's risk contribution is its mass minus the top class mass. Working
//! in unnormalized masses keeps the reference values on the hand-checked
//! instances exact in f64.
//!
//! Cells with zero marginal mass have no posterior; their decisions and
//! margins are `None` and they are excluded from every expectation.

use serde::Serialize;
use thiserror::Error;

use crate::distribution::JointTable;
use crate::tol;

#[derive(Debug, Error)]
pub enum BayesError {
    #[error(
        "disagreement measure mismatch: direct {direct:.17} vs identity {identity:.17} \
         (tolerance {tol:e}); this indicates a computation bug"
    )]
    EpsilonMismatch { direct: f64, identity: f64, tol: f64 },
    #[error(
        "margin certificate violated: guaranteed gap {guaranteed:.17} but observed \
         {observed:.17} (tolerance {tol:e})"
    )]
    MarginBoundViolation {
        guaranteed: f64,
        observed: f64,
        tol: f64,
    },
    #[error(
        "metadata-invariant optimum but |r_pool - r_dg| = {gap:.17} exceeds {tol:e}"
    )]
    CovariateShiftGap { gap: f64, tol: f64 },
    #[error("certificate parameter {name} = {value} outside [0, 1]")]
    BadParameter { name: &'static str, value: f64 },
}

/// Optimal decisions and posterior margins for all three regimes.
///
/// Layouts: `f_pool[x]`, `f_dg[x * |M| + m]`, `f_full[x * |D| + d]`, and the
/// margins share the `f_dg`/`f_full` layouts. `None` marks a zero-mass cell.
/// The margin of a cell is the difference between its two largest posterior
/// values, so a duplicated maximum gives margin 0.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesSolution {
    pub f_pool: Vec<Option<usize>>,
    pub f_dg: Vec<Option<usize>>,
    pub f_full: Vec<Option<usize>>,
    pub margin_xm: Vec<Option<f64>>,
    pub margin_xd: Vec<Option<f64>>,
}

/// Exact risks, gaps, two-sided gap certificates, and the instance-level
/// margin/disagreement summary.
///
/// Field names are the stable serialization schema consumed by the CLI;
/// `thm1_*` sandwich `gap_pool_dg` (margin-weighted disagreement below,
/// disagreement probability above) and `thm3_*` sandwich `gap_dg_full` the
/// same way. The `disagreement_prob_*` fields repeat the upper bounds under
/// their probabilistic names.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiskReport {
    pub r_pool: f64,
    pub r_dg: f64,
    pub r_full: f64,
    pub gap_pool_dg: f64,
    pub gap_dg_full: f64,
    pub thm1_lower: f64,
    pub thm1_upper: f64,
    pub thm3_lower: f64,
    pub thm3_upper: f64,
    pub disagreement_prob_pool_dg: f64,
    pub disagreement_prob_full_dg: f64,
    pub epsilon_hat: f64,
    pub gamma_min: f64,
}

struct CellDecision {
    label: usize,
    mass: f64,
    top_mass: f64,
    margin: f64,
}

/// Per-cell optimal decision from unnormalized class masses.
fn decide(class_mass: &[f64]) -> Option<CellDecision> {
    let mass: f64 = class_mass.iter().sum();
    if mass <= 0.0 {
        return None;
    }
    let mut label = 0;
    for (y, &w) in class_mass.iter().enumerate() {
        if w > class_mass[label] {
            label = y;
        }
    }
    let mut posterior: Vec<f64> = class_mass.iter().map(|w| w / mass).collect();
    posterior.sort_by(|a, b| b.partial_cmp(a).expect("posterior is finite"));
    Some(CellDecision {
        label,
        mass,
        top_mass: class_mass[label],
        margin: posterior[0] - posterior[1],
    })
}

/// Class-mass marginals grouped by conditioning cell, plus the `(x, m, d)`
/// mass needed for cross-regime disagreement probabilities. Accumulated in
/// one pass over the joint in canonical index order.
struct Accumulated {
    nx: usize,
    ny: usize,
    nm: usize,
    nd: usize,
    /// `[x * ny + y]`
    xy: Vec<f64>,
    /// `[(x * nm + m) * ny + y]`
    xym: Vec<f64>,
    /// `[(x * nd + d) * ny + y]`
    xyd: Vec<f64>,
    /// `[(x * nm + m) * nd + d]`
    xmd: Vec<f64>,
}

impl Accumulated {
    fn new(j: &JointTable) -> Self {
        let s = j.support();
        let (nx, ny, nm, nd) = (s.x_count(), s.y_count(), s.m_count(), s.d_count());
        let mut acc = Accumulated {
            nx,
            ny,
            nm,
            nd,
            xy: vec![0.0; nx * ny],
            xym: vec![0.0; nx * nm * ny],
            xyd: vec![0.0; nx * nd * ny],
            xmd: vec![0.0; nx * nm * nd],
        };
        for x in 0..nx {
            for y in 0..ny {
                for m in 0..nm {
                    for d in 0..nd {
                        let p = j.mass(x, y, m, d);
                        acc.xy[x * ny + y] += p;
                        acc.xym[(x * nm + m) * ny + y] += p;
                        acc.xyd[(x * nd + d) * ny + y] += p;
                        acc.xmd[(x * nm + m) * nd + d] += p;
                    }
                }
            }
        }
        acc
    }

    fn xym_cell(&self, x: usize, m: usize) -> &[f64] {
        let start = (x * self.nm + m) * self.ny;
        &self.xym[start..start + self.ny]
    }

    fn xyd_cell(&self, x: usize, d: usize) -> &[f64] {
        let start = (x * self.nd + d) * self.ny;
        &self.xyd[start..start + self.ny]
    }

    fn xy_cell(&self, x: usize) -> &[f64] {
        &self.xy[x * self.ny..(x + 1) * self.ny]
    }
}

/// Computes the optimal decision tables for all three regimes.
pub fn solve_bayes(j: &JointTable) -> BayesSolution {
    let acc = Accumulated::new(j);
    let mut f_pool = Vec::with_capacity(acc.nx);
    let mut f_dg = Vec::with_capacity(acc.nx * acc.nm);
    let mut f_full = Vec::with_capacity(acc.nx * acc.nd);
    let mut margin_xm = Vec::with_capacity(acc.nx * acc.nm);
    let mut margin_xd = Vec::with_capacity(acc.nx * acc.nd);
    for x in 0..acc.nx {
        f_pool.push(decide(acc.xy_cell(x)).map(|c| c.label));
    }
    for x in 0..acc.nx {
        for m in 0..acc.nm {
            let cell = decide(acc.xym_cell(x, m));
            f_dg.push(cell.as_ref().map(|c| c.label));
            margin_xm.push(cell.as_ref().map(|c| c.margin));
        }
    }
    for x in 0..acc.nx {
        for d in 0..acc.nd {
            let cell = decide(acc.xyd_cell(x, d));
            f_full.push(cell.as_ref().map(|c| c.label));
            margin_xd.push(cell.as_ref().map(|c| c.margin));
        }
    }
    BayesSolution {
        f_pool,
        f_dg,
        f_full,
        margin_xm,
        margin_xd,
    }
}

fn risk_over_cells<'a>(cells: impl Iterator<Item = &'a [f64]>) -> f64 {
    let mut risk = 0.0;
    for class_mass in cells {
        if let Some(cell) = decide(class_mass) {
            risk += cell.mass - cell.top_mass;
        }
    }
    risk
}

/// Sandwich for `gap_pool_dg`: margin-weighted disagreement mass below,
/// disagreement probability above.
pub fn pool_dg_bounds(j: &JointTable, b: &BayesSolution) -> (f64, f64) {
    let acc = Accumulated::new(j);
    let mut lower = 0.0;
    let mut upper = 0.0;
    for x in 0..acc.nx {
        for m in 0..acc.nm {
            let (Some(pool), Some(dg)) = (b.f_pool[x], b.f_dg[x * acc.nm + m]) else {
                continue;
            };
            if pool == dg {
                continue;
            }
            let cell_mass: f64 = acc.xym_cell(x, m).iter().sum();
            let margin = b.margin_xm[x * acc.nm + m].expect("positive-mass cell has margin");
            lower += margin * cell_mass;
            upper += cell_mass;
        }
    }
    (lower, upper)
}

/// Sandwich for `gap_dg_full`: expectation is over `(x, m, d)` because the
/// two classifiers condition on different halves of the metadata.
pub fn full_dg_bounds(j: &JointTable, b: &BayesSolution) -> (f64, f64) {
    let acc = Accumulated::new(j);
    let mut lower = 0.0;
    let mut upper = 0.0;
    for x in 0..acc.nx {
        for m in 0..acc.nm {
            for d in 0..acc.nd {
                let cell_mass = acc.xmd[(x * acc.nm + m) * acc.nd + d];
                if cell_mass <= 0.0 {
                    continue;
                }
                // Positive (x,m,d) mass implies both cells are defined.
                let full = b.f_full[x * acc.nd + d].expect("positive-mass cell");
                let dg = b.f_dg[x * acc.nm + m].expect("positive-mass cell");
                if full == dg {
                    continue;
                }
                let margin = b.margin_xd[x * acc.nd + d].expect("positive-mass cell");
                lower += margin * cell_mass;
                upper += cell_mass;
            }
        }
    }
    (lower, upper)
}

/// Probability that two conditionally independent metadata draws lead the
/// metadata-informed classifier to different answers.
///
/// Computed twice: as the direct double sum over metadata pairs, and via
/// the collision identity `E_X[1 - sum_k pi_k(X)^2]` where `pi_k(x)` is the
/// probability mass of metadata steering the decision to class `k`. The two
/// must agree to [`tol::STRUCTURAL`]; disagreement is a hard error because
/// it can only come from a bug, not from the input.
pub fn epsilon_disagreement(j: &JointTable, b: &BayesSolution) -> Result<f64, BayesError> {
    let (direct, identity) = epsilon_routes(j, b);
    if (direct - identity).abs() > tol::STRUCTURAL {
        return Err(BayesError::EpsilonMismatch {
            direct,
            identity,
            tol: tol::STRUCTURAL,
        });
    }
    Ok(direct)
}

/// Both routes to the disagreement measure, without the agreement check.
/// Audits use this to report how far apart the routes actually land.
pub fn epsilon_routes(j: &JointTable, b: &BayesSolution) -> (f64, f64) {
    let acc = Accumulated::new(j);
    let mut direct = 0.0;
    let mut identity = 0.0;
    for x in 0..acc.nx {
        let p_x: f64 = acc.xy_cell(x).iter().sum();
        if p_x <= 0.0 {
            continue;
        }
        let p_m_given_x: Vec<f64> = (0..acc.nm)
            .map(|m| acc.xym_cell(x, m).iter().sum::<f64>() / p_x)
            .collect();
        let mut direct_x = 0.0;
        for m in 0..acc.nm {
            for m2 in 0..acc.nm {
                let (Some(a), Some(c)) = (b.f_dg[x * acc.nm + m], b.f_dg[x * acc.nm + m2])
                else {
                    continue;
                };
                if a != c {
                    direct_x += p_m_given_x[m] * p_m_given_x[m2];
                }
            }
        }
        direct += p_x * direct_x;

        let mut pi = vec![0.0; acc.ny];
        for (m, &weight) in p_m_given_x.iter().enumerate() {
            if let Some(k) = b.f_dg[x * acc.nm + m] {
                pi[k] += weight;
            }
        }
        let collision: f64 = pi.iter().map(|v| v * v).sum();
        identity += p_x * (1.0 - collision);
    }
    (direct, identity)
}

/// Smallest metadata-informed posterior margin over positive-mass `(x, m)`
/// cells, plus the count of zero-mass cells (whose margins are undefined).
pub fn margin_floor(j: &JointTable, b: &BayesSolution) -> (f64, usize) {
    let s = j.support();
    let mut floor = f64::INFINITY;
    let mut undefined = 0usize;
    for cell in 0..s.x_count() * s.m_count() {
        match b.margin_xm[cell] {
            Some(margin) => floor = floor.min(margin),
            None => undefined += 1,
        }
    }
    // Total mass 1 guarantees at least one defined cell.
    (floor, undefined)
}

/// Computes the full risk report for a solved instance.
pub fn risks(j: &JointTable, b: &BayesSolution) -> Result<RiskReport, BayesError> {
    let acc = Accumulated::new(j);
    let r_pool = risk_over_cells((0..acc.nx).map(|x| acc.xy_cell(x)));
    let r_dg = risk_over_cells(
        (0..acc.nx).flat_map(|x| (0..acc.nm).map(move |m| (x, m))).map(|(x, m)| acc.xym_cell(x, m)),
    );
    let r_full = risk_over_cells(
        (0..acc.nx).flat_map(|x| (0..acc.nd).map(move |d| (x, d))).map(|(x, d)| acc.xyd_cell(x, d)),
    );
    let (thm1_lower, thm1_upper) = pool_dg_bounds(j, b);
    let (thm3_lower, thm3_upper) = full_dg_bounds(j, b);
    let epsilon_hat = epsilon_disagreement(j, b)?;
    let (gamma_min, _) = margin_floor(j, b);
    Ok(RiskReport {
        r_pool,
        r_dg,
        r_full,
        gap_pool_dg: r_pool - r_dg,
        gap_dg_full: r_dg - r_full,
        thm1_lower,
        thm1_upper,
        thm3_lower,
        thm3_upper,
        disagreement_prob_pool_dg: thm1_upper,
        disagreement_prob_full_dg: thm3_upper,
        epsilon_hat,
        gamma_min,
    })
}

/// Margin-class certificate: membership and the implied gap guarantee.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PdClassCertificate {
    /// True when every positive-mass `(x, m)` margin reaches
    /// `required_margin` and the disagreement measure reaches
    /// `required_epsilon`, both within [`tol::STRUCTURAL`].
    pub member: bool,
    pub margin_floor: f64,
    pub epsilon_hat: f64,
    pub required_margin: f64,
    pub required_epsilon: f64,
    /// `required_margin * required_epsilon / 2`; binding only for members.
    pub guaranteed_gap: f64,
    pub observed_gap: f64,
    /// Zero-mass `(x, m)` cells, where margins are undefined. Reported so a
    /// membership claim can be audited against the cells it ignores.
    pub undefined_xm_cells: usize,
}

/// Decides membership in the margin/disagreement class with floor `gamma`
/// and disagreement level `epsilon`. For members, verifies the guaranteed
/// pooling-vs-metadata gap; a member that misses it is a hard error.
pub fn pd_class_certificate(
    j: &JointTable,
    b: &BayesSolution,
    gamma: f64,
    epsilon: f64,
) -> Result<PdClassCertificate, BayesError> {
    for (name, value) in [("gamma", gamma), ("epsilon", epsilon)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(BayesError::BadParameter { name, value });
        }
    }
    let report = risks(j, b)?;
    let (floor, undefined) = margin_floor(j, b);
    let member = floor >= gamma - tol::STRUCTURAL
        && report.epsilon_hat >= epsilon - tol::STRUCTURAL;
    let guaranteed_gap = gamma * epsilon / 2.0;
    let certificate = PdClassCertificate {
        member,
        margin_floor: floor,
        epsilon_hat: report.epsilon_hat,
        required_margin: gamma,
        required_epsilon: epsilon,
        guaranteed_gap,
        observed_gap: report.gap_pool_dg,
        undefined_xm_cells: undefined,
    };
    if member && report.gap_pool_dg < guaranteed_gap - tol::STRUCTURAL {
        return Err(BayesError::MarginBoundViolation {
            guaranteed: guaranteed_gap,
            observed: report.gap_pool_dg,
            tol: tol::STRUCTURAL,
        });
    }
    Ok(certificate)
}

/// True iff the metadata-informed optimum ignores metadata: `f_dg(x, m)` is
/// constant over positive-mass `m` for every `x`. When true, pooling loses
/// nothing, so `|r_pool - r_dg| > tolerance` is reported as a hard error.
pub fn covariate_shift_certificate(
    j: &JointTable,
    b: &BayesSolution,
    tolerance: f64,
) -> Result<bool, BayesError> {
    let s = j.support();
    let (nx, nm) = (s.x_count(), s.m_count());
    for x in 0..nx {
        let mut seen: Option<usize> = None;
        for m in 0..nm {
            if let Some(label) = b.f_dg[x * nm + m] {
                if *seen.get_or_insert(label) != label {
                    return Ok(false);
                }
            }
        }
    }
    let report = risks(j, b)?;
    let gap = (report.r_pool - report.r_dg).abs();
    if gap > tolerance {
        return Err(BayesError::CovariateShiftGap {
            gap,
            tol: tolerance,
        });
    }
    Ok(true)
}
