//! Randomized invariant audit behind `dg-risklab verify`. Builds a
//! deterministic battery of instances (random, covariate-shift,
//! margin-class members, metadata refinements, and fixed fixtures),
//! re-derives every structural identity on each one, and tracks the worst
//! slack seen per identity. A violation carries the offending instance in
//! spec-file form so it can be replayed through `report`.

use dg_risklab_core::bayes::{self, BayesSolution, RiskReport};
use dg_risklab_core::generators::{self, Figure1Config, Figure1Scenario, PdSizes, RandomSizes};
use dg_risklab_core::specfile;
use dg_risklab_core::{seed, Condition, FactoredDistribution, JointTable, Support};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Slack budget for identities that hold exactly in real arithmetic.
pub const SLACK: f64 = 1e-12;

/// Below this margin a cell counts as tied: the two summation routes may
/// then disagree on the argmax inside rounding noise, so only the margin
/// values are compared, not the labels.
const TIE_GUARD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Overwrites one stored metadata-informed margin with 1.5 on every
    /// instance. The audit must flag all of them; this is the negative
    /// control proving the checks can fail.
    Margin,
}

impl Fault {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "margin" => Some(Fault::Margin),
            _ => None,
        }
    }
}

/// Worst slack seen per identity, minimized (or maximized, for the
/// absolute-split entries) over every instance. Fields that no instance
/// exercised stay at their identity value and serialize as null.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WorstSlacks {
    /// min of `r_pool - r_dg`; the hierarchy fails below `-SLACK`.
    pub hierarchy_pool_dg: f64,
    /// min of `r_dg - r_full`.
    pub hierarchy_dg_full: f64,
    /// min of `gap_pool_dg - thm1_lower`.
    pub thm1_lower: f64,
    /// min of `thm1_upper - gap_pool_dg`.
    pub thm1_upper: f64,
    /// min of `gap_dg_full - thm3_lower`.
    pub thm3_lower: f64,
    /// min of `thm3_upper - gap_dg_full`.
    pub thm3_upper: f64,
    /// min of `gap_pool_dg - gamma_min * epsilon_hat / 2`, and on
    /// constructed members the same with their required levels.
    pub margin_guarantee: f64,
    /// min of `r_dg(base) - r_dg(refined)` over refinement pairs.
    pub refinement_gain: f64,
    /// max absolute difference between the two disagreement routes.
    pub epsilon_routes: f64,
    /// max absolute difference between stored margins and margins
    /// re-derived from posteriors.
    pub margin_rederive: f64,
    /// max absolute pool-vs-dg gap on covariate-shift instances.
    pub covariate_gap: f64,
}

impl WorstSlacks {
    fn identity() -> Self {
        WorstSlacks {
            hierarchy_pool_dg: f64::INFINITY,
            hierarchy_dg_full: f64::INFINITY,
            thm1_lower: f64::INFINITY,
            thm1_upper: f64::INFINITY,
            thm3_lower: f64::INFINITY,
            thm3_upper: f64::INFINITY,
            margin_guarantee: f64::INFINITY,
            refinement_gain: f64::INFINITY,
            epsilon_routes: 0.0,
            margin_rederive: 0.0,
            covariate_gap: 0.0,
        }
    }

    fn absorb(&mut self, other: &WorstSlacks) {
        self.hierarchy_pool_dg = self.hierarchy_pool_dg.min(other.hierarchy_pool_dg);
        self.hierarchy_dg_full = self.hierarchy_dg_full.min(other.hierarchy_dg_full);
        self.thm1_lower = self.thm1_lower.min(other.thm1_lower);
        self.thm1_upper = self.thm1_upper.min(other.thm1_upper);
        self.thm3_lower = self.thm3_lower.min(other.thm3_lower);
        self.thm3_upper = self.thm3_upper.min(other.thm3_upper);
        self.margin_guarantee = self.margin_guarantee.min(other.margin_guarantee);
        self.refinement_gain = self.refinement_gain.min(other.refinement_gain);
        self.epsilon_routes = self.epsilon_routes.max(other.epsilon_routes);
        self.margin_rederive = self.margin_rederive.max(other.margin_rederive);
        self.covariate_gap = self.covariate_gap.max(other.covariate_gap);
    }

    /// `(display name, value, is_min_slack)` rows in a fixed order.
    pub fn rows(&self) -> Vec<(&'static str, f64, bool)> {
        vec![
            ("hierarchy pool-dg", self.hierarchy_pool_dg, true),
            ("hierarchy dg-full", self.hierarchy_dg_full, true),
            ("thm1 lower", self.thm1_lower, true),
            ("thm1 upper", self.thm1_upper, true),
            ("thm3 lower", self.thm3_lower, true),
            ("thm3 upper", self.thm3_upper, true),
            ("margin guarantee", self.margin_guarantee, true),
            ("refinement gain", self.refinement_gain, true),
            ("epsilon routes", self.epsilon_routes, false),
            ("margin rederive", self.margin_rederive, false),
            ("covariate gap", self.covariate_gap, false),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub instance: String,
    pub what: String,
    /// Spec-file dump of the instance, written to disk by the command
    /// layer rather than inlined into the summary.
    #[serde(skip)]
    pub spec_text: String,
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    /// Instances actually checked (a refinement task contributes two).
    pub instances: usize,
    /// Individual assertions evaluated.
    pub checks: usize,
    pub worst: WorstSlacks,
    pub violations: Vec<Violation>,
}

impl SuiteOutcome {
    fn empty() -> Self {
        SuiteOutcome {
            instances: 0,
            checks: 0,
            worst: WorstSlacks::identity(),
            violations: Vec::new(),
        }
    }

    fn merged(mut self, other: SuiteOutcome) -> SuiteOutcome {
        self.instances += other.instances;
        self.checks += other.checks;
        self.worst.absorb(&other.worst);
        self.violations.extend(other.violations);
        self
    }

    fn violation(&mut self, label: &str, what: String, f: &FactoredDistribution) {
        self.violations.push(Violation {
            instance: label.to_string(),
            what,
            spec_text: specfile::emit_spec(f),
        });
    }

    fn check(&mut self, label: &str, f: &FactoredDistribution, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violation(label, what(), f);
        }
    }

    fn slack_min(
        &mut self,
        label: &str,
        f: &FactoredDistribution,
        name: &str,
        slot: fn(&mut WorstSlacks) -> &mut f64,
        value: f64,
    ) {
        self.checks += 1;
        let slot = slot(&mut self.worst);
        *slot = slot.min(value);
        if value < -SLACK {
            self.violation(label, format!("{name}: slack {value:e} below -{SLACK:e}"), f);
        }
    }

    fn split_max(
        &mut self,
        label: &str,
        f: &FactoredDistribution,
        name: &str,
        slot: fn(&mut WorstSlacks) -> &mut f64,
        value: f64,
    ) {
        self.checks += 1;
        let slot = slot(&mut self.worst);
        *slot = slot.max(value);
        if value > SLACK {
            self.violation(label, format!("{name}: split {value:e} above {SLACK:e}"), f);
        }
    }
}

enum TaskKind {
    Random { seed: u64 },
    Covariate { seed: u64 },
    Member { gamma: f64, epsilon: f64, seed: u64 },
    Refine { seed: u64 },
    /// Two equally likely domains with opposite label posteriors; metadata
    /// reveals the domain. The canonical large-gap fixture.
    Drift,
    /// Two domains on disjoint feature ranges with deterministic labels;
    /// all exact risks are zero.
    Separated,
    CurveAgree,
    CurveDisagree,
}

struct Task {
    label: String,
    kind: TaskKind,
}

fn build_tasks(n: usize, master: u64) -> Vec<Task> {
    let mut tasks = Vec::with_capacity(n + 2 * (n / 5) + n / 10 + 4);
    for i in 0..n {
        tasks.push(Task {
            label: format!("random/{i:04}"),
            kind: TaskKind::Random {
                seed: seed::derive(master, i as u64),
            },
        });
    }
    for i in 0..n / 5 {
        tasks.push(Task {
            label: format!("covariate/{i:04}"),
            kind: TaskKind::Covariate {
                seed: seed::derive(master, 100_000 + i as u64),
            },
        });
    }
    let levels = [(0.8, 0.5), (0.5, 0.3), (0.3, 0.1)];
    for i in 0..n / 5 {
        let (gamma, epsilon) = levels[i % levels.len()];
        tasks.push(Task {
            label: format!("member/{i:04}"),
            kind: TaskKind::Member {
                gamma,
                epsilon,
                seed: seed::derive(master, 200_000 + i as u64),
            },
        });
    }
    for i in 0..n / 10 {
        tasks.push(Task {
            label: format!("refine/{i:04}"),
            kind: TaskKind::Refine {
                seed: seed::derive(master, 300_000 + i as u64),
            },
        });
    }
    tasks.push(Task {
        label: "fixed/drift".to_string(),
        kind: TaskKind::Drift,
    });
    tasks.push(Task {
        label: "fixed/separated".to_string(),
        kind: TaskKind::Separated,
    });
    tasks.push(Task {
        label: "fixed/curve-agree".to_string(),
        kind: TaskKind::CurveAgree,
    });
    tasks.push(Task {
        label: "fixed/curve-disagree".to_string(),
        kind: TaskKind::CurveDisagree,
    });
    tasks
}

fn drift_fixture() -> FactoredDistribution {
    let support = Support::new(
        vec![0.0],
        2,
        vec!["m1".into(), "m2".into()],
        vec!["d1".into(), "d2".into()],
    )
    .expect("fixture support is valid");
    FactoredDistribution::new(
        support,
        vec![0.5, 0.5],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![vec![0.1, 0.9], vec![0.9, 0.1]],
    )
    .expect("fixture factors are valid")
}

/// Smallest-index argmax and top-minus-second margin of a posterior.
fn top_two(post: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (k, &p) in post.iter().enumerate() {
        if p > post[best] {
            best = k;
        }
    }
    let mut top = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &p in post {
        if p > top {
            second = top;
            top = p;
        } else if p > second {
            second = p;
        }
    }
    (best, top - second)
}

fn inject_margin_fault(b: &mut BayesSolution) {
    if let Some(slot) = b.margin_xm.iter_mut().find(|slot| slot.is_some()) {
        *slot = Some(1.5);
    }
}

/// Compares every stored decision and margin against a fresh derivation
/// from posteriors. Decisions are only compared above the tie guard; the
/// margins are compared everywhere, which is what catches an injected
/// fault regardless of where it lands.
fn rederive(
    label: &str,
    f: &FactoredDistribution,
    j: &JointTable,
    b: &BayesSolution,
    out: &mut SuiteOutcome,
) {
    let s = j.support();
    let (nx, nm, nd) = (s.x_count(), s.m_count(), s.d_count());
    for x in 0..nx {
        let cond = Condition {
            x: Some(x),
            m: None,
            d: None,
        };
        match j.posterior(&cond) {
            Ok(post) => {
                let (best, margin) = top_two(&post);
                match b.f_pool[x] {
                    Some(stored) => {
                        if margin > TIE_GUARD {
                            out.check(label, f, stored == best, || {
                                format!("pool decision at x={x} is {stored}, posterior argmax is {best}")
                            });
                        }
                    }
                    None => out.check(label, f, false, || {
                        format!("positive-mass pool cell x={x} has no stored decision")
                    }),
                }
            }
            Err(_) => out.check(label, f, b.f_pool[x].is_none(), || {
                format!("zero-mass pool cell x={x} has a stored decision")
            }),
        }
    }
    let mut margin_cells = Vec::with_capacity(nx * nm + nx * nd);
    for x in 0..nx {
        for m in 0..nm {
            let cond = Condition {
                x: Some(x),
                m: Some(m),
                d: None,
            };
            let idx = x * nm + m;
            margin_cells.push((cond, b.f_dg[idx], b.margin_xm[idx], format!("(x={x}, m={m})")));
        }
    }
    for x in 0..nx {
        for d in 0..nd {
            let cond = Condition {
                x: Some(x),
                m: None,
                d: Some(d),
            };
            let idx = x * nd + d;
            margin_cells.push((cond, b.f_full[idx], b.margin_xd[idx], format!("(x={x}, d={d})")));
        }
    }
    for (cond, stored_label, stored_margin, cell) in margin_cells {
        match j.posterior(&cond) {
            Ok(post) => {
                let (best, margin) = top_two(&post);
                match (stored_label, stored_margin) {
                    (Some(stored), Some(stored_margin)) => {
                        out.split_max(
                            label,
                            f,
                            "margin rederive",
                            |w| &mut w.margin_rederive,
                            (stored_margin - margin).abs(),
                        );
                        if margin > TIE_GUARD {
                            out.check(label, f, stored == best, || {
                                format!("decision at {cell} is {stored}, posterior argmax is {best}")
                            });
                        }
                    }
                    _ => out.check(label, f, false, || {
                        format!("positive-mass cell {cell} is missing its decision or margin")
                    }),
                }
            }
            Err(_) => out.check(
                label,
                f,
                stored_label.is_none() && stored_margin.is_none(),
                || format!("zero-mass cell {cell} has a stored decision or margin"),
            ),
        }
    }
}

enum Extra {
    Plain,
    Covariate,
    Member { gamma: f64, epsilon: f64 },
    Drift,
    Separated,
    CurveAgree,
    CurveDisagree,
}

fn check_instance(
    label: &str,
    f: &FactoredDistribution,
    fault: Option<Fault>,
    extra: Extra,
    out: &mut SuiteOutcome,
) -> Option<RiskReport> {
    out.instances += 1;
    let j = f.joint();
    let mut b = bayes::solve_bayes(&j);
    if fault == Some(Fault::Margin) {
        inject_margin_fault(&mut b);
    }
    let report = match bayes::risks(&j, &b) {
        Ok(report) => report,
        Err(e) => {
            out.violation(label, format!("risk computation rejected the instance: {e}"), f);
            return None;
        }
    };

    for (name, value) in [
        ("r_pool", report.r_pool),
        ("r_dg", report.r_dg),
        ("r_full", report.r_full),
        ("thm1_lower", report.thm1_lower),
        ("thm1_upper", report.thm1_upper),
        ("thm3_lower", report.thm3_lower),
        ("thm3_upper", report.thm3_upper),
        ("epsilon_hat", report.epsilon_hat),
        ("gamma_min", report.gamma_min),
    ] {
        out.check(label, f, (-SLACK..=1.0 + SLACK).contains(&value), || {
            format!("{name} = {value:e} outside [0, 1]")
        });
    }

    out.slack_min(
        label,
        f,
        "hierarchy pool-dg",
        |w| &mut w.hierarchy_pool_dg,
        report.r_pool - report.r_dg,
    );
    out.slack_min(
        label,
        f,
        "hierarchy dg-full",
        |w| &mut w.hierarchy_dg_full,
        report.r_dg - report.r_full,
    );
    out.slack_min(
        label,
        f,
        "thm1 lower",
        |w| &mut w.thm1_lower,
        report.gap_pool_dg - report.thm1_lower,
    );
    out.slack_min(
        label,
        f,
        "thm1 upper",
        |w| &mut w.thm1_upper,
        report.thm1_upper - report.gap_pool_dg,
    );
    out.slack_min(
        label,
        f,
        "thm3 lower",
        |w| &mut w.thm3_lower,
        report.gap_dg_full - report.thm3_lower,
    );
    out.slack_min(
        label,
        f,
        "thm3 upper",
        |w| &mut w.thm3_upper,
        report.thm3_upper - report.gap_dg_full,
    );
    out.check(
        label,
        f,
        report.disagreement_prob_pool_dg == report.thm1_upper,
        || "disagreement probability (pool-dg) drifted from its bound field".to_string(),
    );
    out.check(
        label,
        f,
        report.disagreement_prob_full_dg == report.thm3_upper,
        || "disagreement probability (full-dg) drifted from its bound field".to_string(),
    );
    out.slack_min(
        label,
        f,
        "margin guarantee",
        |w| &mut w.margin_guarantee,
        report.gap_pool_dg - report.gamma_min * report.epsilon_hat / 2.0,
    );

    let (direct, identity) = bayes::epsilon_routes(&j, &b);
    out.split_max(
        label,
        f,
        "epsilon routes",
        |w| &mut w.epsilon_routes,
        (direct - identity).abs(),
    );
    out.check(label, f, direct == report.epsilon_hat, || {
        "reported disagreement measure is not the direct-route value".to_string()
    });

    let independence = j.check_conditional_independence(SLACK);
    out.check(label, f, independence.holds, || {
        format!(
            "conditional independence check failed (max violation {:e})",
            independence.max_violation
        )
    });

    rederive(label, f, &j, &b, out);

    match extra {
        Extra::Plain => {}
        Extra::Covariate => {
            match bayes::covariate_shift_certificate(&j, &b, SLACK) {
                Ok(certified) => out.check(label, f, certified, || {
                    "covariate-shift instance not certified: the metadata-informed optimum uses metadata".to_string()
                }),
                Err(e) => out.violation(label, format!("covariate-shift certificate rejected: {e}"), f),
            }
            out.split_max(
                label,
                f,
                "covariate gap",
                |w| &mut w.covariate_gap,
                report.gap_pool_dg.abs(),
            );
            out.check(label, f, report.thm1_upper == 0.0, || {
                format!(
                    "disagreement probability must be exactly zero under covariate shift, got {:e}",
                    report.thm1_upper
                )
            });
        }
        Extra::Member { gamma, epsilon } => match bayes::pd_class_certificate(&j, &b, gamma, epsilon) {
            Ok(c) => {
                out.check(label, f, c.member, || {
                    format!("constructed member fails the ({gamma}, {epsilon}) certificate")
                });
                out.slack_min(
                    label,
                    f,
                    "member guaranteed gap",
                    |w| &mut w.margin_guarantee,
                    c.observed_gap - c.guaranteed_gap,
                );
            }
            Err(e) => out.violation(label, format!("member certificate rejected: {e}"), f),
        },
        Extra::Drift => {
            match bayes::pd_class_certificate(&j, &b, 0.8, 0.5) {
                Ok(c) => out.check(label, f, c.member, || {
                    "drift fixture must certify at its own margin floor".to_string()
                }),
                Err(e) => out.violation(label, format!("member certificate rejected: {e}"), f),
            }
            match bayes::pd_class_certificate(&j, &b, 0.9, 0.5) {
                Ok(c) => out.check(label, f, !c.member, || {
                    "drift fixture must not certify above its margin floor".to_string()
                }),
                Err(e) => out.violation(label, format!("member certificate rejected: {e}"), f),
            }
        }
        Extra::Separated => {
            out.check(
                label,
                f,
                report.r_pool == 0.0 && report.r_dg == 0.0 && report.r_full == 0.0,
                || "deterministic labels must give exactly zero unrestricted risks".to_string(),
            );
            match bayes::covariate_shift_certificate(&j, &b, SLACK) {
                Ok(certified) => out.check(label, f, certified, || {
                    "separated fixture: pooled and metadata-informed optima must agree".to_string()
                }),
                Err(e) => out.violation(label, format!("covariate-shift certificate rejected: {e}"), f),
            }
        }
        Extra::CurveAgree => {
            out.check(label, f, report.thm1_upper == 0.0, || {
                format!(
                    "aligned curves must never disagree, got probability {:e}",
                    report.thm1_upper
                )
            });
            out.check(label, f, report.gap_pool_dg.abs() <= SLACK, || {
                format!("aligned curves must have zero gap, got {:e}", report.gap_pool_dg)
            });
        }
        Extra::CurveDisagree => {
            out.check(label, f, report.gap_pool_dg > 0.01, || {
                format!(
                    "shifted curves must open a visible gap, got {:e}",
                    report.gap_pool_dg
                )
            });
            out.check(label, f, report.thm1_lower > 0.0, || {
                "shifted curves must have a positive lower bound".to_string()
            });
        }
    }
    Some(report)
}

fn eval(task: &Task, fault: Option<Fault>) -> SuiteOutcome {
    let mut out = SuiteOutcome::empty();
    let label = task.label.as_str();
    match &task.kind {
        TaskKind::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let sizes = RandomSizes {
                x_count: rng.gen_range(1..=8),
                y_count: rng.gen_range(2..=4),
                m_count: rng.gen_range(1..=4),
                d_count: rng.gen_range(1..=6),
            };
            match generators::make_random(sizes, rng.gen()) {
                Ok(f) => {
                    check_instance(label, &f, fault, Extra::Plain, &mut out);
                }
                Err(e) => out.violations.push(generator_violation(label, e)),
            }
        }
        TaskKind::Covariate { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let sizes = RandomSizes {
                x_count: rng.gen_range(2..=8),
                y_count: rng.gen_range(2..=4),
                m_count: rng.gen_range(1..=4),
                d_count: rng.gen_range(2..=6),
            };
            match generators::make_covariate_shift(sizes, rng.gen()) {
                Ok(f) => {
                    check_instance(label, &f, fault, Extra::Covariate, &mut out);
                }
                Err(e) => out.violations.push(generator_violation(label, e)),
            }
        }
        TaskKind::Member {
            gamma,
            epsilon,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            // Disagreement 0.5 is infeasible with two classes when the
            // domains cannot split into equal halves (three or five of
            // them); three classes keep every drawn size feasible.
            let y_lo = if *epsilon > 0.45 { 3 } else { 2 };
            let sizes = PdSizes {
                x_count: rng.gen_range(1..=6),
                y_count: rng.gen_range(y_lo..=4),
                domain_count: rng.gen_range(2..=6),
            };
            match generators::make_pd_member(*gamma, *epsilon, sizes, rng.gen()) {
                Ok(f) => {
                    check_instance(
                        label,
                        &f,
                        fault,
                        Extra::Member {
                            gamma: *gamma,
                            epsilon: *epsilon,
                        },
                        &mut out,
                    );
                }
                Err(e) => out.violations.push(generator_violation(label, e)),
            }
        }
        TaskKind::Refine { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let sizes = RandomSizes {
                x_count: rng.gen_range(1..=6),
                y_count: rng.gen_range(2..=3),
                m_count: rng.gen_range(1..=3),
                d_count: rng.gen_range(1..=4),
            };
            let base = match generators::make_random(sizes, rng.gen()) {
                Ok(f) => f,
                Err(e) => {
                    out.violations.push(generator_violation(label, e));
                    return out;
                }
            };
            let m_index = rng.gen_range(0..sizes.m_count);
            let parts = rng.gen_range(2..=3);
            let raw: Vec<f64> = (0..parts).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let split: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let refined = match generators::refine_metadata(&base, m_index, &split) {
                Ok(f) => f,
                Err(e) => {
                    out.violations.push(generator_violation(label, e));
                    return out;
                }
            };
            let base_label = format!("{label}/base");
            let fine_label = format!("{label}/fine");
            let base_report = check_instance(&base_label, &base, fault, Extra::Plain, &mut out);
            let fine_report = check_instance(&fine_label, &refined, fault, Extra::Plain, &mut out);
            if let (Some(rb), Some(rf)) = (base_report, fine_report) {
                out.slack_min(
                    label,
                    &refined,
                    "refinement gain",
                    |w| &mut w.refinement_gain,
                    rb.r_dg - rf.r_dg,
                );
                out.check(label, &refined, (rb.r_pool - rf.r_pool).abs() <= SLACK, || {
                    "pooled risk changed under metadata refinement".to_string()
                });
                out.check(label, &refined, (rb.r_full - rf.r_full).abs() <= SLACK, || {
                    "full-information risk changed under metadata refinement".to_string()
                });
            }
        }
        TaskKind::Drift => {
            check_instance(label, &drift_fixture(), fault, Extra::Drift, &mut out);
        }
        TaskKind::Separated => {
            match generators::make_example1(generators::Example1Config { p: 0.7, grid_n: 60 }) {
                Ok((f, _)) => {
                    check_instance(label, &f, fault, Extra::Separated, &mut out);
                }
                Err(e) => out.violations.push(generator_violation(label, e)),
            }
        }
        TaskKind::CurveAgree => {
            match generators::make_figure1(&Figure1Config::for_scenario(Figure1Scenario::Agree)) {
                Ok(output) => {
                    check_instance(label, &output.distribution, fault, Extra::CurveAgree, &mut out);
                }
                Err(e) => out.violations.push(generator_violation(label, e)),
            }
        }
        TaskKind::CurveDisagree => {
            match generators::make_figure1(&Figure1Config::for_scenario(Figure1Scenario::Disagree)) {
                Ok(output) => {
                    check_instance(
                        label,
                        &output.distribution,
                        fault,
                        Extra::CurveDisagree,
                        &mut out,
                    );
                }
                Err(e) => out.violations.push(generator_violation(label, e)),
            }
        }
    }
    out
}

fn generator_violation(label: &str, e: generators::GeneratorError) -> Violation {
    Violation {
        instance: label.to_string(),
        what: format!("generator failed: {e}"),
        spec_text: String::new(),
    }
}

/// Runs the whole battery: `n` random instances plus `n/5` covariate-shift,
/// `n/5` member, `n/10` refinement-pair, and four fixed tasks. Fully
/// deterministic in `master_seed` regardless of thread count: per-task
/// seeds are derived up front and the merge is order-insensitive.
pub fn run_random_suite(n: usize, master_seed: u64, fault: Option<Fault>) -> SuiteOutcome {
    let tasks = build_tasks(n, master_seed);
    let mut outcome = tasks
        .par_iter()
        .map(|task| eval(task, fault))
        .reduce(SuiteOutcome::empty, SuiteOutcome::merged);
    outcome
        .violations
        .sort_by(|a, b| (&a.instance, &a.what).cmp(&(&b.instance, &b.what)));
    outcome
}
