//! Checks the named instance families against their closed-form reference
//! values and advertised guarantees.

use dg_risklab_core::bayes;
use dg_risklab_core::erm::threshold::optimal_threshold_risks;
use dg_risklab_core::generators::{
    make_example1, make_figure1, make_pd_member, Example1Config, Figure1Config, Figure1Scenario,
    GeneratorError, PdSizes, EXAMPLE1_RANGE,
};

#[test]
fn example1_threshold_optima_track_the_analytic_values() {
    for p in [0.5, 0.6, 0.7, 0.9] {
        for grid_n in [10usize, 50, 200] {
            let (f, analytic) = make_example1(Example1Config { p, grid_n }).unwrap();
            let j = f.joint();
            let optima = optimal_threshold_risks(&j).unwrap();
            // Per-metadata thresholds separate each range exactly.
            assert_eq!(optima.dg_risk, 0.0, "p={p} grid_n={grid_n}");
            // A single threshold pays for one of the two ranges; the grid
            // discretization moves the optimum by at most one cell of mass.
            let cell = 1.0 / (2.0 * grid_n as f64);
            assert!(
                (optima.pool_risk - analytic.pool_restricted).abs() <= cell,
                "p={p} grid_n={grid_n}: {} vs {}",
                optima.pool_risk,
                analytic.pool_restricted,
            );
            // Unrestricted rules are perfect: the ranges do not overlap.
            let b = bayes::solve_bayes(&j);
            let report = bayes::risks(&j, &b).unwrap();
            assert_eq!(report.r_pool, 0.0);
            assert_eq!(report.r_dg, 0.0);
        }
    }
}

#[test]
fn example1_range_covers_both_grids() {
    let (f, _) = make_example1(Example1Config { p: 0.7, grid_n: 25 }).unwrap();
    let (lo, hi) = EXAMPLE1_RANGE;
    for &x in f.support().x_values() {
        assert!((lo..=hi).contains(&x));
    }
}

#[test]
fn figure1_agree_scenario_has_no_gap() {
    let out = make_figure1(&Figure1Config::for_scenario(Figure1Scenario::Agree)).unwrap();
    let j = out.distribution.joint();
    let b = bayes::solve_bayes(&j);
    let report = bayes::risks(&j, &b).unwrap();
    // Both posterior curves cross 1/2 at the same point, so the pooled
    // rule already matches the metadata-informed one everywhere.
    assert_eq!(report.thm1_upper, 0.0);
    assert!(report.gap_pool_dg.abs() <= 1e-12);
}

#[test]
fn figure1_disagree_scenario_has_a_bracketed_gap() {
    let out = make_figure1(&Figure1Config::for_scenario(Figure1Scenario::Disagree)).unwrap();
    let j = out.distribution.joint();
    let b = bayes::solve_bayes(&j);
    let report = bayes::risks(&j, &b).unwrap();
    assert!(report.gap_pool_dg > 0.01, "gap {}", report.gap_pool_dg);
    assert!(report.thm1_lower <= report.gap_pool_dg + 1e-12);
    assert!(report.gap_pool_dg <= report.thm1_upper + 1e-12);
    assert!(report.thm1_lower > 0.0);
}

#[test]
fn figure1_curves_mix_with_equal_weights() {
    let out = make_figure1(&Figure1Config::for_scenario(Figure1Scenario::Disagree)).unwrap();
    assert_eq!(out.curves.len(), 121);
    for row in &out.curves {
        assert_eq!(row.eta_pooled, (row.eta1 + row.eta2) / 2.0);
        assert!((0.0..=1.0).contains(&row.eta1));
        assert!((0.0..=1.0).contains(&row.eta2));
    }
    // The default grid is symmetric, so the midpoint sits at zero and the
    // shifted curves mix to exactly one half there.
    let mid = &out.curves[60];
    assert_eq!(mid.x, 0.0);
    assert!((mid.eta_pooled - 0.5).abs() <= 1e-12);
}

#[test]
fn pd_member_construction_is_certified_at_requested_levels() {
    let sizes = PdSizes {
        x_count: 4,
        y_count: 3,
        domain_count: 3,
    };
    for (gamma, epsilon) in [(0.3, 0.2), (0.6, 0.4), (0.8, 0.5)] {
        for seed in 0..5u64 {
            let f = make_pd_member(gamma, epsilon, sizes, seed).unwrap();
            let j = f.joint();
            let b = bayes::solve_bayes(&j);
            let cert = bayes::pd_class_certificate(&j, &b, gamma, epsilon).unwrap();
            assert!(cert.member, "gamma={gamma} epsilon={epsilon} seed={seed}");
            assert!(cert.observed_gap >= gamma * epsilon / 2.0 - 1e-12);
        }
    }
}

#[test]
fn pd_member_reports_infeasible_targets() {
    // Two domains cap the disagreement measure at 1/2.
    let two = PdSizes {
        x_count: 3,
        y_count: 2,
        domain_count: 2,
    };
    assert!(matches!(
        make_pd_member(0.5, 0.7, two, 0),
        Err(GeneratorError::Infeasible { .. })
    ));
    // A single domain cannot disagree with itself at all.
    let one = PdSizes {
        x_count: 3,
        y_count: 2,
        domain_count: 1,
    };
    assert!(matches!(
        make_pd_member(0.5, 0.1, one, 0),
        Err(GeneratorError::Infeasible { .. })
    ));
}
