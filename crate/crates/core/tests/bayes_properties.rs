//! Structural invariants of the exact solver, exercised over randomized
//! instances: the information hierarchy of the three risks, the two-sided
//! gap certificates, the dual-route disagreement measure, and the margin
//! guarantee. Factored instances get the full set; dense tables with
//! zero-mass cells get the subset that does not rely on metadata being a
//! coarsening of the domain.

use dg_risklab_core::bayes::{self, RiskReport};
use dg_risklab_core::generators::{
    make_covariate_shift, make_pd_member, make_random, refine_metadata, PdSizes, RandomSizes,
};
use dg_risklab_core::{FactoredDistribution, JointTable, Support};
use proptest::prelude::*;

const SLACK: f64 = 1e-12;

fn report_of(j: &JointTable) -> RiskReport {
    let b = bayes::solve_bayes(j);
    bayes::risks(j, &b).expect("dual-route disagreement must agree")
}

fn assert_common_invariants(r: &RiskReport) {
    // Conditioning on strictly more information never hurts.
    assert!(r.r_pool >= r.r_dg - SLACK, "pool {} < dg {}", r.r_pool, r.r_dg);
    // Gap certificates bracket the gap they certify.
    assert!(r.thm1_lower <= r.gap_pool_dg + SLACK);
    assert!(r.gap_pool_dg <= r.thm1_upper + SLACK);
    assert!(r.thm1_upper <= r.disagreement_prob_pool_dg + SLACK);
    // Margin floor and disagreement level imply a gap guarantee.
    assert!(
        r.gap_pool_dg >= r.gamma_min * r.epsilon_hat / 2.0 - SLACK,
        "gap {} below floor {} * {} / 2",
        r.gap_pool_dg,
        r.gamma_min,
        r.epsilon_hat
    );
    for value in [r.r_pool, r.r_dg, r.r_full, r.epsilon_hat, r.gamma_min] {
        assert!((-SLACK..=1.0 + SLACK).contains(&value));
    }
}

fn assert_factored_invariants(r: &RiskReport) {
    assert_common_invariants(r);
    // Metadata is a coarsening of the domain, so the domain-informed rule
    // is at least as good and the finer sandwich applies.
    assert!(r.r_dg >= r.r_full - SLACK, "dg {} < full {}", r.r_dg, r.r_full);
    assert!(r.thm3_lower <= r.gap_dg_full + SLACK);
    assert!(r.gap_dg_full <= r.thm3_upper + SLACK);
}

fn random_sizes() -> impl Strategy<Value = RandomSizes> {
    (1usize..=5, 2usize..=4, 1usize..=4, 1usize..=5).prop_map(|(x, y, m, d)| RandomSizes {
        x_count: x,
        y_count: y,
        m_count: m,
        d_count: d,
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn factored_instances_satisfy_all_invariants(sizes in random_sizes(), seed in any::<u64>()) {
        let f = make_random(sizes, seed).unwrap();
        let r = report_of(&f.joint());
        assert_factored_invariants(&r);
    }

    #[test]
    fn covariate_shift_instances_have_no_pool_dg_disagreement(
        sizes in random_sizes(),
        seed in any::<u64>(),
    ) {
        let f = make_covariate_shift(sizes, seed).unwrap();
        let j = f.joint();
        let b = bayes::solve_bayes(&j);
        let r = bayes::risks(&j, &b).unwrap();
        assert_factored_invariants(&r);
        // Shared label posteriors: the pooled and metadata-informed rules
        // coincide on every positive-mass cell, so the upper certificate
        // is an empty sum and the gap vanishes.
        assert_eq!(r.thm1_upper, 0.0);
        assert!(r.gap_pool_dg.abs() <= SLACK);
        assert!(bayes::covariate_shift_certificate(&j, &b, SLACK).unwrap());
    }

    #[test]
    fn certified_members_honor_the_gap_guarantee(
        seed in any::<u64>(),
        gamma_ix in 0usize..3,
        epsilon_ix in 0usize..3,
    ) {
        let gamma = [0.3, 0.6, 0.8][gamma_ix];
        let epsilon = [0.2, 0.4, 0.5][epsilon_ix];
        let sizes = PdSizes { x_count: 4, y_count: 3, domain_count: 3 };
        let f = make_pd_member(gamma, epsilon, sizes, seed).unwrap();
        let j = f.joint();
        let b = bayes::solve_bayes(&j);
        let r = bayes::risks(&j, &b).unwrap();
        assert_factored_invariants(&r);
        let cert = bayes::pd_class_certificate(&j, &b, gamma, epsilon).unwrap();
        assert!(cert.member);
        assert!(cert.observed_gap >= gamma * epsilon / 2.0 - SLACK);
    }

    #[test]
    fn metadata_refinement_never_increases_the_dg_risk(
        sizes in random_sizes(),
        seed in any::<u64>(),
        symbol in 0usize..4,
        lambda in 0.05f64..0.95,
    ) {
        let f = make_random(sizes, seed).unwrap();
        let symbol = symbol % sizes.m_count;
        let refined = refine_metadata(&f, symbol, &[lambda, 1.0 - lambda]).unwrap();
        let base = report_of(&f.joint());
        let fine = report_of(&refined.joint());
        // Splitting one symbol in two only adds information.
        assert!(fine.r_dg <= base.r_dg + SLACK);
        // The pooled and fully informed rules never see metadata.
        assert!((fine.r_pool - base.r_pool).abs() <= SLACK);
        assert!((fine.r_full - base.r_full).abs() <= SLACK);
    }

    #[test]
    fn dense_tables_with_dead_cells_keep_the_marginal_invariants(
        (sizes, weights) in (1usize..=4, 2usize..=3, 1usize..=3, 1usize..=3)
            .prop_flat_map(|(nx, ny, nm, nd)| {
                let n = nx * ny * nm * nd;
                (
                    Just((nx, ny, nm, nd)),
                    proptest::collection::vec(
                        prop_oneof![2 => Just(0.0), 3 => 0.05f64..1.0],
                        n,
                    ),
                )
            }),
    ) {
        let (nx, ny, nm, nd) = sizes;
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let support = Support::new(
            (0..nx).map(|i| i as f64).collect(),
            ny,
            (1..=nm).map(|i| format!("m{i}")).collect(),
            (1..=nd).map(|i| format!("d{i}")).collect(),
        )
        .unwrap();
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let j = JointTable::from_dense(support, p).unwrap();
        let r = report_of(&j);
        // Without the factored structure the metadata can out-inform the
        // domain, so only the pool-side invariants are claimed.
        assert_common_invariants(&r);
    }
}

#[test]
fn deterministic_instances_have_zero_risk_everywhere() {
    // One positive label per feature point, identical across domains.
    let support = Support::new(
        vec![0.0, 1.0],
        2,
        vec!["m1".into(), "m2".into()],
        vec!["d1".into(), "d2".into()],
    )
    .unwrap();
    let table = vec![0.5, 0.0, 0.0, 0.5];
    let f = FactoredDistribution::new(
        support,
        vec![0.5, 0.5],
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        vec![table.clone(), table],
    )
    .unwrap();
    let r = report_of(&f.joint());
    assert_eq!(r.r_pool, 0.0);
    assert_eq!(r.r_dg, 0.0);
    assert_eq!(r.r_full, 0.0);
    assert_eq!(r.thm1_upper, 0.0);
    assert_eq!(r.epsilon_hat, 0.0);
    assert_eq!(r.gamma_min, 1.0);
}
