//! Consistency of the dense joint view: marginals, posteriors, the
//! factorization check, and the plain-text round trip.

use dg_risklab_core::distribution::QueryError;
use dg_risklab_core::generators::{make_random, RandomSizes};
use dg_risklab_core::specfile::{emit_spec, parse_spec};
use dg_risklab_core::{Axis, Condition, JointTable, Support};
use proptest::prelude::*;

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
    fn marginals_conserve_mass(sizes in random_sizes(), seed in any::<u64>()) {
        let j = make_random(sizes, seed).unwrap().joint();
        let total = j.total_mass();
        assert!((total - 1.0).abs() <= 1e-12);
        for axes in [
            vec![Axis::X],
            vec![Axis::Y],
            vec![Axis::M],
            vec![Axis::D],
            vec![Axis::X, Axis::Y],
            vec![Axis::X, Axis::M],
            vec![Axis::X, Axis::Y, Axis::M, Axis::D],
        ] {
            let marginal = j.marginal(&axes).unwrap();
            assert!((marginal.total() - total).abs() <= 1e-12);
        }
    }

    #[test]
    fn marginal_of_marginal_matches_direct(sizes in random_sizes(), seed in any::<u64>()) {
        let j = make_random(sizes, seed).unwrap().joint();
        let wide = j.marginal(&[Axis::X, Axis::Y, Axis::M]).unwrap();
        let narrowed = wide.marginal(&[Axis::X, Axis::M]).unwrap();
        let direct = j.marginal(&[Axis::X, Axis::M]).unwrap();
        for x in 0..sizes.x_count {
            for m in 0..sizes.m_count {
                let a = narrowed.value(&[x, m]);
                let b = direct.value(&[x, m]);
                assert!((a - b).abs() <= 1e-12, "cell ({x}, {m}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn posteriors_are_normalized_mass_ratios(sizes in random_sizes(), seed in any::<u64>()) {
        let j = make_random(sizes, seed).unwrap().joint();
        for x in 0..sizes.x_count {
            for m in 0..sizes.m_count {
                let condition = Condition { x: Some(x), m: Some(m), d: None };
                let posterior = j.posterior(&condition).unwrap();
                let sum: f64 = posterior.iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12);
                let mut cell_mass = 0.0;
                for y in 0..sizes.y_count {
                    for d in 0..sizes.d_count {
                        cell_mass += j.mass(x, y, m, d);
                    }
                }
                for (y, &p) in posterior.iter().enumerate() {
                    let mut mass_y = 0.0;
                    for d in 0..sizes.d_count {
                        mass_y += j.mass(x, y, m, d);
                    }
                    assert!((p - mass_y / cell_mass).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn factored_construction_passes_the_independence_check(
        sizes in random_sizes(),
        seed in any::<u64>(),
    ) {
        let j = make_random(sizes, seed).unwrap().joint();
        let report = j.check_conditional_independence(1e-12);
        assert!(report.holds, "max violation {}", report.max_violation);
    }

    #[test]
    fn text_round_trip_is_bit_exact(sizes in random_sizes(), seed in any::<u64>()) {
        let f = make_random(sizes, seed).unwrap();
        let text = emit_spec(&f);
        let g = parse_spec(&text).unwrap();
        assert_eq!(f, g);
        assert_eq!(f.fingerprint(), g.fingerprint());
        assert_eq!(text, emit_spec(&g));
    }

    #[test]
    fn fingerprints_separate_different_seeds(sizes in random_sizes(), seed in any::<u64>()) {
        let a = make_random(sizes, seed).unwrap();
        let b = make_random(sizes, seed.wrapping_add(1)).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}

#[test]
fn dependent_table_fails_the_independence_check() {
    // Metadata decides the label inside a single domain: P(x,y|m,d)
    // cannot equal P(x,y|d).
    let support = Support::new(
        vec![0.0],
        2,
        vec!["m1".into(), "m2".into()],
        vec!["d1".into()],
    )
    .unwrap();
    let p = vec![
        0.5, // (x0, y0, m1, d1)
        0.0, // (x0, y0, m2, d1)
        0.0, // (x0, y1, m1, d1)
        0.5, // (x0, y1, m2, d1)
    ];
    let j = JointTable::from_dense(support, p).unwrap();
    let report = j.check_conditional_independence(1e-12);
    assert!(!report.holds);
    assert!(report.max_violation > 0.4);
}

#[test]
fn zero_mass_condition_is_a_reported_error() {
    let support = Support::new(
        vec![0.0, 1.0],
        2,
        vec!["m1".into(), "m2".into()],
        vec!["d1".into()],
    )
    .unwrap();
    // All mass on x = 0, metadata m1.
    let mut p = vec![0.0; 8];
    p[0] = 0.5; // (x0, y0, m1, d1)
    p[2] = 0.5; // (x0, y1, m1, d1)
    let j = JointTable::from_dense(support, p).unwrap();
    let err = j
        .posterior(&Condition { x: Some(1), m: Some(1), d: None })
        .unwrap_err();
    match err {
        QueryError::ZeroProbabilityEvent { event } => {
            assert!(event.contains("X=1"), "{event}");
            assert!(event.contains("M=m2"), "{event}");
        }
        other => panic!("unexpected error {other:?}"),
    }
}
