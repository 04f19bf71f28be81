use prepsim_cli::report::{
    Agreement, Bound, CheckReport, InstanceReport, Measurement, PairwiseDistance, PipelineReport, Probabilities,
    RunReport,
};
use prepsim_core::Tolerances;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3f64..1e3,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(f64::EPSILON),
        Just(1e-300),
        Just(f64::MAX),
    ]
}

fn measurement() -> impl Strategy<Value = Measurement> {
    ("[a-z_]{1,12}", proptest::option::of(finite()), 0.0f64..1.0, any::<bool>()).prop_map(|(q, m, t, above)| {
        Measurement::new(q, m, t, if above { Bound::Above } else { Bound::AtMost })
    })
}

fn instance() -> impl Strategy<Value = InstanceReport> {
    (
        "[a-z0-9/=]{1,16}",
        proptest::option::of(any::<u64>()),
        (1usize..9, 1usize..9),
        (finite(), finite(), proptest::option::of(finite())),
        proptest::collection::vec(measurement(), 0..3),
        proptest::collection::vec(proptest::collection::vec((finite(), finite()), 2), 0..3),
        proptest::collection::vec(measurement(), 0..4),
    )
        .prop_map(|(label, seed, (d1, d2), (t, c, r), expected, rows, ms)| InstanceReport {
            label,
            seed,
            dims: [d1, d2],
            probabilities: Probabilities {
                trigger: t,
                cumulative: c,
                region: r,
                twin_preparator: r,
                twin_object: None,
            },
            expected,
            pipelines: vec![PipelineReport {
                name: "first_kind".into(),
                final_state: Some(rows.into_iter().map(|row| row.into_iter().map(|(a, b)| [a, b]).collect()).collect()),
                event_probability: Some(t),
                error: None,
            }],
            agreement: Some(Agreement {
                pairwise: vec![PairwiseDistance {
                    a: "first_kind".into(),
                    b: "second_kind".into(),
                    trace_distance: c.abs(),
                }],
                max_distance: Some(c.abs()),
                tolerance: 1e-9,
                passed: c.abs() <= 1e-9,
            }),
            checks: vec![CheckReport::from_measurements("raio", ms, Some("note \"quoted\"\n".into()))],
        })
}

proptest! {
    #[test]
    fn reports_survive_serialization(instances in proptest::collection::vec(instance(), 0..4), d in 0.0f64..100.0) {
        let report = RunReport::new(
            "scenario".into(),
            "random".into(),
            Some(7),
            &Tolerances::default(),
            vec!["first_kind".into()],
            vec!["raio".into()],
            instances,
            d,
        );
        let back: RunReport = serde_json::from_str(&report.to_json()).unwrap();
        prop_assert_eq!(&back, &report);
        prop_assert!(back.instances.iter().flat_map(|i| &i.checks).flat_map(|c| &c.measurements).all(|m| m.is_consistent()));
    }
}
