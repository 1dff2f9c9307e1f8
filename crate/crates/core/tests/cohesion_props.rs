use proptest::prelude::*;
use refscout_core::java::parse_compilation_unit;
use refscout_core::metrics::compute_class_metrics;
use refscout_testkit::cohesion::{cohesion_class, pair_cohesion};

fn class_shape() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
    (1usize..=6).prop_flat_map(|fields| {
        (Just(fields), prop::collection::vec(prop::collection::btree_set(0..fields, 0..=fields), 0..=8))
            .prop_map(|(f, sets)| (f, sets.into_iter().map(|s| s.into_iter().collect()).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tcc_lcc_match_pair_enumeration((fields, access) in class_shape()) {
        let src = cohesion_class(fields, &access);
        let model = parse_compilation_unit(&src, "Cohesive.java").unwrap();
        let metrics = compute_class_metrics(&model.classes[0]);
        let (tcc, lcc, lcom) = pair_cohesion(&access);
        prop_assert_eq!(metrics.tcc, tcc);
        prop_assert_eq!(metrics.lcc, lcc);
        prop_assert_eq!(metrics.lcom, lcom);
        prop_assert!(metrics.tcc <= metrics.lcc);
    }
}

#[test]
fn oracle_examples() {
    // Chain m0-m1-m2 through f0 and f1; m3 isolated.
    let access = vec![vec![0], vec![0, 1], vec![1], vec![2]];
    let (tcc, lcc, lcom) = pair_cohesion(&access);
    assert_eq!(tcc, 2.0 / 6.0);
    assert_eq!(lcc, 3.0 / 6.0);
    assert_eq!(lcom, 2);
    assert_eq!(pair_cohesion(&[vec![0]]), (0.0, 0.0, 0));
}
