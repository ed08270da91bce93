//! Property tests of the exact layer over 1000 generated instances.

use proptest::prelude::*;

use vai_core::selfcheck::{check_instance, Instance};

fn instance() -> impl Strategy<Value = Instance> {
    prop_oneof![Just(3usize), Just(4usize)].prop_flat_map(|n| {
        let d = n * n - 1;
        let tri = n * (n - 1) / 2;
        (
            prop::collection::vec(-3i64..=3, tri)
                .prop_filter("nonzero", |v| v.iter().any(|c| *c != 0)),
            prop::collection::vec(-3i64..=3, n - 1),
            prop::collection::vec(-2i64..=2, tri),
            prop::collection::vec(-2i64..=2, tri),
            prop::collection::vec(
                (0..d, 0..d, prop::sample::select(vec![-2i64, -1, 1, 2])),
                4..10,
            ),
            Just((0..d).collect::<Vec<usize>>()).prop_shuffle(),
            prop::collection::vec(prop::sample::select(vec![1i64, -1, 2, 3]), d),
            prop::collection::vec(-3i64..=3, 3 * d),
        )
            .prop_map(
                move |(nilpotent, diagonal, lower, upper, shears, permutation, scales, probe)| {
                    Instance {
                        n,
                        nilpotent,
                        diagonal,
                        lower,
                        upper,
                        shears,
                        permutation,
                        scales,
                        probe,
                    }
                },
            )
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn exact_layer_properties(inst in instance()) {
        check_instance(&inst).map_err(TestCaseError::fail)?;
    }
}
