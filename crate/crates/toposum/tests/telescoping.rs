//! Exact agreement between the telescoped partial sums and the direct
//! vertex walks, over randomly drawn climbing roots of both discriminant
//! signs plus a fixed set of deeper trees.

use proptest::prelude::*;
use toposum::{
    direct_efg_partial, direct_rst_partial, telescoped_efg_partial, telescoped_rst_partial,
    Int, OrientedEdge, DEFAULT_NODE_BUDGET,
};

fn climbing_root(min_h: i64) -> impl Strategy<Value = (i64, i64, i64)> {
    (1i64..=9, min_h..=22, 1i64..=9).prop_filter(
        "nonzero discriminant within the sampling band",
        |&(p, h, q)| {
            let d = h * h - 4 * p * q;
            d != 0 && d.abs() <= 500
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn telescoped_region_sums_equal_the_direct_walk(
        (p, h, q) in climbing_root(0),
        n in 1u32..=7,
    ) {
        let root = OrientedEdge::from_i64(p, h, q);
        let d = root.discriminant();
        let telescoped = telescoped_rst_partial(&root, n, &d, DEFAULT_NODE_BUDGET).unwrap();
        let direct = direct_rst_partial(&root, n, DEFAULT_NODE_BUDGET).unwrap();
        prop_assert_eq!(telescoped, direct);
    }

    #[test]
    fn telescoped_edge_sums_equal_the_direct_walk(
        (p, h, q) in climbing_root(1),
        n in 1u32..=7,
    ) {
        let root = OrientedEdge::from_i64(p, h, q);
        let d = root.discriminant();
        let telescoped = telescoped_efg_partial(&root, n, &d, DEFAULT_NODE_BUDGET).unwrap();
        let direct = direct_efg_partial(&root, n, DEFAULT_NODE_BUDGET).unwrap();
        prop_assert_eq!(telescoped, direct);
    }
}

#[test]
fn deep_trees_agree_on_both_sides_of_zero() {
    // Three definite and three indefinite roots, ten levels each.
    let roots = [
        (1, 1, 1),
        (1, 2, 2),
        (2, 1, 3),
        (1, 3, 1),
        (1, 5, 2),
        (3, 7, 1),
    ];
    for (p, h, q) in roots {
        let root = OrientedEdge::from_i64(p, h, q);
        let d = root.discriminant();
        assert_eq!(
            telescoped_rst_partial(&root, 10, &d, DEFAULT_NODE_BUDGET).unwrap(),
            direct_rst_partial(&root, 10, DEFAULT_NODE_BUDGET).unwrap(),
            "region series disagree at ({p},{h},{q})"
        );
        assert_eq!(
            telescoped_efg_partial(&root, 10, &d, DEFAULT_NODE_BUDGET).unwrap(),
            direct_efg_partial(&root, 10, DEFAULT_NODE_BUDGET).unwrap(),
            "edge series disagree at ({p},{h},{q})"
        );
    }
}

#[test]
fn a_zero_label_root_feeds_the_region_series_only() {
    let root = OrientedEdge::from_i64(1, 0, 1);
    let d = Int::from(-4);
    assert_eq!(
        telescoped_rst_partial(&root, 9, &d, DEFAULT_NODE_BUDGET).unwrap(),
        direct_rst_partial(&root, 9, DEFAULT_NODE_BUDGET).unwrap()
    );
    // The edge series divides by the incoming label, so this root refuses.
    assert!(direct_efg_partial(&root, 9, DEFAULT_NODE_BUDGET).is_err());
}
