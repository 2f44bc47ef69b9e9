mod common;

use common::{check_tree, gaussian, mixed, uniform};
use covqt::codec::{decode_tree, encode_tree};
use covqt::point::points_from_rows;
use covqt::{CovTree, DimRule, TreeConfig};

#[test]
fn invariants_hold_on_varied_data() {
    for seed in 0..12 {
        let d = 2 + (seed as usize % 4);
        for pts in [uniform(500, d, seed), gaussian(500, d, seed), mixed(400, d, seed)] {
            for rule in [DimRule::Spacing, DimRule::Ratio(0.3)] {
                let config = TreeConfig { dim_rule: rule, ..TreeConfig::default() };
                let tree = CovTree::build(pts.clone(), config).unwrap();
                check_tree(&tree).unwrap();
            }
        }
    }
}

#[test]
fn leaf_capacity_and_depth_limits() {
    let config = TreeConfig { leaf_capacity: 16, max_depth: 5, ..TreeConfig::default() };
    let tree = CovTree::build(uniform(3000, 3, 9), config).unwrap();
    check_tree(&tree).unwrap();
    assert!(tree.census().max_depth <= 5);
    for leaf in tree.leaves() {
        let node = tree.node(leaf);
        assert!(node.points.len() <= 16 || node.depth == 5);
    }
}

#[test]
fn every_stored_point_routes_to_its_leaf() {
    let tree = CovTree::build(gaussian(2000, 2, 4), TreeConfig::default()).unwrap();
    for (i, p) in tree.points().iter().enumerate() {
        let path = tree.locate(&p.coords);
        let leaf = *path.last().unwrap();
        assert!(tree.node(leaf).points.contains(&i), "point {i}");
        assert_eq!(path[0], 0);
        for w in path.windows(2) {
            assert_eq!(tree.node(w[1]).depth, tree.node(w[0]).depth + 1);
        }
    }
}

#[test]
fn builds_are_identical() {
    let a = CovTree::build(mixed(3000, 4, 1), TreeConfig::default()).unwrap();
    let b = CovTree::build(mixed(3000, 4, 1), TreeConfig::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(encode_tree(&a), encode_tree(&b));
}

#[test]
fn encoded_tree_decodes_to_itself() {
    let tree = CovTree::build(mixed(700, 3, 2), TreeConfig::default()).unwrap();
    let bytes = encode_tree(&tree);
    assert_eq!(decode_tree(&bytes).unwrap(), tree);
}

#[test]
fn two_point_partition_is_one_dimensional() {
    for d in 1..=6 {
        let rows = vec![vec![0.0; d], (0..d).map(|j| j as f64 + 1.0).collect()];
        let tree = CovTree::build(points_from_rows(rows), TreeConfig::default()).unwrap();
        assert_eq!(tree.root().lambda, 1);
        assert_eq!(tree.root().children.len(), 2);
        assert_eq!(tree.leaves().count(), 2);
    }
}

#[test]
fn planar_data_in_3d_never_uses_the_third_axis() {
    let pts = points_from_rows(
        uniform(1000, 2, 5).into_iter().map(|p| vec![p.coords[0], p.coords[1], 1.5]),
    );
    let tree = CovTree::build(pts, TreeConfig::default()).unwrap();
    assert!(tree.nodes().iter().all(|n| n.lambda <= 2));
    check_tree(&tree).unwrap();
}
