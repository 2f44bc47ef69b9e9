#![allow(dead_code)]

use covqt::linalg::dot;
use covqt::point::points_from_rows;
use covqt::tree::child_index;
use covqt::{CovTree, DataPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(n: usize, d: usize, seed: u64) -> Vec<DataPoint> {
    let mut r = rng(seed);
    points_from_rows((0..n).map(|_| (0..d).map(|_| r.random::<f64>()).collect::<Vec<_>>()))
}

pub fn gaussian(n: usize, d: usize, seed: u64) -> Vec<DataPoint> {
    let mut r = rng(seed);
    points_from_rows(
        (0..n).map(|_| (0..d).map(|_| normal(&mut r)).collect::<Vec<f64>>()),
    )
}

pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

/// A mix of shapes: a stretched Gaussian, a lattice with repeated
/// coordinates and a few exact duplicates.
pub fn mixed(n: usize, d: usize, seed: u64) -> Vec<DataPoint> {
    let mut r = rng(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| match i % 4 {
            0 | 1 => (0..d)
                .map(|j| normal(&mut r) * 3f64.powi(-(j as i32)))
                .collect(),
            2 => (0..d).map(|_| r.random_range(0..5) as f64).collect(),
            _ => vec![0.25; d],
        })
        .collect();
    points_from_rows(rows)
}

/// Structural invariants of a built tree; returns the first violation.
pub fn check_tree(tree: &CovTree) -> Result<(), String> {
    let d = tree.dim();
    let mut seen = vec![0usize; tree.len()];
    for leaf in tree.leaves() {
        for &p in &tree.node(leaf).points {
            seen[p] += 1;
        }
    }
    if let Some(p) = seen.iter().position(|&c| c != 1) {
        return Err(format!("point {p} is in {} leaves", seen[p]));
    }
    for (id, node) in tree.nodes().iter().enumerate() {
        let pts = tree.subtree_points(id);
        if pts.len() != node.n {
            return Err(format!("node {id}: n = {} but holds {}", node.n, pts.len()));
        }
        if node.n >= 2 && node.lambda > d.min(node.n - 1) {
            return Err(format!("node {id}: lambda {} with n {}", node.lambda, node.n));
        }
        if node.n == 2 && !node.is_leaf() && node.lambda != 1 {
            return Err(format!("two-point node {id} has lambda {}", node.lambda));
        }
        if let Some(corner) = &node.corner {
            for &p in &pts {
                let x = &tree.points()[p].coords;
                let delta: Vec<f64> = x.iter().zip(&corner.vertex).map(|(a, b)| a - b).collect();
                for u in &corner.normals {
                    if dot(&delta, u) > 1e-9 * (1.0 + dot(x, x).sqrt()) {
                        return Err(format!("point {p} outside the corner of node {id}"));
                    }
                }
            }
        }
        for (beta, child) in node.children.iter().enumerate() {
            let Some(child) = child else { continue };
            for p in tree.subtree_points(*child) {
                let x = &tree.points()[p].coords;
                let delta: Vec<f64> = x.iter().zip(&node.expectation).map(|(a, b)| a - b).collect();
                if child_index(&delta, &node.eig, node.lambda) != beta {
                    return Err(format!("point {p} misrouted under node {id}"));
                }
            }
        }
    }
    Ok(())
}
