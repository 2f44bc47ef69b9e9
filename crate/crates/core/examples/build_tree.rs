//! Build a covariance quadtree over a mixture of a filament, a flat disk and
//! scattered points in 3D; inspect the structure, route a query, and round-trip
//! the tree through its binary file format.

use std::path::PathBuf;

use covqt::codec::{load_tree, save_tree};
use covqt::point::points_from_rows;
use covqt::{CovTree, TreeConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> covqt::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("covqt-examples"));
    std::fs::create_dir_all(&out).map_err(|e| covqt::Error::Io { path: out.clone(), source: e })?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rows = Vec::new();
    for _ in 0..1500 {
        let t: f64 = rng.random();
        rows.push(vec![5.0 * t, 0.05 * rng.random::<f64>(), 0.05 * rng.random::<f64>()]);
    }
    for _ in 0..1500 {
        let (r, a) = (rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU);
        rows.push(vec![2.0 + r * a.cos(), 3.0 + r * a.sin(), 0.01 * rng.random::<f64>()]);
    }
    for _ in 0..500 {
        rows.push((0..3).map(|_| 6.0 * rng.random::<f64>() - 1.0).collect());
    }

    let tree = CovTree::build(points_from_rows(rows), TreeConfig::default())?;
    let census = tree.census();
    println!(
        "{} points -> {} nodes, {} leaves, depth {}",
        tree.len(),
        census.nodes,
        census.leaves,
        census.max_depth
    );
    for (lambda, count) in census.lambda_histogram.iter().enumerate() {
        println!("  nodes with lambda = {lambda}: {count}");
    }

    let path = tree.locate(&[2.5, 0.02, 0.02]);
    println!("\nrouting path of a filament point:");
    for id in &path {
        let node = tree.node(*id);
        println!(
            "  node {id:5} depth {:2} n {:5} lambda {}",
            node.depth, node.n, node.lambda
        );
    }

    let file = out.join("mixture.cqt");
    save_tree(&tree, &file)?;
    let back = load_tree(&file)?;
    println!("\nsaved to {} and reloaded: identical = {}", file.display(), back == tree);
    Ok(())
}
