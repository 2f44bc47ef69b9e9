//! Exact Euclidean K nearest neighbors, checked against an exhaustive scan,
//! with the descent statistics.

use covqt::point::points_from_rows;
use covqt::{brute_force_knn, knn_find, CovTree, TreeConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> covqt::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rows: Vec<Vec<f64>> = (0..20_000)
        .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
        .collect();
    let tree = CovTree::build(points_from_rows(rows), TreeConfig::default())?;

    let query = [0.5, 0.25, 0.75];
    for k in [1, 8, 64, 512] {
        let (list, stats) = knn_find(&tree, &query, k, None)?;
        let exact = brute_force_knn(tree.points(), &query, k, None)?;
        println!(
            "K = {k:3}: r_K = {:.5}, nodes visited {:5}, insertions {:5}, matches scan: {}",
            list.top_dist(),
            stats.nodes_visited,
            stats.insertions,
            list.ids() == exact.ids()
        );
    }

    let (list, _) = knn_find(&tree, &query, 5, None)?;
    println!("\nfive nearest:");
    for n in list.entries() {
        println!("  id {:5}  dist {:.6}  at {:.4?}", n.id, n.dist, tree.points()[n.index].coords);
    }
    Ok(())
}
