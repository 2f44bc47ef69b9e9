//! Search cost as a function of K on uniform and clustered data: nodes
//! visited and candidates inserted per returned neighbor.

use std::path::PathBuf;

use covqt::bench::{emit, log_slope, sample_queries, spearman, sweep};
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

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let uniform: Vec<Vec<f64>> = (0..10_000).map(|_| vec![rng.random(), rng.random()]).collect();
    let clustered: Vec<Vec<f64>> = (0..10_000)
        .map(|i| {
            let c = (i % 5) as f64 * 0.2 + 0.1;
            vec![c + 0.01 * rng.random::<f64>(), c + 0.01 * rng.random::<f64>()]
        })
        .collect();

    let k_list: Vec<usize> = (8..=512).step_by(8).collect();
    for (name, rows) in [("uniform", uniform), ("clustered", clustered)] {
        let tree = CovTree::build(points_from_rows(rows), TreeConfig::default())?;
        let queries = sample_queries(tree.points(), 100, 17);
        let run = sweep(&tree, name, &queries, &k_list, true)?;
        let ks: Vec<f64> = run.rows.iter().map(|r| r.k as f64).collect();
        let nodes: Vec<f64> = run.rows.iter().map(|r| r.nodes.mean).collect();
        println!("{name}:");
        for r in run.rows.iter().filter(|r| [8, 64, 256, 512].contains(&r.k)) {
            println!(
                "  K = {:3}: nodes {:7.1} [{:5} .. {:5}], candidates/neighbor {:.2}, efficiency {:.2}",
                r.k,
                r.nodes.mean,
                r.nodes.min,
                r.nodes.max,
                r.candidates_per_neighbor.mean,
                r.efficiency()
            );
        }
        println!(
            "  rank correlation of nodes with K {:.3}, nodes per unit ln K {:.0}",
            spearman(&ks, &nodes),
            log_slope(&ks, &nodes)
        );
        let (csv, _) = emit(&run, out.join(format!("bench_{name}")))?;
        println!("  wrote {}", csv.display());
    }
    Ok(())
}
