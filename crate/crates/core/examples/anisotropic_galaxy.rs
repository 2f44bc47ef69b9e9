//! Anisotropic neighbor search on a point sample of a spiral galaxy: on an
//! arm the converged neighborhood stretches along the ridge, in the sky it
//! stays closer to round.

use std::path::PathBuf;

use covqt::image::sample_image;
use covqt::synth::SpiralGalaxy;
use covqt::{anisotropic_knn, BootstrapConfig, CovTree, TreeConfig};

fn main() -> covqt::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("covqt-examples"));
    std::fs::create_dir_all(&out).map_err(|e| covqt::Error::Io { path: out.clone(), source: e })?;

    let galaxy = SpiralGalaxy::m51_like();
    let image = galaxy.render();
    image.write(out.join("galaxy.ppm"))?;
    let points = sample_image(&image, 44_081, 51)?;
    let tree = CovTree::build(points, TreeConfig::default())?;
    println!("{} sampled points, {} tree nodes", tree.len(), tree.nodes().len());

    let k = 410;
    let config = BootstrapConfig::default();
    let (cx, cy) = galaxy.center();
    let tangent = |r: f64, arm: usize| {
        let (a, b) = (galaxy.ridge_point(r - 1.0, arm), galaxy.ridge_point(r + 1.0, arm));
        Some((b[1] - a[1]).atan2(b[0] - a[0]).to_degrees().rem_euclid(180.0))
    };
    let queries = [
        ("arm 0, r = 50", galaxy.ridge_point(50.0, 0), tangent(50.0, 0)),
        ("arm 1, r = 80", galaxy.ridge_point(80.0, 1), tangent(80.0, 1)),
        ("companion", galaxy.companion(), None),
        ("bulge", [cx, cy], None),
        ("sky corner", [30.0, 30.0], None),
    ];

    println!(
        "\n{:<14} {:>5} {:>9} {:>7} {:>10} {:>8}",
        "query", "iters", "converged", "ratio", "major axis", "ridge"
    );
    for (name, q, ridge) in &queries {
        let res = anisotropic_knn(&tree, q, k, &config)?;
        let v = res.metric.eig().vector(0);
        let angle = v[1].atan2(v[0]).to_degrees().rem_euclid(180.0);
        let ridge = ridge.map_or("-".to_string(), |t| format!("{t:.1}"));
        println!(
            "{name:<14} {:>5} {:>9} {:>7.2} {:>10.1} {:>8}",
            res.iterations,
            res.converged,
            res.metric.anisotropy(),
            angle,
            ridge
        );
    }
    Ok(())
}
