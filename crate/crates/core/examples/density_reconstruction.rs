//! Reconstruct a smooth image from a sparse point sample with the
//! anisotropic kernel density estimator, and score it against the source.
//!
//! Usage: density_reconstruction [OUT_DIR] [GRID_WIDTH]

use std::path::PathBuf;
use std::time::Instant;

use covqt::density::{render_field, GridSpec};
use covqt::image::{sample_image, ssim};
use covqt::synth::SpiralGalaxy;
use covqt::{CovTree, TreeConfig};

fn main() -> covqt::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("covqt-examples"));
    let width: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    std::fs::create_dir_all(&out).map_err(|e| covqt::Error::Io { path: out.clone(), source: e })?;

    let galaxy = SpiralGalaxy::m51_like();
    let source = galaxy.render();
    let n = 4_401;
    let points = sample_image(&source, n, 4401)?;
    let tree = CovTree::build(points, TreeConfig::default())?;

    let height = width * 3 / 4;
    let grid = GridSpec::new(width, height, [0.0, 0.0, 400.0, 300.0])?;
    let start = Instant::now();
    let field = render_field(&tree, grid, 200, n)?;
    println!(
        "{width}x{height} cells in {:.1} s, integral {:.4}",
        start.elapsed().as_secs_f64(),
        field.integral
    );

    let recon = field.to_image();
    let reference = source.to_gray().downsample(400 / width)?;
    println!("SSIM against the source: {:.3}", ssim(&recon, &reference)?);

    let pgm = out.join("galaxy_density.pgm");
    field.write_pgm(&pgm)?;
    field.write_csv(out.join("galaxy_density.csv"))?;
    println!("wrote {}", pgm.display());
    Ok(())
}
