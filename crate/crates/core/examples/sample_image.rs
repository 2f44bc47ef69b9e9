//! Draw a point sample from an image with probability proportional to
//! brightness and write it as CSV.

use std::path::PathBuf;

use covqt::codec::{read_points, write_points};
use covqt::image::sample_image;
use covqt::synth::SpiralGalaxy;

fn main() -> covqt::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("covqt-examples"));
    std::fs::create_dir_all(&out).map_err(|e| covqt::Error::Io { path: out.clone(), source: e })?;

    let galaxy = SpiralGalaxy::m51_like();
    let image = galaxy.render();
    let points = sample_image(&image, 5_000, 1)?;

    // most of the light sits in the bulge and arms, so most samples do too
    let (cx, cy) = galaxy.center();
    let inner = points
        .iter()
        .filter(|p| (p.coords[0] - cx).hypot(p.coords[1] - cy) < galaxy.arm_end)
        .count();
    let sky = points
        .iter()
        .filter(|p| galaxy.is_sky(p.coords[0], p.coords[1], 0.0, 0.05))
        .count();
    println!("{} points: {inner} inside the arm radius, {sky} in open sky", points.len());

    let path = out.join("galaxy_points.csv");
    write_points(&points, &path)?;
    let back = read_points(&path)?;
    println!("wrote {} and read back {} identical points: {}", path.display(), back.len(), back == points);
    Ok(())
}
