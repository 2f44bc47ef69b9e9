//! Partition an image into convex cells of similar brightness and paint
//! each cell with its mean color, at increasing depth limits.

use std::path::PathBuf;

use covqt::synth::test_card;
use covqt::tessellate::{tessellate, TessellationConfig};
use covqt::DimRule;

fn main() -> covqt::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("covqt-examples"));
    std::fs::create_dir_all(&out).map_err(|e| covqt::Error::Io { path: out.clone(), source: e })?;

    let image = test_card(160, 120);
    image.write(out.join("card.ppm"))?;
    for level in [1, 2, 4, 7] {
        let config = TessellationConfig {
            tolerance: 0.5,
            dim_rule: DimRule::Ratio(0.5),
            max_level: level,
        };
        let t = tessellate(&image, config)?;
        let cells = t.cells();
        let empty = cells.iter().filter(|c| c.node.is_none()).count();
        let path = out.join(format!("card_level{level}.ppm"));
        t.render_outlined([0, 0, 0]).write(&path)?;
        println!(
            "level {level}: {:4} leaves, {:4} cells ({empty} empty), {}",
            t.leaf_count(),
            cells.len(),
            path.display()
        );
    }
    Ok(())
}
