//! Principal axes of a point cloud, intrinsic dimensionality under both
//! rules, and Mahalanobis lengths.

use covqt::linalg::{eigendecompose, mahalanobis_sq, mean_and_covariance, select_intrinsic_dim};
use covqt::point::points_from_rows;
use covqt::{DimRule, SymMatrix};

fn main() -> covqt::Result<()> {
    let m = SymMatrix::from_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 0.0], &[0.0, 0.0, 0.01]])?;
    let eig = eigendecompose(&m)?;
    println!("eigenvalues  {:?}", eig.values);
    for (j, v) in eig.vectors.iter().enumerate() {
        println!("v{j}           {v:?}");
    }
    let residual = {
        let r = eig.reconstruct();
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (r.get(i, j) - m.get(i, j)).abs())
            .fold(0.0, f64::max)
    };
    println!("max reconstruction residual {residual:.2e}");

    // a thin ribbon: long in x, narrow in y, flat in z
    let rows: Vec<Vec<f64>> = (0..400)
        .map(|i| {
            let t = i as f64 / 400.0;
            vec![10.0 * t, 0.3 * (37.0 * t).sin(), 0.0]
        })
        .collect();
    let (mean, cov) = mean_and_covariance(&points_from_rows(rows))?;
    let eig = eigendecompose(&cov)?;
    println!("\nribbon mean {mean:.3?}");
    println!("ribbon eigenvalues {:.4?}", eig.values);
    for rule in [DimRule::Spacing, DimRule::Ratio(0.5), DimRule::Ratio(0.01)] {
        println!("  {rule:?}: lambda = {}", select_intrinsic_dim(&eig, 400, rule));
    }

    let metric = eigendecompose(&SymMatrix::diagonal(&[4.0, 1.0]))?;
    for delta in [[2.0, 0.0], [0.0, 2.0], [1.0, 1.0]] {
        println!("xi^2({delta:?}) = {}", mahalanobis_sq(&delta, &metric)?);
    }
    Ok(())
}
