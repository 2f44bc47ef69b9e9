//! Covariance hyper-quadtree.
//!
//! A quadtree generalization whose nodes split at the local data mean along
//! the hyperplanes normal to the local covariance eigenvectors. The number of
//! splitting directions adapts per node to the intrinsic dimensionality of
//! its points, so a node has between 2 and `2^d` children.
//!
//! On top of the tree the crate provides exact K-nearest-neighbor search,
//! both Euclidean and Mahalanobis with a bootstrapped neighborhood metric,
//! anisotropic kernel density estimation, image sampling and tessellation,
//! and a benchmark harness. See the `examples/` directory for one runnable
//! program per capability.

pub mod bench;
pub mod codec;
pub mod density;
pub mod error;
mod flat;
pub mod image;
pub mod linalg;
pub mod point;
pub mod search;
pub mod synth;
pub mod tessellate;
pub mod tree;

pub use error::{Error, Result};
pub use linalg::{DimRule, EigenDecomposition, SymMatrix};
pub use point::DataPoint;
pub use search::{
    anisotropic_knn, brute_force_knn, knn_find, AnisotropicResult, BootstrapConfig, KnnList,
    MetricState, SearchStats,
};
pub use tree::{BuildMode, CovNode, CovTree, TreeConfig};

/// Configures the global rayon pool from `COVQT_THREADS` (0 or unset means
/// automatic). Only the first call has an effect.
pub fn init_threads_from_env() {
    let threads = std::env::var("COVQT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
}
