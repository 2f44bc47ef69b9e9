//! Anisotropic kernel density estimation in the plane.
//!
//! At an evaluation point `x` the converged Mahalanobis neighborhood of
//! size K gives principal axes `u_a`, `u_b` and variances `σ_a²`, `σ_b²`.
//! Both axes are rescaled by a common factor so that the K-th neighbor sits
//! exactly on the kernel cut `ξ = 2`, and
//!
//! ```text
//! ρ(x) = 1/N Σ_j W(ξ_j) / (h_a h_b),   ξ_j² = ((x-x_j)·u_a / h_a)² + ((x-x_j)·u_b / h_b)²
//! ```
//!
//! with `W` the 2D-normalized cubic B-spline, so each term integrates to
//! `1/N` over the plane.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::linalg::dot;
use crate::search::{anisotropic_knn, BootstrapConfig};
use crate::tree::CovTree;

/// Normalization making `∫ W(|q|) d²q = 1` for the cubic B-spline.
pub const CUBIC_SPLINE_NORM_2D: f64 = 10.0 / (7.0 * std::f64::consts::PI);

/// Minor axis floor relative to the major axis.
pub const MINOR_AXIS_FLOOR: f64 = 1e-3;

/// Cubic B-spline smoothing kernel, 2D normalization, support `[0, 2)`.
pub fn cubic_bspline(q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "kernel argument must be non-negative, got {q}"
        )));
    }
    Ok(CUBIC_SPLINE_NORM_2D * spline_shape(q))
}

fn spline_shape(q: f64) -> f64 {
    if q < 1.0 {
        1.0 - 1.5 * q * q + 0.75 * q * q * q
    } else if q < 2.0 {
        0.25 * (2.0 - q).powi(3)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelProfile {
    #[default]
    CubicBSpline,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelModel {
    pub profile: KernelProfile,
}

impl KernelModel {
    /// Metric radius where the kernel vanishes.
    pub fn support(&self) -> f64 {
        match self.profile {
            KernelProfile::CubicBSpline => 2.0,
        }
    }

    pub fn value(&self, q: f64) -> f64 {
        match self.profile {
            KernelProfile::CubicBSpline => CUBIC_SPLINE_NORM_2D * spline_shape(q),
        }
    }
}

/// Per-neighbor view of one density evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub density: f64,
    /// Scaled axis lengths `h_a >= h_b`.
    pub axes: [f64; 2],
    /// Scaled metric radius of every neighbor, in list order.
    pub radii: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Density estimator bound to a 2D tree.
#[derive(Debug, Clone)]
pub struct DensityEstimator<'a> {
    tree: &'a CovTree,
    k: usize,
    n_total: f64,
    kernel: KernelModel,
    bootstrap: BootstrapConfig,
}

impl<'a> DensityEstimator<'a> {
    pub fn new(tree: &'a CovTree, k: usize, n_total: usize) -> Result<Self> {
        if tree.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: tree.dim(),
            });
        }
        if k < 3 {
            return Err(Error::InvalidK(k));
        }
        if n_total == 0 {
            return Err(Error::InvalidArgument("N_total must be >= 1".into()));
        }
        Ok(Self {
            tree,
            k,
            n_total: n_total as f64,
            kernel: KernelModel::default(),
            bootstrap: BootstrapConfig::default(),
        })
    }

    pub fn with_bootstrap(mut self, bootstrap: BootstrapConfig) -> Self {
        self.bootstrap = bootstrap;
        self
    }

    pub fn estimate(&self, query: &[f64]) -> Result<f64> {
        Ok(self.estimate_detailed(query)?.density)
    }

    pub fn estimate_detailed(&self, query: &[f64]) -> Result<Estimate> {
        let res = anisotropic_knn(self.tree, query, self.k, &self.bootstrap)?;
        let eig = res.metric.eig();
        let sigma_a = eig.values[0].max(0.0).sqrt();
        let sigma_b = eig.values[1].max(0.0).sqrt().max(MINOR_AXIS_FLOOR * sigma_a);
        let (ua, ub) = (eig.vector(0), eig.vector(1));
        let points = self.tree.points();

        let mut xi: Vec<f64> = res
            .list
            .entries()
            .iter()
            .map(|n| {
                let p = &points[n.index].coords;
                let delta = [query[0] - p[0], query[1] - p[1]];
                ((dot(&delta, ua) / sigma_a).powi(2) + (dot(&delta, ub) / sigma_b).powi(2)).sqrt()
            })
            .collect();
        let xi_max = xi.iter().copied().fold(0.0, f64::max);
        if !(xi_max > 0.0) {
            return Err(Error::DegenerateNeighborhood);
        }
        // common rescaling puts the outermost neighbor on the kernel cut
        let cut = self.kernel.support();
        let scale = xi_max / cut;
        let (ha, hb) = (sigma_a * scale, sigma_b * scale);
        for x in &mut xi {
            *x = cut * *x / xi_max;
        }
        let sum: f64 = xi.iter().map(|&q| self.kernel.value(q)).sum();
        Ok(Estimate {
            density: sum / (self.n_total * ha * hb),
            axes: [ha, hb],
            radii: xi,
            iterations: res.iterations,
            converged: res.converged,
        })
    }
}

/// Density at `query` from its K anisotropic neighbors, normalized by
/// `n_total`.
pub fn density_estimate(tree: &CovTree, query: &[f64], k: usize, n_total: usize) -> Result<f64> {
    DensityEstimator::new(tree, k, n_total)?.estimate(query)
}

/// Raster of `width x height` cells over `[x0, x1] x [y0, y1]`. Row 0 is
/// the `y0` edge, matching image rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub extent: [f64; 4],
}

impl GridSpec {
    pub fn new(width: usize, height: usize, extent: [f64; 4]) -> Result<Self> {
        if width < 8 || height < 8 {
            return Err(Error::InvalidArgument("grid must be at least 8x8".into()));
        }
        let [x0, y0, x1, y1] = extent;
        if !(x1 > x0 && y1 > y0) || extent.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad extent {extent:?}")));
        }
        Ok(Self {
            width,
            height,
            extent,
        })
    }

    pub fn cell_size(&self) -> (f64, f64) {
        let [x0, y0, x1, y1] = self.extent;
        ((x1 - x0) / self.width as f64, (y1 - y0) / self.height as f64)
    }

    pub fn cell_area(&self) -> f64 {
        let (dx, dy) = self.cell_size();
        dx * dy
    }

    pub fn cell_center(&self, col: usize, row: usize) -> [f64; 2] {
        let (dx, dy) = self.cell_size();
        [
            self.extent[0] + (col as f64 + 0.5) * dx,
            self.extent[1] + (row as f64 + 0.5) * dy,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: GridSpec,
    /// Row-major cell values.
    pub values: Vec<f64>,
    /// Midpoint-rule integral over the grid.
    pub integral: f64,
}

impl DensityField {
    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.grid.width + col]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Linear map of `[0, max]` onto `[0, 255]`.
    pub fn to_image(&self) -> Image {
        let max = self.max();
        let data = self
            .values
            .iter()
            .map(|&v| {
                if max > 0.0 {
                    (255.0 * v / max).round().clamp(0.0, 255.0) as u8
                } else {
                    0
                }
            })
            .collect();
        Image::new_gray(self.grid.width, self.grid.height, data).expect("grid sized")
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_image().write(path)
    }

    /// `x,y,rho` per cell center, with header.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "x,y,rho").map_err(io)?;
        for row in 0..self.grid.height {
            for col in 0..self.grid.width {
                let [x, y] = self.grid.cell_center(col, row);
                writeln!(out, "{x},{y},{}", self.get(col, row)).map_err(io)?;
            }
        }
        out.flush().map_err(io)
    }
}

/// Evaluates the estimator at every cell center, rows in parallel.
pub fn render_field(tree: &CovTree, grid: GridSpec, k: usize, n_total: usize) -> Result<DensityField> {
    render_with(&DensityEstimator::new(tree, k, n_total)?, grid)
}

pub fn render_with(est: &DensityEstimator<'_>, grid: GridSpec) -> Result<DensityField> {
    let mut values = vec![0.0; grid.width * grid.height];
    values
        .par_chunks_mut(grid.width)
        .enumerate()
        .try_for_each(|(row, cells)| -> Result<()> {
            for (col, cell) in cells.iter_mut().enumerate() {
                *cell = est.estimate(&grid.cell_center(col, row))?;
            }
            Ok(())
        })?;
    let integral = values.iter().sum::<f64>() * grid.cell_area();
    Ok(DensityField {
        grid,
        values,
        integral,
    })
}
