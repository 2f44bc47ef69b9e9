//! Small dense linear algebra: moments, symmetric eigendecomposition,
//! intrinsic-dimensionality selection and Mahalanobis quadratic forms.
//!
//! Everything here works on plain `f64` slices. Dimensions are small
//! (at most [`MAX_DIM`]), so matrices are stored row-major in a `Vec`.

use crate::error::{Error, Result};
use crate::point::DataPoint;

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;

/// Eigenvalues below `EIGEN_FLOOR * alpha_1` are left out of Mahalanobis sums.
pub const EIGEN_FLOOR: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum()
}

/// Square symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// Builds a matrix from row-major entries. Symmetry is checked by
    /// [`eigendecompose`], not here.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| dot(&self.data[i * self.dim..(i + 1) * self.dim], v))
            .collect()
    }

    /// `vᵀ M v`
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        dot(v, &self.mul_vec(v))
    }

    fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Mean and population covariance (1/n) of a point set.
pub fn mean_and_covariance(points: &[DataPoint]) -> Result<(Vec<f64>, SymMatrix)> {
    let dim = crate::point::validate(points)?;
    Ok(moments(dim, points.iter().map(|p| p.coords.as_slice())))
}

/// Two-pass mean and population covariance over coordinate rows.
///
/// The caller guarantees a non-empty iterator of rows with length `dim`.
pub fn moments<'a, I>(dim: usize, rows: I) -> (Vec<f64>, SymMatrix)
where
    I: Iterator<Item = &'a [f64]> + Clone,
{
    let mut mean = vec![0.0; dim];
    let mut n = 0usize;
    for r in rows.clone() {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
        n += 1;
    }
    let inv_n = 1.0 / n as f64;
    for m in &mut mean {
        *m *= inv_n;
    }
    let mut cov = SymMatrix::zeros(dim);
    let mut dev = vec![0.0; dim];
    for r in rows {
        for ((d, x), m) in dev.iter_mut().zip(r).zip(&mean) {
            *d = x - m;
        }
        for i in 0..dim {
            for j in i..dim {
                cov.data[i * dim + j] += dev[i] * dev[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = cov.data[i * dim + j] * inv_n;
            cov.data[i * dim + j] = v;
            cov.data[j * dim + i] = v;
        }
    }
    (mean, cov)
}

/// Weighted mean and covariance. Falls back to uniform weights when the
/// weights sum to zero.
pub fn weighted_moments<'a, I>(dim: usize, rows: I) -> (Vec<f64>, SymMatrix)
where
    I: Iterator<Item = (&'a [f64], f64)> + Clone,
{
    let total: f64 = rows.clone().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return moments(dim, rows.map(|(r, _)| r));
    }
    let mut mean = vec![0.0; dim];
    for (r, w) in rows.clone() {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += w * x;
        }
    }
    for m in &mut mean {
        *m /= total;
    }
    let mut cov = SymMatrix::zeros(dim);
    let mut dev = vec![0.0; dim];
    for (r, w) in rows {
        if w == 0.0 {
            continue;
        }
        for ((d, x), m) in dev.iter_mut().zip(r).zip(&mean) {
            *d = x - m;
        }
        for i in 0..dim {
            for j in i..dim {
                cov.data[i * dim + j] += w * dev[i] * dev[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = cov.data[i * dim + j] / total;
            cov.data[i * dim + j] = v;
            cov.data[j * dim + i] = v;
        }
    }
    (mean, cov)
}

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
///
/// `vectors[j]` is the unit eigenvector for `values[j]`. Each eigenvector
/// has its largest-magnitude component non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn identity(dim: usize) -> Self {
        Self {
            values: vec![1.0; dim],
            vectors: unit_basis(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j]
    }

    /// `V diag(values) Vᵀ`
    pub fn reconstruct(&self) -> SymMatrix {
        let d = self.dim();
        let mut m = SymMatrix::zeros(d);
        for (a, v) in self.values.iter().zip(&self.vectors) {
            for i in 0..d {
                for j in 0..d {
                    m.data[i * d + j] += a * v[i] * v[j];
                }
            }
        }
        m
    }
}

fn unit_basis(dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|j| {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            e
        })
        .collect()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn eigendecompose(m: &SymMatrix) -> Result<EigenDecomposition> {
    let d = m.dim();
    if d == 0 || d > MAX_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    if m.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = m.max_abs();
    let asym = m.max_asymmetry();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(asym));
    }

    // work on the symmetrized copy
    let mut a = m.clone();
    for i in 0..d {
        for j in (i + 1)..d {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    // v[i][k]: row i, column k (columns are eigenvectors)
    let mut v = vec![vec![0.0; d]; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let total = a.norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).powi(2))
            .sum();
        if off == 0.0 || off.sqrt() <= f64::EPSILON * 1e-2 * total {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..d {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a.get(j, j).total_cmp(&a.get(i, i)));
    let max_abs = (0..d).fold(0.0f64, |m, i| m.max(a.get(i, i).abs()));
    let mut values = Vec::with_capacity(d);
    let mut vectors = Vec::with_capacity(d);
    for &k in &order {
        let mut lambda = a.get(k, k);
        if lambda < 0.0 && lambda >= -1e-12 * max_abs {
            lambda = 0.0;
        }
        values.push(lambda);
        let mut col: Vec<f64> = v.iter().map(|row| row[k]).collect();
        let n = norm_sq(&col).sqrt();
        for c in &mut col {
            *c /= n;
        }
        // first component of largest magnitude made non-negative
        let lead = col
            .iter()
            .enumerate()
            .fold((0usize, 0.0f64), |(bi, bm), (i, c)| {
                if c.abs() > bm {
                    (i, c.abs())
                } else {
                    (bi, bm)
                }
            })
            .0;
        if col[lead] < 0.0 {
            for c in &mut col {
                *c = -*c;
            }
        }
        vectors.push(col);
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Rule deciding which principal components are kept at a node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DimRule {
    /// Keep component j while its length exceeds the mean data spacing
    /// inside the box spanned by the components already kept.
    #[default]
    Spacing,
    /// Keep component j while `sqrt(alpha_j / alpha_1)` exceeds the ratio.
    Ratio(f64),
}

/// Number of principal components retained for a partition of `n` points.
pub fn select_intrinsic_dim(eig: &EigenDecomposition, n: usize, rule: DimRule) -> usize {
    let cap = eig.dim().min(n.saturating_sub(1));
    let alphas = &eig.values;
    if cap == 0 || !(alphas[0] > 0.0) {
        return 0;
    }
    let mut lambda = 1;
    match rule {
        DimRule::Spacing => {
            // log of the product of accepted edge lengths sqrt(alpha_i)
            let ln_n = (n as f64).ln();
            let mut ln_edges = 0.5 * alphas[0].ln();
            while lambda < cap {
                let alpha = alphas[lambda];
                if !(alpha > 0.0) {
                    break;
                }
                let ln_spacing = (ln_edges - ln_n) / lambda as f64;
                if 0.5 * alpha.ln() > ln_spacing {
                    ln_edges += 0.5 * alpha.ln();
                    lambda += 1;
                } else {
                    break;
                }
            }
        }
        DimRule::Ratio(t) => {
            let threshold = t * t;
            while lambda < cap && alphas[lambda] / alphas[0] > threshold {
                lambda += 1;
            }
        }
    }
    lambda
}

/// `Σ_j (deltaᵀ u_j)² / sigma_j²` over the eigenpairs above the floor.
pub fn mahalanobis_sq(delta: &[f64], metric: &EigenDecomposition) -> Result<f64> {
    let top = metric.values.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(Error::SingularMetric);
    }
    let floor = EIGEN_FLOOR * top;
    Ok(metric
        .values
        .iter()
        .zip(&metric.vectors)
        .filter(|(a, _)| **a >= floor)
        .map(|(a, u)| dot(delta, u).powi(2) / a)
        .sum())
}
