use crate::error::{Error, Result};

/// A d-dimensional input vector carrying a stable identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub id: u64,
    pub coords: Vec<f64>,
}

impl DataPoint {
    pub fn new(id: u64, coords: Vec<f64>) -> Self {
        Self { id, coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Wraps raw coordinate rows as points with ids `0..n`.
pub fn points_from_rows<I>(rows: I) -> Vec<DataPoint>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    rows.into_iter()
        .enumerate()
        .map(|(i, c)| DataPoint::new(i as u64, c))
        .collect()
}

/// Checks that `points` is non-empty, of uniform dimension within the
/// supported range, and finite. Returns the common dimension.
pub fn validate(points: &[DataPoint]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyPartition)?;
    let dim = first.dim();
    if dim == 0 || dim > crate::linalg::MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    for p in points {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        if p.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    Ok(dim)
}
