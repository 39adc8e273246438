//! Time-series data model, normalization and sliding-window point clouds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time-ordered observations in `R^dim`, stored row-major.
///
/// Construction guarantees at least one point, a consistent dimension and
/// finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    dim: usize,
}

impl TimeSeries {
    /// Builds a series from a flat row-major buffer.
    pub fn from_flat(values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid_input("series dimension must be positive"));
        }
        if values.is_empty() {
            return Err(Error::invalid_input("series must contain at least one point"));
        }
        if values.len() % dim != 0 {
            return Err(Error::invalid_input(format!(
                "{} values do not split into points of dimension {dim}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid_input(format!(
                "non-finite coordinate at time {} (coordinate {})",
                pos / dim + 1,
                pos % dim + 1
            )));
        }
        Ok(Self { values, dim })
    }

    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::from_flat(values, 1)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::invalid_input(format!(
                    "point {} has {} coordinates, expected {dim}",
                    i + 1,
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(values, dim)
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Point at 0-based position `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.points().map(|p| p[j]).collect()
    }

    /// The values of a univariate series.
    pub fn as_univariate(&self) -> Result<&[f64]> {
        if self.dim != 1 {
            return Err(Error::Unsupported(format!(
                "expected a univariate series, got dimension {}",
                self.dim
            )));
        }
        Ok(&self.values)
    }

    /// Contiguous sub-series covering 0-based positions `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.len() {
            return Err(Error::invalid_input(format!(
                "slice {range:?} out of bounds for length {}",
                self.len()
            )));
        }
        Self::from_flat(
            self.values[range.start * self.dim..range.end * self.dim].to_vec(),
            self.dim,
        )
    }

    /// Applies `f` to every coordinate.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_flat(self.values.iter().map(|&v| f(v)).collect(), self.dim)
    }
}

/// Sliding-window size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    size: usize,
}

impl WindowConfig {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::invalid_input(format!("window size must be at least 2, got {size}")));
        }
        Ok(Self { size })
    }

    pub fn size(self) -> usize {
        self.size
    }

    /// Number of windows over a series of length `len`.
    pub fn window_count(self, len: usize) -> Result<usize> {
        if self.size > len {
            return Err(Error::InvalidWindow { window: self.size, len });
        }
        Ok(len - self.size + 1)
    }
}

/// One window of consecutive observations, viewed as an unordered point set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointCloud<'a> {
    coords: &'a [f64],
    dim: usize,
    origin: usize,
}

impl<'a> PointCloud<'a> {
    /// `origin` is the 1-based start position of the window in its source.
    pub fn new(coords: &'a [f64], dim: usize, origin: usize) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::invalid_input("point cloud coordinates do not match dimension"));
        }
        Ok(Self { coords, dim, origin })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn point(&self, i: usize) -> &'a [f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &'a [f64]> + 'a {
        self.coords.chunks_exact(self.dim)
    }
}

/// Rescales each coordinate into `[-1/2, 1/2]` using the global min and max.
/// Constant coordinates map to 0.
pub fn normalize(series: &TimeSeries) -> TimeSeries {
    let dim = series.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in series.points() {
        for j in 0..dim {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    let values = series
        .as_flat()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let j = k % dim;
            let range = hi[j] - lo[j];
            if range > 0.0 {
                (v - lo[j]) / range - 0.5
            } else {
                0.0
            }
        })
        .collect();
    TimeSeries { values, dim }
}

/// All `T - w + 1` windows with stride 1, in time order.
pub fn sliding_windows(series: &TimeSeries, cfg: WindowConfig) -> Result<Vec<PointCloud<'_>>> {
    let count = cfg.window_count(series.len())?;
    let dim = series.dim();
    let w = cfg.size();
    Ok((0..count)
        .map(|t| PointCloud {
            coords: &series.as_flat()[t * dim..(t + w) * dim],
            dim,
            origin: t + 1,
        })
        .collect())
}
