//! Betti-0 sequences of Vietoris–Rips filtrations.
//!
//! β₀ of a Rips complex only depends on its 1-skeleton, so the count at
//! scale ε is the number of connected components of the graph joining
//! points at Euclidean distance `<= ε`. Each window sorts its pairwise
//! distances once and sweeps a union-find over the scale grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::PointCloud;

/// Strictly increasing, nonnegative filtration scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScaleGrid {
    scales: Vec<f64>,
}

impl ScaleGrid {
    pub const DEFAULT_LEN: usize = 50;
    pub const DEFAULT_STEP: f64 = 0.01;

    pub fn new(scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::invalid_input("scale grid must not be empty"));
        }
        if scales.iter().any(|s| !s.is_finite()) || scales[0] < 0.0 {
            return Err(Error::invalid_input("scales must be finite and nonnegative"));
        }
        if scales.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::invalid_input("scales must be strictly increasing"));
        }
        Ok(Self { scales })
    }

    /// `len` scales `0, step, 2·step, …`.
    pub fn uniform(len: usize, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::invalid_input("scale step must be positive"));
        }
        Self::new((0..len).map(|i| step * i as f64).collect())
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

impl Default for ScaleGrid {
    /// 50 scales `0.00, 0.01, …, 0.49`.
    fn default() -> Self {
        Self::uniform(Self::DEFAULT_LEN, Self::DEFAULT_STEP).expect("default grid is valid")
    }
}

impl TryFrom<Vec<f64>> for ScaleGrid {
    type Error = Error;

    fn try_from(scales: Vec<f64>) -> Result<Self> {
        Self::new(scales)
    }
}

impl From<ScaleGrid> for Vec<f64> {
    fn from(grid: ScaleGrid) -> Self {
        grid.scales
    }
}

/// Component counts of one window over a scale grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiSequence {
    pub counts: Vec<usize>,
    /// 1-based start of the source window.
    pub window_origin: usize,
}

/// One Betti sequence per window, all over the same grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiMatrix {
    rows: Vec<BettiSequence>,
    n_scales: usize,
}

impl BettiMatrix {
    pub fn from_rows(rows: Vec<BettiSequence>) -> Result<Self> {
        let n_scales = rows
            .first()
            .map(|r| r.counts.len())
            .ok_or_else(|| Error::invalid_input("Betti matrix needs at least one row"))?;
        if n_scales == 0 || rows.iter().any(|r| r.counts.len() != n_scales) {
            return Err(Error::invalid_input("Betti rows must share one nonempty grid length"));
        }
        Ok(Self { rows, n_scales })
    }

    pub fn rows(&self) -> &[BettiSequence] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_scales(&self) -> usize {
        self.n_scales
    }

    /// Entry `(row, scale)` as a float.
    pub fn get(&self, row: usize, scale: usize) -> f64 {
        self.rows[row].counts[scale] as f64
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug)]
struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n], components: n }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two components were merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.components -= 1;
        true
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// All pairwise edges `(distance, i, j)` sorted by distance.
fn sorted_edges(cloud: &PointCloud<'_>) -> Vec<(f64, u32, u32)> {
    let n = cloud.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((euclidean(cloud.point(i), cloud.point(j)), i as u32, j as u32));
        }
    }
    edges.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    edges
}

/// Heights at which single-linkage clustering merges components, ascending.
/// Exactly `len - 1` values (the minimum spanning tree edge lengths).
pub fn merge_heights(cloud: &PointCloud<'_>) -> Vec<f64> {
    let mut dsu = DisjointSet::new(cloud.len());
    sorted_edges(cloud)
        .into_iter()
        .filter(|&(_, i, j)| dsu.union(i as usize, j as usize))
        .map(|(d, _, _)| d)
        .collect()
}

/// β₀ of the Rips complex of `cloud` at every scale of `grid`.
pub fn betti0_sequence(cloud: &PointCloud<'_>, grid: &ScaleGrid) -> Result<BettiSequence> {
    if cloud.is_empty() {
        return Err(Error::invalid_input("cannot compute Betti numbers of an empty cloud"));
    }
    let edges = sorted_edges(cloud);
    let mut dsu = DisjointSet::new(cloud.len());
    let mut next = 0;
    let counts = grid
        .scales()
        .iter()
        .map(|&eps| {
            while next < edges.len() && edges[next].0 <= eps {
                let (_, i, j) = edges[next];
                dsu.union(i as usize, j as usize);
                next += 1;
            }
            dsu.components
        })
        .collect();
    Ok(BettiSequence { counts, window_origin: cloud.origin() })
}

/// Betti sequences for every cloud, rows in input order.
pub fn betti_matrix(clouds: &[PointCloud<'_>], grid: &ScaleGrid) -> Result<BettiMatrix> {
    betti_matrix_with(clouds, grid, Execution::default())
}

pub fn betti_matrix_with(
    clouds: &[PointCloud<'_>],
    grid: &ScaleGrid,
    exec: Execution,
) -> Result<BettiMatrix> {
    let first = clouds.first().ok_or_else(|| Error::invalid_input("no point clouds given"))?;
    if clouds.iter().any(|c| c.len() != first.len() || c.dim() != first.dim()) {
        return Err(Error::invalid_input("point clouds have inconsistent window sizes"));
    }
    let rows = exec
        .map(clouds, |c| betti0_sequence(c, grid))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    BettiMatrix::from_rows(rows)
}
