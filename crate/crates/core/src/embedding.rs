//! PCA reduction of Betti matrices and the full series → signature transform.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::{normalize, sliding_windows, TimeSeries, WindowConfig};
use crate::topology::{betti_matrix_with, BettiMatrix, ScaleGrid};

/// Eigenvalues below this fraction of the covariance trace count as zero.
const RANK_TOLERANCE: f64 = 1e-12;

/// Covariance PCA fitted on the rows of a Betti matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `m` orthonormal loading vectors of length `n`.
    pub components: Vec<Vec<f64>>,
    /// Non-increasing; zero for directions beyond the numerical rank.
    pub explained_variance: Vec<f64>,
    /// Set when `m` exceeds the numerical rank of the covariance.
    pub rank_deficient: bool,
}

impl PcaModel {
    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Scores of a single row.
    pub fn project(&self, row: impl Iterator<Item = f64> + Clone) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| {
                row.clone()
                    .zip(&self.mean)
                    .zip(c)
                    .map(|((x, mu), l)| (x - mu) * l)
                    .sum()
            })
            .collect()
    }
}

/// Flips `v` so that its largest-magnitude entry (lowest index on ties) is positive.
fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Fits `m` principal components of the column-centred Betti matrix.
pub fn pca_fit(matrix: &BettiMatrix, m: usize) -> Result<PcaModel> {
    let n = matrix.n_scales();
    let rows = matrix.n_rows();
    if m == 0 || m > n {
        return Err(Error::invalid_input(format!(
            "number of components must be in 1..={n}, got {m}"
        )));
    }
    let mean: Vec<f64> = (0..n)
        .map(|j| (0..rows).map(|i| matrix.get(i, j)).sum::<f64>() / rows as f64)
        .collect();
    let centred = DMatrix::from_fn(rows, n, |i, j| matrix.get(i, j) - mean[j]);
    let denom = rows.saturating_sub(1).max(1) as f64;
    let cov = (centred.transpose() * &centred) / denom;
    let trace = cov.trace();

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let cutoff = RANK_TOLERANCE * trace;
    let mut rank_deficient = false;
    let mut components = Vec::with_capacity(m);
    let mut explained_variance = Vec::with_capacity(m);
    for &k in order.iter().take(m) {
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        orient(&mut v);
        components.push(v);
        let lambda = eig.eigenvalues[k];
        if lambda <= cutoff {
            rank_deficient = true;
            explained_variance.push(0.0);
        } else {
            explained_variance.push(lambda);
        }
    }
    if rank_deficient {
        log::warn!("requested {m} components exceed the numerical rank of the Betti covariance");
    }
    Ok(PcaModel { mean, components, explained_variance, rank_deficient })
}

/// Projects every row of `matrix`; the result has dimension `m`.
pub fn pca_transform(model: &PcaModel, matrix: &BettiMatrix) -> Result<TimeSeries> {
    if matrix.n_scales() != model.n_features() {
        return Err(Error::invalid_input(format!(
            "Betti grid length {} does not match PCA model ({})",
            matrix.n_scales(),
            model.n_features()
        )));
    }
    let mut flat = Vec::with_capacity(matrix.n_rows() * model.n_components());
    for row in matrix.rows() {
        flat.extend(model.project(row.counts.iter().map(|&c| c as f64)));
    }
    TimeSeries::from_flat(flat, model.n_components())
}

/// Parameters of the signature transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TdaConfig {
    pub window: usize,
    pub grid: ScaleGrid,
    pub pca_m: usize,
}

impl TdaConfig {
    pub fn new(window: usize, pca_m: usize) -> Self {
        Self { window, grid: ScaleGrid::default(), pca_m }
    }
}

/// Topological signature series with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedSeries {
    /// `T - w + 1` points in `R^m`; point `t` summarises the window starting at `t`.
    pub values: TimeSeries,
    pub config: TdaConfig,
}

/// Every intermediate of the transform, for reporting.
#[derive(Clone, Debug)]
pub struct TdaTransform {
    pub derived: DerivedSeries,
    pub betti: BettiMatrix,
    pub pca: PcaModel,
}

/// normalize → sliding windows → Betti matrix → PCA scores.
pub fn tda_transform(series: &TimeSeries, cfg: &TdaConfig) -> Result<DerivedSeries> {
    tda_transform_detailed(series, cfg, Execution::default()).map(|t| t.derived)
}

pub fn tda_transform_detailed(
    series: &TimeSeries,
    cfg: &TdaConfig,
    exec: Execution,
) -> Result<TdaTransform> {
    let window = WindowConfig::new(cfg.window)?;
    let normalized = normalize(series);
    let clouds = sliding_windows(&normalized, window)?;
    let betti = betti_matrix_with(&clouds, &cfg.grid, exec)?;
    let pca = pca_fit(&betti, cfg.pca_m)?;
    let values = pca_transform(&pca, &betti)?;
    Ok(TdaTransform { derived: DerivedSeries { values, config: cfg.clone() }, betti, pca })
}
