//! Removing serial correlation before detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// `y_t - μ = Σ φ_j (y_{t-j} - μ) + e_t` with `Var(e_t) = noise_variance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub coefficients: Vec<f64>,
    /// The process mean μ.
    pub intercept: f64,
    pub noise_variance: f64,
}

impl ArModel {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }
}

/// Biased (1/T) sample autocovariances at lags `0..=max_lag`.
pub fn autocovariances(y: &[f64], max_lag: usize) -> Vec<f64> {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    (0..=max_lag)
        .map(|k| {
            (k..n).map(|t| (y[t] - mean) * (y[t - k] - mean)).sum::<f64>() / n as f64
        })
        .collect()
}

/// Yule–Walker AR(p) fit solved with the Levinson–Durbin recursion.
pub fn fit_ar(y: &[f64], p: usize) -> Result<ArModel> {
    if y.len() <= p + 1 {
        return Err(Error::Fit(format!(
            "AR({p}) needs more than {} observations, got {}",
            p + 1,
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("series contains non-finite values".into()));
    }
    let gamma = autocovariances(y, p);
    if !(gamma[0] > 0.0) {
        return Err(Error::Fit("cannot fit an AR model to a constant series".into()));
    }
    let intercept = y.iter().sum::<f64>() / y.len() as f64;

    let mut phi: Vec<f64> = Vec::with_capacity(p);
    let mut err = gamma[0];
    for k in 1..=p {
        let acc: f64 = gamma[k] - phi.iter().enumerate().map(|(j, c)| c * gamma[k - 1 - j]).sum::<f64>();
        let reflection = acc / err;
        if !reflection.is_finite() || reflection.abs() >= 1.0 {
            return Err(Error::Fit(format!("singular Toeplitz system at lag {k}")));
        }
        let prev = phi.clone();
        for j in 0..phi.len() {
            phi[j] = prev[j] - reflection * prev[k - 2 - j];
        }
        phi.push(reflection);
        err *= 1.0 - reflection * reflection;
        if !(err > 0.0) {
            return Err(Error::Fit(format!("singular Toeplitz system at lag {k}")));
        }
    }
    Ok(ArModel { coefficients: phi, intercept, noise_variance: err })
}

/// Residual series; value `i` (0-based) belongs to source position `i + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Residuals {
    pub values: Vec<f64>,
    pub offset: usize,
}

/// One-step prediction errors for `t = p+1 ..= T`.
pub fn ar_residuals(y: &[f64], model: &ArModel) -> Result<Residuals> {
    let p = model.order();
    if y.len() <= p {
        return Err(Error::invalid_input(format!(
            "series of length {} is too short for AR({p}) residuals",
            y.len()
        )));
    }
    let mu = model.intercept;
    let values = (p..y.len())
        .map(|t| {
            let pred: f64 = model
                .coefficients
                .iter()
                .enumerate()
                .map(|(j, phi)| phi * (y[t - 1 - j] - mu))
                .sum();
            y[t] - mu - pred
        })
        .collect();
    Ok(Residuals { values, offset: p })
}

/// `order`-fold first differences of every coordinate.
pub fn difference(series: &TimeSeries, order: usize) -> Result<TimeSeries> {
    if series.len() <= order {
        return Err(Error::invalid_input(format!(
            "cannot difference a series of length {} {order} times",
            series.len()
        )));
    }
    let dim = series.dim();
    let mut values = series.as_flat().to_vec();
    for _ in 0..order {
        values = values[dim..].iter().zip(&values[..values.len() - dim]).map(|(a, b)| a - b).collect();
    }
    TimeSeries::from_flat(values, dim)
}
