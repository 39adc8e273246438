//! Data-generating processes for simulated change point scenarios.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution as _, Exp1, Poisson, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Segment distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum Distribution {
    Normal { mean: f64, sd: f64 },
    MvNormal { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    /// `Pois(λ) - λ`.
    PoissonAdjusted { lambda: f64 },
    StudentT { df: f64 },
    /// `μ + Z / sqrt(W/ν)` with `Z ~ N(0, Σ)`, `W ~ χ²_ν`.
    MvT { df: f64, mean: Vec<f64>, cov: Vec<Vec<f64>> },
    /// Density `exp(-|x|/b) / 2b`.
    Laplace { scale: f64 },
    /// `x_t = φ x_{t-1} + ε_t + θ ε_{t-1}` driven by i.i.d. `innovation`.
    Arma11 { phi: f64, theta: f64, innovation: Box<Distribution> },
}

impl Distribution {
    pub fn dim(&self) -> usize {
        match self {
            Distribution::MvNormal { mean, .. } | Distribution::MvT { mean, .. } => mean.len(),
            _ => 1,
        }
    }

    /// Short label used in report tables.
    pub fn label(&self) -> String {
        match self {
            Distribution::Normal { mean, sd } => format!("N({mean},sd={sd})"),
            Distribution::MvNormal { mean, .. } => format!("MVN_{}", mean.len()),
            Distribution::PoissonAdjusted { lambda } => format!("Pois({lambda})-{lambda}"),
            Distribution::StudentT { df } => format!("t({df})"),
            Distribution::MvT { df, mean, .. } => format!("MVt_{}({df})", mean.len()),
            Distribution::Laplace { scale } => format!("Laplace({scale})"),
            Distribution::Arma11 { phi, theta, innovation } => {
                format!("ARMA({phi},{theta})[{}]", innovation.label())
            }
        }
    }
}

/// Simulated series with known change points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub length: usize,
    /// 1-based first index of each new regime.
    pub change_points: Vec<usize>,
    pub segments: Vec<Distribution>,
    #[serde(default = "default_burn_in")]
    pub arma_burn_in: usize,
}

fn default_burn_in() -> usize {
    100
}

impl ScenarioSpec {
    pub fn new(name: impl Into<String>, length: usize, change_points: Vec<usize>, segments: Vec<Distribution>) -> Self {
        Self { name: name.into(), length, change_points, segments, arma_burn_in: default_burn_in() }
    }

    pub fn dim(&self) -> usize {
        self.segments.first().map_or(0, Distribution::dim)
    }

    /// `F1 -> F2 -> …` description.
    pub fn label(&self) -> String {
        self.segments.iter().map(Distribution::label).collect::<Vec<_>>().join(" -> ")
    }

    pub fn validate(&self) -> Result<()> {
        self.prepare().map(|_| ())
    }

    fn prepare(&self) -> Result<Vec<Sampler>> {
        if self.segments.len() != self.change_points.len() + 1 {
            return Err(Error::InvalidSpec(format!(
                "{} segments for {} change points",
                self.segments.len(),
                self.change_points.len()
            )));
        }
        let mut prev = 1;
        for &tau in &self.change_points {
            if tau <= prev || tau > self.length {
                return Err(Error::InvalidSpec(format!(
                    "change point {tau} is not increasing within 2..={}",
                    self.length
                )));
            }
            prev = tau;
        }
        let dim = self.dim();
        if self.segments.iter().any(|d| d.dim() != dim) {
            return Err(Error::InvalidSpec("segments have different dimensions".into()));
        }
        self.segments.iter().map(Sampler::new).collect()
    }
}

/// A distribution with its parameters checked and factorised.
#[derive(Clone, Debug)]
enum Sampler {
    Normal { mean: f64, sd: f64 },
    MvNormal { mean: DVector<f64>, chol: DMatrix<f64> },
    Poisson { lambda: f64, dist: Poisson<f64> },
    StudentT(StudentT<f64>),
    MvT { df: f64, chi2: ChiSquared<f64>, mean: DVector<f64>, chol: DMatrix<f64> },
    Laplace { scale: f64 },
    Arma { phi: f64, theta: f64, innovation: Box<Sampler> },
}

fn cholesky(mean: &[f64], cov: &[Vec<f64>]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let d = mean.len();
    if d == 0 || cov.len() != d || cov.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidSpec("covariance shape does not match the mean".into()));
    }
    let m = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
    if (0..d).any(|i| (0..d).any(|j| m[(i, j)] != m[(j, i)])) {
        return Err(Error::InvalidSpec("covariance is not symmetric".into()));
    }
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::InvalidSpec("covariance is not positive definite".into()))?;
    Ok((DVector::from_column_slice(mean), chol.l()))
}

fn non_negative(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidSpec(format!("{what} must be non-negative and finite, got {v}")))
    }
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidSpec(format!("{what} must be positive and finite, got {v}")))
    }
}

impl Sampler {
    fn new(dist: &Distribution) -> Result<Self> {
        Ok(match dist {
            Distribution::Normal { mean, sd } => Sampler::Normal { mean: *mean, sd: non_negative(*sd, "sd")? },
            Distribution::MvNormal { mean, cov } => {
                let (mean, chol) = cholesky(mean, cov)?;
                Sampler::MvNormal { mean, chol }
            }
            Distribution::PoissonAdjusted { lambda } => {
                let lambda = positive(*lambda, "lambda")?;
                let dist = Poisson::new(lambda).map_err(|e| Error::InvalidSpec(e.to_string()))?;
                Sampler::Poisson { lambda, dist }
            }
            Distribution::StudentT { df } => Sampler::StudentT(
                StudentT::new(positive(*df, "df")?).map_err(|e| Error::InvalidSpec(e.to_string()))?,
            ),
            Distribution::MvT { df, mean, cov } => {
                let df = positive(*df, "df")?;
                let (mean, chol) = cholesky(mean, cov)?;
                let chi2 = ChiSquared::new(df).map_err(|e| Error::InvalidSpec(e.to_string()))?;
                Sampler::MvT { df, chi2, mean, chol }
            }
            Distribution::Laplace { scale } => Sampler::Laplace { scale: positive(*scale, "scale")? },
            Distribution::Arma11 { phi, theta, innovation } => {
                if innovation.dim() != 1 || matches!(**innovation, Distribution::Arma11 { .. }) {
                    return Err(Error::InvalidSpec("ARMA innovations must be univariate i.i.d.".into()));
                }
                if !phi.is_finite() || !theta.is_finite() {
                    return Err(Error::InvalidSpec("ARMA coefficients must be finite".into()));
                }
                Sampler::Arma { phi: *phi, theta: *theta, innovation: Box::new(Sampler::new(innovation)?) }
            }
        })
    }

    /// Appends one i.i.d. draw.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        match self {
            Sampler::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                out.push(mean + sd * z);
            }
            Sampler::MvNormal { mean, chol } => {
                let z = DVector::from_fn(mean.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
                out.extend((mean + chol * z).iter());
            }
            Sampler::Poisson { lambda, dist } => out.push(dist.sample(rng) - lambda),
            Sampler::StudentT(t) => out.push(t.sample(rng)),
            Sampler::MvT { df, chi2, mean, chol } => {
                let z = DVector::from_fn(mean.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
                let w: f64 = chi2.sample(rng);
                let scale = 1.0 / (w / df).sqrt();
                out.extend((mean + chol * z * scale).iter());
            }
            Sampler::Laplace { scale } => {
                let e: f64 = rng.sample(Exp1);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                out.push(sign * scale * e);
            }
            Sampler::Arma { innovation, .. } => innovation.draw(rng, out),
        }
    }

    fn draw_scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut buf = Vec::with_capacity(1);
        self.draw(rng, &mut buf);
        buf[0]
    }
}

/// Draws one realisation of `spec` from a seeded ChaCha8 stream.
pub fn generate(spec: &ScenarioSpec, seed: u64) -> Result<TimeSeries> {
    generate_with(spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn generate_with<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<TimeSeries> {
    let samplers = spec.prepare()?;
    let dim = spec.dim();
    let mut values = Vec::with_capacity(spec.length * dim);
    // ARMA state (x_{t-1}, ε_{t-1}); survives across consecutive ARMA segments.
    let mut arma_state: Option<(f64, f64)> = None;
    let mut seg = 0;
    for t in 1..=spec.length {
        while seg < spec.change_points.len() && t >= spec.change_points[seg] {
            seg += 1;
        }
        match &samplers[seg] {
            Sampler::Arma { phi, theta, innovation } => {
                let (mut x, mut eps) = match arma_state {
                    Some(state) => state,
                    None => {
                        let mut state = (0.0, 0.0);
                        for _ in 0..spec.arma_burn_in {
                            let e = innovation.draw_scalar(rng);
                            state = (phi * state.0 + e + theta * state.1, e);
                        }
                        state
                    }
                };
                let e = innovation.draw_scalar(rng);
                x = phi * x + e + theta * eps;
                eps = e;
                arma_state = Some((x, eps));
                values.push(x);
            }
            iid => {
                arma_state = None;
                iid.draw(rng, &mut values);
            }
        }
    }
    TimeSeries::from_flat(values, dim)
}
