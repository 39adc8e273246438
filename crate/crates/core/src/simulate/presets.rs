//! The published simulation scenarios (series length 200, one change at 100).

use serde::{Deserialize, Serialize};

use super::dgp::{Distribution, ScenarioSpec};

pub const LENGTH: usize = 200;
pub const CHANGE_POINT: usize = 100;

/// How the second parameter of `N(μ, s)` is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleNotation {
    StdDev,
    #[default]
    Variance,
}

impl ScaleNotation {
    fn sd(self, s: f64) -> f64 {
        match self {
            ScaleNotation::StdDev => s,
            ScaleNotation::Variance => s.sqrt(),
        }
    }
}

fn normal(notation: ScaleNotation, s: f64) -> Distribution {
    Distribution::Normal { mean: 0.0, sd: notation.sd(s) }
}

fn identity3() -> Vec<Vec<f64>> {
    (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn equicorrelated3() -> Vec<Vec<f64>> {
    (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.9 }).collect()).collect()
}

fn single(name: &str, before: Distribution, after: Distribution) -> ScenarioSpec {
    ScenarioSpec::new(name, LENGTH, vec![CHANGE_POINT], vec![before, after])
}

pub fn normal_variance(notation: ScaleNotation) -> ScenarioSpec {
    single("normal-variance", normal(notation, 1.0), normal(notation, 2.0))
}

pub fn mvnormal_covariance() -> ScenarioSpec {
    single(
        "mvnormal-covariance",
        Distribution::MvNormal { mean: vec![0.0; 3], cov: identity3() },
        Distribution::MvNormal { mean: vec![0.0; 3], cov: equicorrelated3() },
    )
}

pub fn poisson_variance() -> ScenarioSpec {
    single(
        "poisson-variance",
        Distribution::PoissonAdjusted { lambda: 1.0 },
        Distribution::PoissonAdjusted { lambda: 2.0 },
    )
}

pub fn arma_error_variance(notation: ScaleNotation) -> ScenarioSpec {
    let arma = |innovation| Distribution::Arma11 { phi: 0.4, theta: 0.5, innovation: Box::new(innovation) };
    single("arma-error-variance", arma(normal(notation, 1.0)), arma(normal(notation, 2.0)))
}

pub fn normal_to_t() -> ScenarioSpec {
    single("normal-to-t4", normal(ScaleNotation::StdDev, 1.0), Distribution::StudentT { df: 4.0 })
}

pub fn mvnormal_to_mvt() -> ScenarioSpec {
    single(
        "mvnormal-to-mvt2",
        Distribution::MvNormal { mean: vec![0.0; 3], cov: identity3() },
        Distribution::MvT { df: 2.0, mean: vec![0.0; 3], cov: equicorrelated3() },
    )
}

pub fn normal_to_laplace() -> ScenarioSpec {
    single(
        "normal-to-laplace",
        normal(ScaleNotation::StdDev, 1.0),
        Distribution::Laplace { scale: 0.5f64.sqrt() },
    )
}

/// Variance-change scenarios.
pub fn table1(notation: ScaleNotation) -> Vec<ScenarioSpec> {
    vec![
        normal_variance(notation),
        mvnormal_covariance(),
        poisson_variance(),
        arma_error_variance(notation),
    ]
}

/// Distributional-change scenarios.
pub fn table2() -> Vec<ScenarioSpec> {
    vec![normal_to_t(), mvnormal_to_mvt(), normal_to_laplace()]
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "normal-variance",
    "mvnormal-covariance",
    "poisson-variance",
    "arma-error-variance",
    "normal-to-t4",
    "mvnormal-to-mvt2",
    "normal-to-laplace",
];

pub fn by_name(name: &str, notation: ScaleNotation) -> Option<ScenarioSpec> {
    Some(match name {
        "normal-variance" => normal_variance(notation),
        "mvnormal-covariance" => mvnormal_covariance(),
        "poisson-variance" => poisson_variance(),
        "arma-error-variance" => arma_error_variance(notation),
        "normal-to-t4" => normal_to_t(),
        "mvnormal-to-mvt2" => mvnormal_to_mvt(),
        "normal-to-laplace" => normal_to_laplace(),
        _ => return None,
    })
}
