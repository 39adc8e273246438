//! Monte Carlo accuracy benchmarks over simulated scenarios.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dgp::{generate_with, ScenarioSpec};
use crate::cpd::{DetectorKind, SeriesKind};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pipeline::{run_plan, DetectionPlan};

/// Random stream of replication `index` under a root seed.
///
/// Every replication reads its own ChaCha8 stream, so draws never depend on
/// how replications are scheduled.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub exec: Execution,
}

/// Accuracy of one detection plan over all replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub scenario: String,
    pub distributions: String,
    pub detector: DetectorKind,
    pub series: SeriesKind,
    /// Window size and PCA coordinates; `None` for raw-series plans.
    pub window: Option<usize>,
    pub pca_m: Option<usize>,
    pub replications: usize,
    pub failures: usize,
    pub mae: f64,
    /// Sample variance of the absolute errors.
    pub ae_variance: f64,
    pub abs_errors: Vec<f64>,
}

impl BenchmarkReport {
    fn from_errors(scenario: &ScenarioSpec, plan: &DetectionPlan, outcomes: Vec<Option<f64>>) -> Self {
        let replications = outcomes.len();
        let abs_errors: Vec<f64> = outcomes.into_iter().flatten().collect();
        let ok = abs_errors.len() as f64;
        let mae = if ok > 0.0 { abs_errors.iter().sum::<f64>() / ok } else { f64::NAN };
        let ae_variance = if ok > 1.0 {
            abs_errors.iter().map(|e| (e - mae) * (e - mae)).sum::<f64>() / (ok - 1.0)
        } else {
            0.0
        };
        let tda = plan.series == SeriesKind::Tda;
        Self {
            scenario: scenario.name.clone(),
            distributions: scenario.label(),
            detector: plan.detector.kind,
            series: plan.series,
            window: tda.then_some(plan.tda.window),
            pca_m: tda.then_some(plan.tda.pca_m),
            replications,
            failures: replications - abs_errors.len(),
            mae,
            ae_variance,
            abs_errors,
        }
    }
}

/// Mean absolute error between estimates and a true change point.
pub fn mean_absolute_error(estimates: &[usize], truth: usize) -> f64 {
    estimates.iter().map(|&e| e.abs_diff(truth) as f64).sum::<f64>() / estimates.len() as f64
}

/// Runs every plan on the same `R` simulated series, single change mode.
///
/// Replications whose detector fails are excluded from the error summary
/// and counted in `failures`.
pub fn monte_carlo(
    scenario: &ScenarioSpec,
    plans: &[DetectionPlan],
    cfg: &MonteCarloConfig,
) -> Result<Vec<BenchmarkReport>> {
    scenario.validate()?;
    if cfg.replications == 0 {
        return Err(Error::invalid_input("at least one replication is required"));
    }
    let truth = match scenario.change_points.as_slice() {
        [tau] => *tau,
        other => {
            return Err(Error::InvalidSpec(format!(
                "single change mode needs exactly one change point, scenario has {}",
                other.len()
            )))
        }
    };
    // Replications are spread over threads; plans within one run sequentially.
    let per_rep: Vec<Vec<Option<f64>>> = cfg.exec.map_range(cfg.replications, |r| {
        let mut rng = replication_rng(cfg.seed, r as u64);
        let series = match generate_with(scenario, &mut rng) {
            Ok(s) => s,
            Err(_) => return vec![None; plans.len()],
        };
        plans
            .iter()
            .map(|plan| match run_plan(&series, plan, Execution::Sequential) {
                Ok(out) => out.change_points.first().map(|&t| t.abs_diff(truth) as f64),
                Err(e) => {
                    log::debug!("replication {r} failed: {e}");
                    None
                }
            })
            .collect()
    });
    Ok(plans
        .iter()
        .enumerate()
        .map(|(p, plan)| {
            let outcomes = per_rep.iter().map(|row| row[p]).collect();
            BenchmarkReport::from_errors(scenario, plan, outcomes)
        })
        .collect())
}
