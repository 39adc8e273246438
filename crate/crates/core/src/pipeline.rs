//! Running a detector on the raw series or on its topological signature.

use serde::{Deserialize, Serialize};

use crate::cpd::{run_detector, DetectionResult, DetectorConfig, SeriesKind};
use crate::embedding::{tda_transform_detailed, TdaConfig, TdaTransform};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::TimeSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionPlan {
    pub series: SeriesKind,
    pub tda: TdaConfig,
    pub detector: DetectorConfig,
    /// Shift signature indices by `(w - 1) / 2` when mapping back to the
    /// input series. Off by default: signature index `t` maps to `t`.
    #[serde(default)]
    pub center_offset: bool,
}

impl DetectionPlan {
    /// Offset added to change points found on the signature series.
    pub fn tda_offset(&self) -> usize {
        if self.center_offset {
            (self.tda.window - 1) / 2
        } else {
            0
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlanOutcome {
    /// Result in the index space of the series the detector saw.
    pub result: DetectionResult,
    /// Change points in the index space of the input series.
    pub change_points: Vec<usize>,
    pub transform: Option<TdaTransform>,
}

pub fn run_plan(series: &TimeSeries, plan: &DetectionPlan, exec: Execution) -> Result<PlanOutcome> {
    match plan.series {
        SeriesKind::Raw => {
            let result = run_detector(series, &plan.detector, exec)?;
            Ok(PlanOutcome { change_points: result.change_points.clone(), result, transform: None })
        }
        SeriesKind::Tda => {
            if plan.detector.kind.univariate_only() && plan.tda.pca_m != 1 {
                return Err(Error::Unsupported(format!(
                    "{} needs a univariate signature (PCA coordinates = 1), got {}",
                    plan.detector.kind, plan.tda.pca_m
                )));
            }
            let transform = tda_transform_detailed(series, &plan.tda, exec)?;
            let mut result = run_detector(&transform.derived.values, &plan.detector, exec)?;
            result.series_kind = SeriesKind::Tda;
            let offset = plan.tda_offset();
            let change_points = result.change_points.iter().map(|&t| t + offset).collect();
            Ok(PlanOutcome { result, change_points, transform: Some(transform) })
        }
    }
}
