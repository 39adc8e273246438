//! Nonparametric change point detectors.
//!
//! Every detector reports change points as 1-based positions of the first
//! observation of the new regime, in the index space of the series it ran
//! on. A split with prefix length `s` is therefore reported as `s + 1`.

mod bartlett;
mod cvm;
mod energy;

pub use bartlett::{bartlett_single_change, bartlett_statistic};
pub use cvm::{cvm_null_moments, cvm_single_change, cvm_two_sample, CvmConfig, NullMoments};
pub use energy::{
    best_single_split, e_divisive, e_divisive_with, energy_divergence, EnergyConfig, SplitSearch,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    EDivisive,
    Cvm,
    Bartlett,
}

impl DetectorKind {
    /// Whether the detector only accepts univariate input.
    pub fn univariate_only(self) -> bool {
        !matches!(self, DetectorKind::EDivisive)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorKind::EDivisive => "e-divisive",
            DetectorKind::Cvm => "cvm",
            DetectorKind::Bartlett => "bartlett",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e-divisive" | "edivisive" | "energy" => Ok(DetectorKind::EDivisive),
            "cvm" => Ok(DetectorKind::Cvm),
            "bartlett" => Ok(DetectorKind::Bartlett),
            other => Err(Error::invalid_input(format!("unknown detector `{other}`"))),
        }
    }
}

/// Which series a detector ran on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    #[default]
    Raw,
    Tda,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::Raw => "raw",
            SeriesKind::Tda => "tda",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" | "original" => Ok(SeriesKind::Raw),
            "tda" | "derived" => Ok(SeriesKind::Tda),
            other => Err(Error::invalid_input(format!("unknown series kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    /// Sorted 1-based first indices of each new regime.
    pub change_points: Vec<usize>,
    /// Test statistic at each change point, aligned with `change_points`.
    pub statistics: Vec<f64>,
    /// Permutation p-values, when requested.
    pub p_values: Option<Vec<f64>>,
    pub series_kind: SeriesKind,
    pub detector: DetectorKind,
}

/// Detector choice plus the knobs every detector understands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub kind: DetectorKind,
    pub min_segment: usize,
    pub k: usize,
    pub alpha: f64,
    pub permutations: usize,
    pub seed: u64,
    pub cvm_moments: NullMoments,
    #[serde(default)]
    pub energy_search: SplitSearch,
}

impl DetectorConfig {
    pub fn new(kind: DetectorKind) -> Self {
        Self {
            kind,
            min_segment: 30,
            k: 1,
            alpha: 1.0,
            permutations: 0,
            seed: 0,
            cvm_moments: NullMoments::ClosedForm,
            energy_search: SplitSearch::Suffix,
        }
    }

    pub fn energy(&self) -> EnergyConfig {
        EnergyConfig {
            alpha: self.alpha,
            min_segment: self.min_segment,
            k: self.k,
            permutations: self.permutations,
            seed: self.seed,
            search: self.energy_search,
        }
    }
}

/// Runs the configured detector on `series`.
pub fn run_detector(
    series: &crate::series::TimeSeries,
    cfg: &DetectorConfig,
    exec: crate::exec::Execution,
) -> Result<DetectionResult> {
    let single_only = |name: &str| -> Result<()> {
        if cfg.k != 1 {
            return Err(Error::Unsupported(format!("{name} locates a single change point; k = {}", cfg.k)));
        }
        Ok(())
    };
    match cfg.kind {
        DetectorKind::EDivisive => e_divisive_with(series, &cfg.energy(), exec),
        DetectorKind::Cvm => {
            single_only("CvM CPM")?;
            cvm_single_change(series, &CvmConfig { min_segment: cfg.min_segment, moments: cfg.cvm_moments })
        }
        DetectorKind::Bartlett => {
            single_only("Bartlett")?;
            bartlett_single_change(series, cfg.min_segment)
        }
    }
}

/// First index wins on ties.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if !(v > b) => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

pub(crate) fn check_min_segment(len: usize, min_segment: usize, what: &str) -> Result<()> {
    if len < 2 * min_segment {
        return Err(Error::invalid_input(format!(
            "{what}: series of length {len} is shorter than twice the minimum segment {min_segment}"
        )));
    }
    Ok(())
}
