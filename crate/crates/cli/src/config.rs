//! Pipeline configuration: file format, flag overrides and resolution
//! against a concrete series.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tdacpd::cpd::{DetectorConfig, DetectorKind, NullMoments, SeriesKind, SplitSearch};
use tdacpd::{DetectionPlan, ScaleGrid, TdaConfig};

use crate::error::{CliError, Result};

/// Transformation applied before detection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Preprocessing {
    #[default]
    None,
    Difference(usize),
    Ar(usize),
}

impl Preprocessing {
    /// Observations lost at the start of the series.
    pub fn offset(self) -> usize {
        match self {
            Preprocessing::None => 0,
            Preprocessing::Difference(order) => order,
            Preprocessing::Ar(p) => p,
        }
    }
}

impl fmt::Display for Preprocessing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preprocessing::None => f.write_str("none"),
            Preprocessing::Difference(1) => f.write_str("diff"),
            Preprocessing::Difference(d) => write!(f, "diff:{d}"),
            Preprocessing::Ar(p) => write!(f, "ar:{p}"),
        }
    }
}

impl FromStr for Preprocessing {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s.as_str(), None),
        };
        let number = |a: Option<&str>, default: Option<usize>| -> Result<usize> {
            match (a, default) {
                (Some(a), _) => a
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad preprocessing order in {s:?}"))),
                (None, Some(d)) => Ok(d),
                (None, None) => Err(CliError::Config(format!("preprocessing {s:?} needs an order, e.g. ar:6"))),
            }
        };
        match head {
            "none" if arg.is_none() => Ok(Preprocessing::None),
            "diff" | "difference" => match number(arg, Some(1))? {
                0 => Ok(Preprocessing::None),
                d => Ok(Preprocessing::Difference(d)),
            },
            "ar" => Ok(Preprocessing::Ar(number(arg, None)?)),
            _ => Err(CliError::Config(format!("unknown preprocessing {s:?}; use none, diff or ar:p"))),
        }
    }
}

impl TryFrom<String> for Preprocessing {
    type Error = CliError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Preprocessing> for String {
    fn from(p: Preprocessing) -> Self {
        p.to_string()
    }
}

/// Uniform scale grid `0, step, 2·step, …`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub scales: usize,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { scales: 50, step: 0.01 }
    }
}

/// Configuration as written by the user; unset fields are filled in by
/// [`PipelineConfig::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub window: Option<usize>,
    pub grid: GridSpec,
    pub pca_m: Option<usize>,
    pub detector: DetectorKind,
    pub series: SeriesKind,
    pub preprocessing: Preprocessing,
    pub min_segment: usize,
    pub k: usize,
    pub alpha: f64,
    pub permutations: usize,
    pub seed: Option<u64>,
    pub center_offset: bool,
    pub energy_search: SplitSearch,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window: None,
            grid: GridSpec::default(),
            pca_m: None,
            detector: DetectorKind::EDivisive,
            series: SeriesKind::Tda,
            preprocessing: Preprocessing::None,
            min_segment: 30,
            k: 1,
            alpha: 1.0,
            permutations: 0,
            seed: None,
            center_offset: false,
            energy_search: SplitSearch::Suffix,
        }
    }
}

/// Flag values that replace fields of a loaded configuration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub window: Option<usize>,
    pub pca_m: Option<usize>,
    pub detector: Option<DetectorKind>,
    pub series: Option<SeriesKind>,
    pub preprocessing: Option<Preprocessing>,
    pub min_segment: Option<usize>,
    pub k: Option<usize>,
    pub permutations: Option<usize>,
    pub seed: Option<u64>,
    pub center_offset: Option<bool>,
    pub energy_search: Option<SplitSearch>,
}

/// Default window: 5% of the series length, at least 5.
pub fn default_window(len: usize) -> usize {
    ((0.05 * len as f64).round() as usize).max(5)
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = o.$field {
                    self.$field = v;
                }
            )*};
        }
        set!(detector, series, preprocessing, min_segment, k, permutations, center_offset, energy_search);
        if o.window.is_some() {
            self.window = o.window;
        }
        if o.pca_m.is_some() {
            self.pca_m = o.pca_m;
        }
        if o.seed.is_some() {
            self.seed = o.seed;
        }
    }

    /// Fills defaults for a series of `len` observations and checks that
    /// the pieces fit together.
    pub fn resolve(&self, len: usize) -> Result<ResolvedConfig> {
        let univariate = self.detector.univariate_only();
        let pca_m = match self.pca_m {
            Some(m) if univariate && m != 1 && self.series == SeriesKind::Tda => {
                return Err(CliError::Config(format!(
                    "{} needs a univariate signature; pca_m must be 1, got {m}",
                    self.detector
                )))
            }
            Some(0) => return Err(CliError::Config("pca_m must be at least 1".into())),
            Some(m) => m,
            None if univariate => 1,
            None => 3,
        };
        if pca_m > self.grid.scales {
            return Err(CliError::Config(format!(
                "pca_m = {pca_m} exceeds the {} grid scales",
                self.grid.scales
            )));
        }
        let window = self.window.unwrap_or_else(|| default_window(len));
        if window < 2 {
            return Err(CliError::Config(format!("window must be at least 2, got {window}")));
        }
        if self.k == 0 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        if univariate && self.k != 1 {
            return Err(CliError::Config(format!("{} locates a single change point; k must be 1", self.detector)));
        }
        ScaleGrid::uniform(self.grid.scales, self.grid.step)?;
        Ok(ResolvedConfig {
            window,
            grid: self.grid,
            pca_m,
            detector: self.detector,
            series: self.series,
            preprocessing: self.preprocessing,
            min_segment: self.min_segment,
            k: self.k,
            alpha: self.alpha,
            permutations: self.permutations,
            seed: self.seed.unwrap_or_else(rand::random),
            center_offset: self.center_offset,
            energy_search: self.energy_search,
        })
    }
}

/// Fully specified configuration echoed into every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub window: usize,
    pub grid: GridSpec,
    pub pca_m: usize,
    pub detector: DetectorKind,
    pub series: SeriesKind,
    pub preprocessing: Preprocessing,
    pub min_segment: usize,
    pub k: usize,
    pub alpha: f64,
    pub permutations: usize,
    pub seed: u64,
    pub center_offset: bool,
    pub energy_search: SplitSearch,
}

impl ResolvedConfig {
    pub fn scale_grid(&self) -> Result<ScaleGrid> {
        Ok(ScaleGrid::uniform(self.grid.scales, self.grid.step)?)
    }

    pub fn tda(&self) -> Result<TdaConfig> {
        Ok(TdaConfig { window: self.window, grid: self.scale_grid()?, pca_m: self.pca_m })
    }

    pub fn plan(&self) -> Result<DetectionPlan> {
        let mut detector = DetectorConfig::new(self.detector);
        detector.min_segment = self.min_segment;
        detector.k = self.k;
        detector.alpha = self.alpha;
        detector.permutations = self.permutations;
        detector.seed = self.seed;
        detector.cvm_moments = NullMoments::ClosedForm;
        detector.energy_search = self.energy_search;
        Ok(DetectionPlan { series: self.series, tda: self.tda()?, detector, center_offset: self.center_offset })
    }

    /// Compact JSON used for the `# config = …` provenance line.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
