//! Monte Carlo sweeps over scenarios × detectors × (window, PCA) grids.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tdacpd::cpd::{DetectorConfig, DetectorKind, SeriesKind, SplitSearch};
use tdacpd::simulate::presets::{self, ScaleNotation};
use tdacpd::simulate::{monte_carlo, MonteCarloConfig, ScenarioSpec};
use tdacpd::{DetectionPlan, Execution, TdaConfig};

use crate::config::GridSpec;
use crate::error::{CliError, Result};
use crate::output::{num, write_atomic, write_json, CsvTable};

/// Sweep description, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub name: String,
    pub replications: usize,
    pub seed: Option<u64>,
    /// Reading of `N(μ, s)` in the built-in scenarios.
    pub notation: ScaleNotation,
    /// Built-in scenario names.
    pub presets: Vec<String>,
    pub scenarios: Vec<ScenarioSpec>,
    pub detectors: Vec<DetectorKind>,
    pub series: Vec<SeriesKind>,
    /// Absolute window sizes.
    pub windows: Vec<usize>,
    /// Window sizes as a percentage of the series length.
    pub window_percent: Vec<f64>,
    /// PCA coordinates for detectors that accept multivariate input;
    /// univariate detectors always use one.
    pub pca: Vec<usize>,
    pub grid: GridSpec,
    pub min_segment: usize,
    pub alpha: f64,
    pub energy_search: SplitSearch,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            name: "sweep".into(),
            replications: 200,
            seed: None,
            notation: ScaleNotation::Variance,
            presets: Vec::new(),
            scenarios: Vec::new(),
            detectors: vec![DetectorKind::EDivisive, DetectorKind::Cvm],
            series: vec![SeriesKind::Raw, SeriesKind::Tda],
            windows: Vec::new(),
            window_percent: Vec::new(),
            pca: vec![3],
            grid: GridSpec::default(),
            min_segment: 30,
            alpha: 1.0,
            energy_search: SplitSearch::Suffix,
        }
    }
}

/// Built-in sweeps mirroring the published tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Variance changes, windows 5 and 10.
    Table1,
    /// Distributional changes, windows 2.5% and 5%.
    Table2,
}

impl std::str::FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table1" => Ok(Preset::Table1),
            "table2" => Ok(Preset::Table2),
            _ => Err(CliError::Config(format!("unknown preset {s:?}; use table1 or table2"))),
        }
    }
}

impl SweepSpec {
    pub fn preset(preset: Preset) -> Self {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        match preset {
            Preset::Table1 => Self {
                name: "table1".into(),
                presets: names(&presets::NAMES[..4]),
                detectors: vec![DetectorKind::EDivisive, DetectorKind::Cvm, DetectorKind::Bartlett],
                windows: vec![5, 10],
                pca: vec![3, 5],
                ..Self::default()
            },
            Preset::Table2 => Self {
                name: "table2".into(),
                presets: names(&presets::NAMES[4..]),
                window_percent: vec![2.5, 5.0],
                pca: vec![3, 5],
                ..Self::default()
            },
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    fn all_scenarios(&self) -> Result<Vec<ScenarioSpec>> {
        let mut out = Vec::new();
        for name in &self.presets {
            out.push(presets::by_name(name, self.notation).ok_or_else(|| {
                CliError::Config(format!("unknown scenario {name:?}; known: {}", presets::NAMES.join(", ")))
            })?);
        }
        out.extend(self.scenarios.iter().cloned());
        if out.is_empty() {
            return Err(CliError::Config("sweep lists no scenarios".into()));
        }
        Ok(out)
    }
}

/// One row of a benchmark report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub scenario: String,
    pub distributions: String,
    pub detector: DetectorKind,
    pub series: SeriesKind,
    pub window: Option<usize>,
    pub window_percent: Option<f64>,
    pub pca: Option<usize>,
    pub replications: usize,
    pub failures: usize,
    pub mae: Option<f64>,
    pub ae_variance: Option<f64>,
    /// Empty when the cell ran.
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkArtifact {
    /// The sweep with its seed filled in.
    pub spec: SweepSpec,
    pub cells: Vec<Cell>,
    /// Contents of `combined.csv`.
    pub combined_csv: String,
}

struct Planned {
    cell: Cell,
    plan: Option<DetectionPlan>,
}

fn plan_cells(spec: &SweepSpec, scenario: &ScenarioSpec) -> Result<Vec<Planned>> {
    let len = scenario.length;
    let mut windows: Vec<(usize, Option<f64>)> = spec.windows.iter().map(|&w| (w, None)).collect();
    windows.extend(spec.window_percent.iter().map(|&p| (((p / 100.0) * len as f64).round() as usize, Some(p))));
    let grid = tdacpd::ScaleGrid::uniform(spec.grid.scales, spec.grid.step)?;
    let base = |detector: DetectorKind, series| Cell {
        scenario: scenario.name.clone(),
        distributions: scenario.label(),
        detector,
        series,
        window: None,
        window_percent: None,
        pca: None,
        replications: spec.replications,
        failures: 0,
        mae: None,
        ae_variance: None,
        skipped: None,
    };
    let mut out = Vec::new();
    for &kind in &spec.detectors {
        let mut detector = DetectorConfig::new(kind);
        detector.min_segment = spec.min_segment;
        detector.alpha = spec.alpha;
        detector.energy_search = spec.energy_search;
        for &series in &spec.series {
            match series {
                SeriesKind::Raw => {
                    let mut cell = base(kind, series);
                    let plan = if kind.univariate_only() && scenario.dim() > 1 {
                        cell.skipped = Some(format!("{kind} does not support multivariate time series"));
                        None
                    } else {
                        Some(DetectionPlan {
                            series,
                            tda: TdaConfig::new(2, 1),
                            detector: detector.clone(),
                            center_offset: false,
                        })
                    };
                    out.push(Planned { cell, plan });
                }
                SeriesKind::Tda => {
                    let pcas = if kind.univariate_only() { vec![1] } else { spec.pca.clone() };
                    for &(w, pct) in &windows {
                        for &m in &pcas {
                            let mut cell = Cell { window: Some(w), window_percent: pct, pca: Some(m), ..base(kind, series) };
                            let reason = if w < 2 || w > len {
                                Some(format!("window {w} outside 2..={len}"))
                            } else if m == 0 || m > spec.grid.scales {
                                Some(format!("pca {m} outside 1..={}", spec.grid.scales))
                            } else {
                                None
                            };
                            let plan = reason.is_none().then(|| DetectionPlan {
                                series,
                                tda: TdaConfig { window: w, grid: grid.clone(), pca_m: m },
                                detector: detector.clone(),
                                center_offset: false,
                            });
                            cell.skipped = reason;
                            out.push(Planned { cell, plan });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Runs every feasible cell; all plans of a scenario share the simulated series.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<(SweepSpec, Vec<Cell>)> {
    if spec.replications == 0 {
        return Err(CliError::Config("replications must be at least 1".into()));
    }
    let mut resolved = spec.clone();
    let seed = *resolved.seed.get_or_insert_with(rand::random);
    let mut cells = Vec::new();
    for scenario in spec.all_scenarios()? {
        let planned = plan_cells(spec, &scenario)?;
        let plans: Vec<DetectionPlan> = planned.iter().filter_map(|p| p.plan.clone()).collect();
        let cfg = MonteCarloConfig { replications: spec.replications, seed, exec };
        let mut reports = if plans.is_empty() { Vec::new() } else { monte_carlo(&scenario, &plans, &cfg)? }.into_iter();
        for p in planned {
            let mut cell = p.cell;
            if p.plan.is_some() {
                let r = reports.next().expect("one report per plan");
                cell.failures = r.failures;
                cell.mae = Some(r.mae);
                cell.ae_variance = Some(r.ae_variance);
            }
            cells.push(cell);
        }
    }
    Ok((resolved, cells))
}

const COLUMNS: &[&str] = &[
    "scenario",
    "distributions",
    "window",
    "window_percent",
    "detector",
    "series",
    "pca",
    "replications",
    "failures",
    "mae",
    "ae_variance",
    "status",
    "reason",
];

fn table<'a>(config_json: &str, cells: impl Iterator<Item = &'a Cell>) -> CsvTable {
    let header: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut t = CsvTable::new(config_json, &header);
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for c in cells {
        t.row([
            c.scenario.clone(),
            c.distributions.clone(),
            opt(c.window),
            c.window_percent.map(num).unwrap_or_default(),
            c.detector.to_string(),
            c.series.to_string(),
            opt(c.pca),
            c.replications.to_string(),
            c.failures.to_string(),
            c.mae.map(num).unwrap_or_default(),
            c.ae_variance.map(num).unwrap_or_default(),
            if c.skipped.is_some() { "skipped" } else { "ok" }.to_string(),
            c.skipped.clone().unwrap_or_default(),
        ]);
    }
    t
}

/// Writes one CSV per scenario, `combined.csv` and `benchmark.json`.
pub fn write_benchmark(spec: &SweepSpec, cells: &[Cell], out: &Path) -> Result<Vec<PathBuf>> {
    let config = serde_json::to_string(spec).expect("sweep serializes");
    let mut written = Vec::new();
    let mut names: Vec<&str> = Vec::new();
    for c in cells {
        if !names.contains(&c.scenario.as_str()) {
            names.push(&c.scenario);
        }
    }
    for name in names {
        let path = out.join(format!("{name}.csv"));
        table(&config, cells.iter().filter(|c| c.scenario == name)).write(&path)?;
        written.push(path);
    }
    let combined = table(&config, cells.iter()).into_bytes();
    let path = out.join("combined.csv");
    write_atomic(&path, &combined)?;
    written.push(path);
    let artifact = BenchmarkArtifact {
        spec: spec.clone(),
        cells: cells.to_vec(),
        combined_csv: String::from_utf8(combined).expect("csv is utf-8"),
    };
    let json = out.join("benchmark.json");
    write_json(&json, &crate::Artifact::Benchmark(artifact))?;
    written.push(json);
    Ok(written)
}
