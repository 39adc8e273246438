//! `detect` and `transform`: one series through the pipeline.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tdacpd::embedding::{tda_transform_detailed, TdaTransform};
use tdacpd::prewhiten::{ar_residuals, difference, fit_ar};
use tdacpd::{run_plan, Execution, TimeSeries};

use crate::config::{Preprocessing, ResolvedConfig};
use crate::error::{CliError, Result};
use crate::ingest::LabeledSeries;
use crate::output::{num, write_json, CsvTable};

/// Applies `pre`; the result starts at original observation `pre.offset() + 1`.
pub fn preprocess(series: &TimeSeries, pre: Preprocessing) -> Result<TimeSeries> {
    match pre {
        Preprocessing::None => Ok(series.clone()),
        Preprocessing::Difference(order) => Ok(difference(series, order)?),
        Preprocessing::Ar(p) => {
            if series.dim() != 1 {
                return Err(CliError::Config("AR pre-whitening needs a univariate series".into()));
            }
            let y = series.as_flat();
            let model = fit_ar(y, p)?;
            Ok(TimeSeries::univariate(ar_residuals(y, &model)?.values)?)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: String,
    pub columns: Vec<String>,
    pub labels: Option<Vec<String>>,
    pub length: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangePoint {
    /// 1-based index in the input series.
    pub index: usize,
    pub label: Option<String>,
    /// 1-based index in the series the detector saw.
    pub detector_index: usize,
    pub statistic: f64,
    pub p_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Signature {
    /// Point `i` summarises the window starting at preprocessed index `i + 1`.
    pub values: Vec<Vec<f64>>,
    pub betti: Vec<Vec<usize>>,
    pub scales: Vec<f64>,
    pub explained_variance: Vec<f64>,
    pub rank_deficient: bool,
}

impl Signature {
    fn from_transform(t: &TdaTransform) -> Self {
        Self {
            values: t.derived.values.points().map(<[f64]>::to_vec).collect(),
            betti: t.betti.rows().iter().map(|r| r.counts.clone()).collect(),
            scales: t.derived.config.grid.scales().to_vec(),
            explained_variance: t.pca.explained_variance.clone(),
            rank_deficient: t.pca.rank_deficient,
        }
    }
}

/// Everything `plot-data` needs to redraw a detection run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectArtifact {
    pub config: ResolvedConfig,
    pub input: InputInfo,
    pub series: Vec<Vec<f64>>,
    /// Observations dropped by preprocessing.
    pub offset: usize,
    pub change_points: Vec<ChangePoint>,
    pub signature: Option<Signature>,
}

fn input_info(path: &Path, data: &LabeledSeries) -> InputInfo {
    InputInfo {
        path: path.display().to_string(),
        columns: data.columns.clone(),
        labels: data.labels.clone(),
        length: data.series.len(),
        dim: data.series.dim(),
    }
}

/// Runs the configured pipeline and maps change points back to input indices.
pub fn detect(data: &LabeledSeries, input: &Path, cfg: &ResolvedConfig, exec: Execution) -> Result<DetectArtifact> {
    let prepared = preprocess(&data.series, cfg.preprocessing)?;
    let offset = cfg.preprocessing.offset();
    let outcome = run_plan(&prepared, &cfg.plan()?, exec)?;
    let p_values = outcome.result.p_values.clone();
    let change_points = outcome
        .change_points
        .iter()
        .zip(&outcome.result.change_points)
        .enumerate()
        .map(|(i, (&mapped, &raw))| ChangePoint {
            index: mapped + offset,
            label: data.label(mapped + offset).map(str::to_string),
            detector_index: raw,
            statistic: outcome.result.statistics[i],
            p_value: p_values.as_ref().map(|p| p[i]),
        })
        .collect();
    Ok(DetectArtifact {
        config: cfg.clone(),
        input: input_info(input, data),
        series: data.series.points().map(<[f64]>::to_vec).collect(),
        offset,
        change_points,
        signature: outcome.transform.as_ref().map(Signature::from_transform),
    })
}

/// Writes `detect.json` and `change_points.csv` into `out`.
pub fn write_detect(artifact: &DetectArtifact, out: &Path) -> Result<Vec<PathBuf>> {
    let json = out.join("detect.json");
    write_json(&json, &crate::Artifact::Detect(artifact.clone()))?;
    let header = ["index", "label", "detector_index", "statistic", "p_value"].map(String::from);
    let mut table = CsvTable::new(&artifact.config.to_json(), &header);
    for cp in &artifact.change_points {
        table.row([
            cp.index.to_string(),
            cp.label.clone().unwrap_or_default(),
            cp.detector_index.to_string(),
            num(cp.statistic),
            cp.p_value.map(num).unwrap_or_default(),
        ]);
    }
    let csv = out.join("change_points.csv");
    table.write(&csv)?;
    Ok(vec![json, csv])
}

/// Signature series of the preprocessed input.
pub fn transform(data: &LabeledSeries, cfg: &ResolvedConfig, exec: Execution) -> Result<(TdaTransform, usize)> {
    let prepared = preprocess(&data.series, cfg.preprocessing)?;
    Ok((tda_transform_detailed(&prepared, &cfg.tda()?, exec)?, cfg.preprocessing.offset()))
}

/// Writes `derived.csv`: one row per window with its start in input indices.
pub fn write_transform(data: &LabeledSeries, t: &TdaTransform, offset: usize, cfg: &ResolvedConfig, out: &Path) -> Result<PathBuf> {
    let m = t.derived.values.dim();
    let mut header: Vec<String> = ["window", "index", "label"].map(String::from).to_vec();
    header.extend((1..=m).map(|c| format!("pc{c}")));
    let mut table = CsvTable::new(&cfg.to_json(), &header);
    for (i, p) in t.derived.values.points().enumerate() {
        let index = i + 1 + offset;
        let mut row = vec![(i + 1).to_string(), index.to_string(), data.label(index).unwrap_or_default().to_string()];
        row.extend(p.iter().map(|&v| num(v)));
        table.row(row);
    }
    let path = out.join("derived.csv");
    table.write(&path)?;
    Ok(path)
}
