//! Plot-ready tables from detect and benchmark artifacts.

use std::path::{Path, PathBuf};

use crate::detect::DetectArtifact;
use crate::error::{CliError, Result};
use crate::output::{num, write_atomic, CsvTable};
use crate::Artifact;

pub fn load_artifact(path: &Path) -> Result<Artifact> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Artifact(format!("{}: not a run artifact: {e}", path.display())))
}

/// 0-based segment of each 1-based index given sorted change points.
fn segment_of(index: usize, change_points: &[usize]) -> usize {
    change_points.iter().filter(|&&c| c <= index).count()
}

/// Per-segment column means of `rows`, where row `i` has 1-based index `first + i`.
fn segment_means(rows: &[Vec<f64>], first: usize, change_points: &[usize]) -> Vec<Vec<f64>> {
    let dim = rows.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; change_points.len() + 1];
    let mut counts = vec![0usize; change_points.len() + 1];
    for (i, r) in rows.iter().enumerate() {
        let s = segment_of(first + i, change_points);
        counts[s] += 1;
        sums[s].iter_mut().zip(r).for_each(|(a, v)| *a += v);
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| s.into_iter().map(|v| if c == 0 { f64::NAN } else { v / c as f64 }).collect())
        .collect()
}

fn label(a: &DetectArtifact, index: usize) -> String {
    a.input.labels.as_ref().and_then(|l| l.get(index - 1)).cloned().unwrap_or_default()
}

fn segmented_table(
    a: &DetectArtifact,
    config: &str,
    lead: &[&str],
    names: &[String],
    rows: &[Vec<f64>],
    first: usize,
    lead_values: impl Fn(usize) -> Vec<String>,
) -> CsvTable {
    let cps: Vec<usize> = a.change_points.iter().map(|c| c.index).collect();
    let mut header: Vec<String> = lead.iter().map(|s| s.to_string()).collect();
    header.push("label".into());
    header.extend(names.iter().cloned());
    header.push("segment".into());
    header.extend(names.iter().map(|n| format!("mean_{n}")));
    header.push("change_point".into());
    let means = segment_means(rows, first, &cps);
    let mut t = CsvTable::new(config, &header);
    for (i, r) in rows.iter().enumerate() {
        let index = first + i;
        let s = segment_of(index, &cps);
        let mut row = lead_values(i);
        row.push(label(a, index));
        row.extend(r.iter().map(|&v| num(v)));
        row.push((s + 1).to_string());
        row.extend(means[s].iter().map(|&v| num(v)));
        row.push(u8::from(cps.contains(&index)).to_string());
        t.row(row);
    }
    t
}

/// Writes `series.csv` and, for signature runs, `derived.csv` and `betti.csv`.
/// Betti rows are marked `before`/`after` relative to `split`, which defaults
/// to the first change point.
pub fn plot_detect(a: &DetectArtifact, split: Option<usize>, out: &Path) -> Result<Vec<PathBuf>> {
    let config = a.config.to_json();
    let mut written = Vec::new();

    let series = segmented_table(a, &config, &["index"], &a.input.columns, &a.series, 1, |i| vec![(i + 1).to_string()]);
    let path = out.join("series.csv");
    series.write(&path)?;
    written.push(path);

    let Some(sig) = &a.signature else {
        return Ok(written);
    };
    let first = 1 + a.offset;
    let names: Vec<String> = (1..=sig.values.first().map_or(0, Vec::len)).map(|c| format!("pc{c}")).collect();
    let derived = segmented_table(a, &config, &["window", "index"], &names, &sig.values, first, |i| {
        vec![(i + 1).to_string(), (first + i).to_string()]
    });
    let path = out.join("derived.csv");
    derived.write(&path)?;
    written.push(path);

    let split = split.or_else(|| a.change_points.first().map(|c| c.index));
    let mut header: Vec<String> = ["window", "index", "label", "side"].map(String::from).to_vec();
    header.extend((1..=sig.scales.len()).map(|j| format!("b{j}")));
    let mut betti = CsvTable::new(&config, &header);
    for (i, counts) in sig.betti.iter().enumerate() {
        let index = first + i;
        let side = match split {
            Some(s) if index >= s => "after",
            _ => "before",
        };
        let mut row = vec![(i + 1).to_string(), index.to_string(), label(a, index), side.to_string()];
        row.extend(counts.iter().map(usize::to_string));
        betti.row(row);
    }
    let path = out.join("betti.csv");
    betti.write(&path)?;
    written.push(path);
    Ok(written)
}

pub fn plot_data(artifact: &Path, split: Option<usize>, out: &Path) -> Result<Vec<PathBuf>> {
    match load_artifact(artifact)? {
        Artifact::Detect(a) => plot_detect(&a, split, out),
        Artifact::Benchmark(b) => {
            let path = out.join("mae_table.csv");
            write_atomic(&path, b.combined_csv.as_bytes())?;
            Ok(vec![path])
        }
    }
}
