//! Argument parsing and subcommand dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use tdacpd::cpd::{DetectorKind, SeriesKind, SplitSearch};
use tdacpd::simulate::presets::ScaleNotation;
use tdacpd::Execution;

use crate::benchmark::{run_sweep, write_benchmark, Preset, SweepSpec};
use crate::config::{Overrides, PipelineConfig, Preprocessing, ResolvedConfig};
use crate::detect::{detect, transform, write_detect, write_transform};
use crate::error::{CliError, Result};
use crate::ingest::{ingest_csv, LabelColumn, LabeledSeries};
use crate::output::num;
use crate::plot::plot_data;

#[derive(Debug, Parser)]
#[command(name = "tdacpd", version, about = "Topology-enhanced change point detection")]
pub struct Cli {
    /// Disable data parallelism.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate change points in a CSV series.
    Detect(RunArgs),
    /// Write the topological signature series only.
    Transform(RunArgs),
    /// Monte Carlo accuracy sweep from a TOML spec or a built-in preset.
    Benchmark(BenchArgs),
    /// Plot-ready tables from a detect or benchmark artifact.
    PlotData(PlotArgs),
}

fn parse_labels(s: &str) -> std::result::Result<LabelColumn, String> {
    match s {
        "auto" => Ok(LabelColumn::Auto),
        "first" => Ok(LabelColumn::First),
        "none" => Ok(LabelColumn::None),
        _ => Err(format!("expected auto, first or none, got {s:?}")),
    }
}

fn parse_search(s: &str) -> std::result::Result<SplitSearch, String> {
    match s {
        "suffix" => Ok(SplitSearch::Suffix),
        "windowed" => Ok(SplitSearch::Windowed),
        _ => Err(format!("expected suffix or windowed, got {s:?}")),
    }
}

fn parse_notation(s: &str) -> std::result::Result<ScaleNotation, String> {
    match s {
        "variance" => Ok(ScaleNotation::Variance),
        "sd" | "std-dev" => Ok(ScaleNotation::StdDev),
        _ => Err(format!("expected variance or sd, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// CSV with a header row and an optional leading time/label column.
    pub input: PathBuf,
    /// TOML pipeline configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Label column handling: auto, first or none.
    #[arg(long, default_value = "auto", value_parser = parse_labels)]
    pub labels: LabelColumn,
    #[command(flatten)]
    pub overrides: OverrideArgs,
    /// Output directory.
    #[arg(long, default_value = "tdacpd-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OverrideArgs {
    #[arg(long)]
    pub window: Option<usize>,
    /// Number of PCA coordinates.
    #[arg(long)]
    pub pca: Option<usize>,
    /// e-divisive, cvm or bartlett.
    #[arg(long)]
    pub detector: Option<DetectorKind>,
    /// Number of change points.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub min_segment: Option<usize>,
    /// none, diff[:order] or ar:p.
    #[arg(long)]
    pub pre: Option<Preprocessing>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run the detector on the raw or tda series.
    #[arg(long)]
    pub series: Option<SeriesKind>,
    /// Permutations per split for E-Divisive p-values.
    #[arg(long)]
    pub permutations: Option<usize>,
    /// Map signature indices to window centres.
    #[arg(long)]
    pub center_offset: bool,
    /// E-Divisive split search: suffix or windowed.
    #[arg(long, value_parser = parse_search)]
    pub search: Option<SplitSearch>,
}

impl OverrideArgs {
    pub fn to_overrides(&self) -> Overrides {
        Overrides {
            window: self.window,
            pca_m: self.pca,
            detector: self.detector,
            series: self.series,
            preprocessing: self.pre,
            min_segment: self.min_segment,
            k: self.k,
            permutations: self.permutations,
            seed: self.seed,
            center_offset: self.center_offset.then_some(true),
            energy_search: self.search,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML sweep spec.
    pub spec: Option<PathBuf>,
    /// table1 or table2.
    #[arg(long, conflicts_with = "spec")]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reading of N(0, s) in built-in scenarios: variance or sd.
    #[arg(long, value_parser = parse_notation)]
    pub notation: Option<ScaleNotation>,
    #[arg(long, default_value = "tdacpd-bench")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// detect.json or benchmark.json.
    pub artifact: PathBuf,
    /// Split used to mark Betti rows before/after; defaults to the first change point.
    #[arg(long)]
    pub split: Option<usize>,
    #[arg(long, default_value = "tdacpd-plot")]
    pub out: PathBuf,
}

fn load_run(args: &RunArgs) -> Result<(LabeledSeries, ResolvedConfig)> {
    let mut cfg = match &args.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    cfg.apply(&args.overrides.to_overrides());
    let data = ingest_csv(&args.input, args.labels)?;
    let resolved = cfg.resolve(data.series.len())?;
    Ok((data, resolved))
}

fn report_written(out: &mut dyn Write, paths: &[PathBuf]) -> Result<()> {
    for p in paths {
        writeln!(out, "wrote {}", p.display()).map_err(|e| CliError::io(p, e))?;
    }
    Ok(())
}

fn say(out: &mut dyn Write, line: String) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

/// Executes one parsed command, printing a short summary to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match cli.command {
        Command::Detect(args) => {
            let (data, cfg) = load_run(&args)?;
            say(out, format!("seed = {}", cfg.seed))?;
            let artifact = detect(&data, &args.input, &cfg, exec)?;
            for (i, cp) in artifact.change_points.iter().enumerate() {
                let mut line = format!("change point {}: index {}", i + 1, cp.index);
                if let Some(l) = &cp.label {
                    line.push_str(&format!(" (label {l})"));
                }
                line.push_str(&format!(", statistic {}", num(cp.statistic)));
                if let Some(p) = cp.p_value {
                    line.push_str(&format!(", p = {}", num(p)));
                }
                say(out, line)?;
            }
            report_written(out, &write_detect(&artifact, &args.out)?)
        }
        Command::Transform(args) => {
            let (data, cfg) = load_run(&args)?;
            let (t, offset) = transform(&data, &cfg, exec)?;
            if t.pca.rank_deficient {
                say(out, format!("warning: pca_m = {} exceeds the rank of the Betti matrix", cfg.pca_m))?;
            }
            report_written(out, &[write_transform(&data, &t, offset, &cfg, &args.out)?])
        }
        Command::Benchmark(args) => {
            let mut spec = match (&args.spec, args.preset) {
                (Some(p), _) => SweepSpec::load(p)?,
                (None, Some(preset)) => SweepSpec::preset(preset),
                (None, None) => return Err(CliError::Config("benchmark needs a sweep spec file or --preset".into())),
            };
            if let Some(r) = args.replications {
                spec.replications = r;
            }
            if args.seed.is_some() {
                spec.seed = args.seed;
            }
            if let Some(n) = args.notation {
                spec.notation = n;
            }
            let (resolved, cells) = run_sweep(&spec, exec)?;
            say(out, format!("seed = {}", resolved.seed.expect("resolved sweep has a seed")))?;
            let skipped = cells.iter().filter(|c| c.skipped.is_some()).count();
            say(out, format!("{} cells, {skipped} skipped", cells.len()))?;
            report_written(out, &write_benchmark(&resolved, &cells, &args.out)?)
        }
        Command::PlotData(args) => report_written(out, &plot_data(&args.artifact, args.split, &args.out)?),
    }
}
