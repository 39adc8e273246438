//! Energy-statistic divergence and E-Divisive hierarchical bisection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, check_min_segment, DetectionResult, DetectorKind, SeriesKind};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::TimeSeries;

/// Above this many observations pairwise distances are recomputed on demand
/// instead of cached in an `n x n` matrix.
const DENSE_DISTANCE_LIMIT: usize = 4096;

/// Shape of the second sample when scoring a split at `τ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitSearch {
    /// Everything after `τ` in the segment.
    #[default]
    Suffix,
    /// The best-scoring run `τ..κ`, maximized jointly over `κ`.
    Windowed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    /// Distance exponent, `0 < alpha < 2`.
    pub alpha: f64,
    pub min_segment: usize,
    /// Number of change points to locate.
    pub k: usize,
    /// Permutations per split for p-values; 0 disables.
    pub permutations: usize,
    pub seed: u64,
    #[serde(default)]
    pub search: SplitSearch,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self { alpha: 1.0, min_segment: 30, k: 1, permutations: 0, seed: 0, search: SplitSearch::Suffix }
    }
}

impl EnergyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::invalid_input(format!("alpha must lie in (0, 2), got {}", self.alpha)));
        }
        if self.min_segment < 2 {
            return Err(Error::invalid_input("minimum segment length must be at least 2"));
        }
        if self.k == 0 {
            return Err(Error::invalid_input("number of change points must be at least 1"));
        }
        Ok(())
    }
}

fn powered_distance(a: &[f64], b: &[f64], alpha: f64) -> f64 {
    let d = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    if alpha == 1.0 {
        d
    } else {
        d.powf(alpha)
    }
}

/// Scaled energy divergence `Q = mn/(m+n) · E(X, Y; alpha)`.
///
/// Within-sample means over fewer than two points are taken as zero.
pub fn energy_divergence(x: &[&[f64]], y: &[&[f64]], alpha: f64) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid_input("energy divergence needs two nonempty samples"));
    }
    let dim = x[0].len();
    if x.iter().chain(y).any(|p| p.len() != dim) {
        return Err(Error::invalid_input("samples have inconsistent dimensions"));
    }
    let within = |s: &[&[f64]]| {
        let n = s.len();
        if n < 2 {
            return 0.0;
        }
        let mut sum = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                sum += powered_distance(s[i], s[j], alpha);
            }
        }
        sum / (n * (n - 1) / 2) as f64
    };
    let mut cross = 0.0;
    for a in x {
        for b in y {
            cross += powered_distance(a, b, alpha);
        }
    }
    let (m, n) = (x.len() as f64, y.len() as f64);
    let e = 2.0 * cross / (m * n) - within(x) - within(y);
    Ok(m * n / (m + n) * e)
}

/// Pairwise `|x_i - x_j|^alpha` over a whole series.
enum Distances<'a> {
    Dense { n: usize, d: Vec<f64> },
    Streaming { series: &'a TimeSeries, alpha: f64 },
}

impl<'a> Distances<'a> {
    fn new(series: &'a TimeSeries, alpha: f64, dense_limit: usize, exec: Execution) -> Self {
        let n = series.len();
        if n > dense_limit {
            return Distances::Streaming { series, alpha };
        }
        let rows = exec.map_range(n, |i| {
            (0..n)
                .map(|j| powered_distance(series.point(i), series.point(j), alpha))
                .collect::<Vec<_>>()
        });
        Distances::Dense { n, d: rows.concat() }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Distances::Dense { n, d } => d[i * n + j],
            Distances::Streaming { series, alpha } => {
                powered_distance(series.point(i), series.point(j), *alpha)
            }
        }
    }
}

/// Best split of the observations `idx` (in that order).
///
/// Returns the prefix length and its divergence.
fn scan_segment(dist: &Distances<'_>, idx: &[usize], min_segment: usize, search: SplitSearch) -> (usize, f64) {
    match search {
        SplitSearch::Suffix => scan_suffix(dist, idx, min_segment),
        SplitSearch::Windowed => scan_windowed(dist, idx, min_segment),
    }
}

fn pairs(c: usize) -> f64 {
    if c < 2 {
        0.0
    } else {
        (c * (c - 1) / 2) as f64
    }
}

fn scaled_divergence(cross: f64, within_x: f64, within_y: f64, m: usize, n: usize) -> f64 {
    let (a, b) = (m as f64, n as f64);
    let wx = if m < 2 { 0.0 } else { within_x / pairs(m) };
    let wy = if n < 2 { 0.0 } else { within_y / pairs(n) };
    a * b / (a + b) * (2.0 * cross / (a * b) - wx - wy)
}

fn scan_suffix(dist: &Distances<'_>, idx: &[usize], min_segment: usize) -> (usize, f64) {
    let n = idx.len();
    let d = |a: usize, b: usize| dist.get(idx[a], idx[b]);
    let lo = min_segment;
    let hi = n - min_segment;

    // within_x[s] = sum over i<j<s; within_y[s] = sum over s<=i<j<n.
    let mut within_x = vec![0.0; n + 1];
    for s in 1..=n {
        let col: f64 = (0..s - 1).map(|i| d(i, s - 1)).sum();
        within_x[s] = within_x[s - 1] + col;
    }
    let mut within_y = vec![0.0; n + 1];
    for s in (0..n).rev() {
        let row: f64 = (s + 1..n).map(|j| d(s, j)).sum();
        within_y[s] = within_y[s + 1] + row;
    }
    let mut cross: f64 = (0..lo).map(|i| (lo..n).map(|j| d(i, j)).sum::<f64>()).sum();

    let mut q = Vec::with_capacity(hi - lo + 1);
    for s in lo..=hi {
        if s > lo {
            // Move observation s-1 from the suffix to the prefix.
            let m = s - 1;
            let to_prefix: f64 = (0..m).map(|i| d(i, m)).sum();
            let to_suffix: f64 = (m + 1..n).map(|j| d(m, j)).sum();
            cross += to_suffix - to_prefix;
        }
        q.push(scaled_divergence(cross, within_x[s], within_y[s], s, n - s));
    }
    let (i, best) = argmax(q).expect("admissible range is nonempty");
    (lo + i, best)
}

/// Joint search over the split `τ` and the end `κ` of the second sample.
fn scan_windowed(dist: &Distances<'_>, idx: &[usize], min_segment: usize) -> (usize, f64) {
    let n = idx.len();
    let d = |a: usize, b: usize| dist.get(idx[a], idx[b]);
    let mut within_x = vec![0.0; n + 1];
    for s in 1..=n {
        within_x[s] = within_x[s - 1] + (0..s - 1).map(|i| d(i, s - 1)).sum::<f64>();
    }
    // cross[τ], within_y[τ]: sums for X = ..τ and Y = τ..=k as k grows.
    let mut cross = vec![0.0; n + 1];
    let mut within_y = vec![0.0; n + 1];
    let mut col = vec![0.0; n + 1];
    let mut best: Option<(usize, f64)> = None;
    for k in 0..n {
        // col[j] = sum of d(i, k) for i < j.
        for j in 0..k {
            col[j + 1] = col[j] + d(j, k);
        }
        for tau in min_segment..=k {
            cross[tau] += col[tau];
            within_y[tau] += col[k] - col[tau];
            if k + 1 - tau < min_segment {
                continue;
            }
            let q = scaled_divergence(cross[tau], within_x[tau], within_y[tau], tau, k + 1 - tau);
            match best {
                Some((t, b)) if q < b || (q == b && tau >= t) => {}
                _ => best = Some((tau, q)),
            }
        }
    }
    best.expect("admissible range is nonempty")
}

/// Single split of the whole series maximizing the energy divergence.
///
/// Returns the 1-based first index of the second segment and its statistic.
pub fn best_single_split(series: &TimeSeries, cfg: &EnergyConfig) -> Result<(usize, f64)> {
    cfg.validate()?;
    check_min_segment(series.len(), cfg.min_segment, "energy split")?;
    let dist = Distances::new(series, cfg.alpha, DENSE_DISTANCE_LIMIT, Execution::default());
    let idx: Vec<usize> = (0..series.len()).collect();
    let (s, q) = scan_segment(&dist, &idx, cfg.min_segment, cfg.search);
    Ok((s + 1, q))
}

/// E-Divisive with a known number of change points.
pub fn e_divisive(series: &TimeSeries, cfg: &EnergyConfig) -> Result<DetectionResult> {
    e_divisive_with(series, cfg, Execution::default())
}

pub fn e_divisive_with(
    series: &TimeSeries,
    cfg: &EnergyConfig,
    exec: Execution,
) -> Result<DetectionResult> {
    e_divisive_impl(series, cfg, exec, DENSE_DISTANCE_LIMIT)
}

#[derive(Clone, Copy)]
struct Segment {
    start: usize,
    end: usize,
    /// Best (prefix length, statistic), `None` when too short to split.
    best: Option<(usize, f64)>,
}

fn e_divisive_impl(
    series: &TimeSeries,
    cfg: &EnergyConfig,
    exec: Execution,
    dense_limit: usize,
) -> Result<DetectionResult> {
    cfg.validate()?;
    let n = series.len();
    if n < (cfg.k + 1) * cfg.min_segment {
        return Err(Error::invalid_input(format!(
            "cannot place {} change points with minimum segment {} in {n} observations",
            cfg.k, cfg.min_segment
        )));
    }
    let dist = Distances::new(series, cfg.alpha, dense_limit, exec);
    let scan = |start: usize, end: usize| -> Segment {
        let best = (end - start >= 2 * cfg.min_segment).then(|| {
            let idx: Vec<usize> = (start..end).collect();
            scan_segment(&dist, &idx, cfg.min_segment, cfg.search)
        });
        Segment { start, end, best }
    };

    let mut segments = vec![scan(0, n)];
    let mut found: Vec<(usize, f64, Option<f64>)> = Vec::with_capacity(cfg.k);
    for split_no in 0..cfg.k {
        // Segments stay sorted by start, so the first maximum is the smallest index.
        let chosen = argmax(segments.iter().map(|s| s.best.map_or(f64::NEG_INFINITY, |b| b.1)))
            .filter(|&(i, _)| segments[i].best.is_some())
            .map(|(i, _)| i)
            .ok_or_else(|| {
                Error::invalid_input(format!(
                    "no admissible split left after {} change points",
                    found.len()
                ))
            })?;
        let seg = segments[chosen];
        let (s, q) = seg.best.expect("chosen segment is splittable");
        let cut = seg.start + s;
        let p_value = (cfg.permutations > 0)
            .then(|| permutation_p_value(&dist, seg, q, cfg, split_no as u64, exec));
        found.push((cut + 1, q, p_value));

        let halves = exec.map(&[(seg.start, cut), (cut, seg.end)], |&(a, b)| scan(a, b));
        segments.splice(chosen..=chosen, halves);
    }

    found.sort_by_key(|f| f.0);
    let with_p = cfg.permutations > 0;
    Ok(DetectionResult {
        change_points: found.iter().map(|f| f.0).collect(),
        statistics: found.iter().map(|f| f.1).collect(),
        p_values: with_p.then(|| found.iter().map(|f| f.2.unwrap_or(f64::NAN)).collect()),
        series_kind: SeriesKind::Raw,
        detector: DetectorKind::EDivisive,
    })
}

/// Fraction of within-segment permutations whose best divergence reaches `observed`.
fn permutation_p_value(
    dist: &Distances<'_>,
    seg: Segment,
    observed: f64,
    cfg: &EnergyConfig,
    split_no: u64,
    exec: Execution,
) -> f64 {
    let hits: usize = exec
        .map_range(cfg.permutations, |r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream((split_no << 32) | r as u64);
            let mut idx: Vec<usize> = (seg.start..seg.end).collect();
            idx.shuffle(&mut rng);
            usize::from(scan_segment(dist, &idx, cfg.min_segment, cfg.search).1 >= observed)
        })
        .into_iter()
        .sum();
    hits as f64 / cfg.permutations as f64
}
