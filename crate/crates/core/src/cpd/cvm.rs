//! Two-sample Cramér–von Mises statistic and the CvM change point model.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, check_min_segment, DetectionResult, DetectorKind, SeriesKind};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// `ab/(a+b)² · Σ_z (F_a(z) - G_b(z))²` over every pooled observation `z`.
///
/// Both empirical CDFs are right-continuous; tied observations each
/// contribute a term.
pub fn cvm_two_sample(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid_input("Cramér–von Mises needs two nonempty samples"));
    }
    let mut pooled: Vec<(f64, bool)> =
        x.iter().map(|&v| (v, true)).chain(y.iter().map(|&v| (v, false))).collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (a, b) = (x.len() as f64, y.len() as f64);
    let (mut in_x, mut in_y) = (0usize, 0usize);
    let mut sum = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            if pooled[j].1 {
                in_x += 1;
            } else {
                in_y += 1;
            }
            j += 1;
        }
        let diff = in_x as f64 / a - in_y as f64 / b;
        sum += (j - i) as f64 * diff * diff;
        i = j;
    }
    Ok(a * b / ((a + b) * (a + b)) * sum)
}

/// Exact null mean and standard deviation of the statistic for continuous
/// samples of sizes `a` and `b`.
pub fn cvm_null_moments(a: usize, b: usize) -> (f64, f64) {
    let (a, b) = (a as f64, b as f64);
    let n = a + b;
    let mean = 1.0 / 6.0 + 1.0 / (6.0 * n);
    let var = (n + 1.0) / (45.0 * n * n) * (4.0 * a * b * n - 3.0 * (a * a + b * b) - 2.0 * a * b)
        / (4.0 * a * b);
    (mean, var.sqrt())
}

/// Source of the null moments used to standardize each split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullMoments {
    ClosedForm,
    Permutation { permutations: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvmConfig {
    pub min_segment: usize,
    pub moments: NullMoments,
}

impl Default for CvmConfig {
    fn default() -> Self {
        Self { min_segment: 30, moments: NullMoments::ClosedForm }
    }
}

/// Statistic at every prefix length `s` in `lo..=hi` for one ordering of
/// the data. `position_in_time` lists time positions in value order and
/// `group_bounds` holds the rank ranges of tied values.
fn scan_statistics(
    position_in_time: &[usize],
    group_bounds: &[(usize, usize)],
    lo: usize,
    hi: usize,
) -> Vec<f64> {
    let n = position_in_time.len();
    (lo..=hi)
        .map(|s| {
            let (a, b) = (s as f64, (n - s) as f64);
            let (mut in_x, mut in_y) = (0usize, 0usize);
            let mut sum = 0.0;
            for &(start, end) in group_bounds {
                for &t in &position_in_time[start..end] {
                    if t < s {
                        in_x += 1;
                    } else {
                        in_y += 1;
                    }
                }
                let diff = in_x as f64 / a - in_y as f64 / b;
                sum += (end - start) as f64 * diff * diff;
            }
            a * b / ((a + b) * (a + b)) * sum
        })
        .collect()
}

/// Single change point maximizing the standardized CvM statistic.
pub fn cvm_single_change(series: &TimeSeries, cfg: &CvmConfig) -> Result<DetectionResult> {
    if series.dim() != 1 {
        return Err(Error::Unsupported("CvM CPM does not support multivariate time series".into()));
    }
    let min_segment = cfg.min_segment.max(1);
    let y = series.as_flat();
    let n = y.len();
    check_min_segment(n, min_segment, "CvM change point")?;
    let (lo, hi) = (min_segment, n - min_segment);

    let mut by_value: Vec<usize> = (0..n).collect();
    by_value.sort_by(|&i, &j| y[i].total_cmp(&y[j]));
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || y[by_value[k]] != y[by_value[start]] {
            groups.push((start, k));
            start = k;
        }
    }

    let observed = scan_statistics(&by_value, &groups, lo, hi);
    let moments: Vec<(f64, f64)> = match cfg.moments {
        NullMoments::ClosedForm => (lo..=hi).map(|s| cvm_null_moments(s, n - s)).collect(),
        NullMoments::Permutation { permutations, seed } => {
            if permutations < 2 {
                return Err(Error::invalid_input("permutation moments need at least 2 permutations"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sum = vec![0.0; hi - lo + 1];
            let mut sum_sq = vec![0.0; hi - lo + 1];
            let mut shuffled = by_value.clone();
            for _ in 0..permutations {
                // Relabelling time positions permutes the series while
                // keeping the value order and tie groups intact.
                shuffled.shuffle(&mut rng);
                for (k, t) in scan_statistics(&shuffled, &groups, lo, hi).into_iter().enumerate() {
                    sum[k] += t;
                    sum_sq[k] += t * t;
                }
            }
            let r = permutations as f64;
            sum.iter()
                .zip(&sum_sq)
                .map(|(s, ss)| {
                    let mean = s / r;
                    let var = ((ss - r * mean * mean) / (r - 1.0)).max(0.0);
                    (mean, var.sqrt())
                })
                .collect()
        }
    };

    // A single distinct value leaves no permutation variability at all.
    let degenerate = groups.len() == 1;
    let standardized = observed.iter().zip(&moments).map(|(&t, &(mu, sd))| {
        if degenerate || !(sd > 0.0) {
            0.0
        } else {
            (t - mu) / sd
        }
    });
    let (i, d) = argmax(standardized).expect("admissible range is nonempty");
    Ok(DetectionResult {
        change_points: vec![lo + i + 1],
        statistics: vec![d],
        p_values: None,
        series_kind: SeriesKind::Raw,
        detector: DetectorKind::Cvm,
    })
}
