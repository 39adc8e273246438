//! Bartlett's two-group test for equal variances, scanned over splits.

use super::{argmax, check_min_segment, DetectionResult, DetectorKind, SeriesKind};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

fn sum_sq_dev(x: &[f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - mean) * (v - mean)).sum()
}

/// Bartlett's χ² statistic for two samples; `None` when a sample has fewer
/// than two observations or zero variance.
pub fn bartlett_statistic(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || y.len() < 2 {
        return None;
    }
    let (n1, n2) = ((x.len() - 1) as f64, (y.len() - 1) as f64);
    let (ss1, ss2) = (sum_sq_dev(x), sum_sq_dev(y));
    if !(ss1 > 0.0 && ss2 > 0.0) {
        return None;
    }
    let (v1, v2) = (ss1 / n1, ss2 / n2);
    if v1 == v2 {
        return Some(0.0);
    }
    let vp = (ss1 + ss2) / (n1 + n2);
    let correction = 1.0 + (1.0 / n1 + 1.0 / n2 - 1.0 / (n1 + n2)) / 3.0;
    let ln_vp = vp.ln();
    Some((n1 * (ln_vp - v1.ln()) + n2 * (ln_vp - v2.ln())) / correction)
}

/// Split maximizing the Bartlett statistic; splits with a zero-variance
/// segment are skipped.
pub fn bartlett_single_change(series: &TimeSeries, min_segment: usize) -> Result<DetectionResult> {
    if series.dim() != 1 {
        return Err(Error::Unsupported("Bartlett's test needs a univariate series".into()));
    }
    let min_segment = min_segment.max(2);
    let y = series.as_flat();
    let n = y.len();
    check_min_segment(n, min_segment, "Bartlett change point")?;

    let stats: Vec<Option<f64>> =
        (min_segment..=n - min_segment).map(|s| bartlett_statistic(&y[..s], &y[s..])).collect();
    let skipped = stats.iter().filter(|s| s.is_none()).count();
    if skipped > 0 {
        log::warn!("Bartlett scan skipped {skipped} splits with a zero-variance segment");
    }
    let (i, chi2) = argmax(stats.iter().map(|s| s.unwrap_or(f64::NEG_INFINITY)))
        .filter(|&(i, _)| stats[i].is_some())
        .ok_or_else(|| Error::invalid_input("every split has a zero-variance segment"))?;
    Ok(DetectionResult {
        change_points: vec![min_segment + i + 1],
        statistics: vec![chi2],
        p_values: None,
        series_kind: SeriesKind::Raw,
        detector: DetectorKind::Bartlett,
    })
}
