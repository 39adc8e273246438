//! Brute-force reference implementations used as test oracles.
//!
//! Nothing here calls into the library's numerical paths.
#![allow(dead_code)]

use std::collections::VecDeque;

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Connected components of the `dist <= eps` graph by breadth-first search.
pub fn bfs_components(points: &[Vec<f64>], eps: f64) -> usize {
    let n = points.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if !seen[v] && euclid(&points[u], &points[v]) <= eps {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    count
}

/// Scaled energy divergence from ordered-pair double sums.
pub fn energy_brute(x: &[Vec<f64>], y: &[Vec<f64>], alpha: f64) -> f64 {
    let (m, n) = (x.len(), y.len());
    let mut between = 0.0;
    for a in x {
        for b in y {
            between += euclid(a, b).powf(alpha);
        }
    }
    let within = |s: &[Vec<f64>]| {
        let k = s.len();
        if k < 2 {
            return 0.0;
        }
        let mut t = 0.0;
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    t += euclid(&s[i], &s[j]).powf(alpha);
                }
            }
        }
        t / (k * (k - 1)) as f64
    };
    let e = 2.0 * between / (m * n) as f64 - within(x) - within(y);
    (m * n) as f64 / (m + n) as f64 * e
}

/// Exhaustive argmax (smallest index on ties) of the prefix/suffix divergence.
pub fn best_split_brute(points: &[Vec<f64>], min_segment: usize) -> (usize, f64) {
    let n = points.len();
    let mut best = (0, f64::NEG_INFINITY);
    for s in min_segment..=n - min_segment {
        let q = energy_brute(&points[..s], &points[s..], 1.0);
        if q > best.1 + 1e-9 {
            best = (s + 1, q);
        }
    }
    best
}

/// Two-sample CvM straight from the pooled-sample ECDF definition.
pub fn cvm_definition(x: &[f64], y: &[f64]) -> f64 {
    let ecdf = |s: &[f64], z: f64| s.iter().filter(|&&v| v <= z).count() as f64 / s.len() as f64;
    let (a, b) = (x.len() as f64, y.len() as f64);
    let sum: f64 = x.iter().chain(y).map(|&z| (ecdf(x, z) - ecdf(y, z)).powi(2)).sum();
    a * b / (a + b).powi(2) * sum
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
/// Returns eigenvalues (descending) with eigenvectors as rows.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (values, vectors)
}

/// Least-squares slope of `y_t` on `y_{t-1}` with intercept.
pub fn ls_ar1(y: &[f64]) -> f64 {
    let x = &y[..y.len() - 1];
    let z = &y[1..];
    let n = x.len() as f64;
    let (mx, mz) = (x.iter().sum::<f64>() / n, z.iter().sum::<f64>() / n);
    let sxz: f64 = x.iter().zip(z).map(|(a, b)| (a - mx) * (b - mz)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxz / sxx
}

pub fn lag1_autocorrelation(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let m = y.iter().sum::<f64>() / n;
    let num: f64 = y.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    let den: f64 = y.iter().map(|v| (v - m).powi(2)).sum();
    num / den
}
