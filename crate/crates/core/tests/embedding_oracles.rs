mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tdacpd::embedding::{pca_fit, pca_transform, tda_transform};
use tdacpd::topology::BettiSequence;
use tdacpd::{BettiMatrix, TdaConfig, TimeSeries};

fn integer_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BettiMatrix {
    BettiMatrix::from_rows(
        (0..rows)
            .map(|i| BettiSequence {
                counts: (0..cols).map(|_| rng.random_range(1..=10)).collect(),
                window_origin: i + 1,
            })
            .collect(),
    )
    .unwrap()
}

fn covariance(m: &BettiMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (r, n) = (m.n_rows(), m.n_scales());
    let mean: Vec<f64> = (0..n).map(|j| (0..r).map(|i| m.get(i, j)).sum::<f64>() / r as f64).collect();
    let cov = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..r).map(|i| (m.get(i, a) - mean[a]) * (m.get(i, b) - mean[b])).sum::<f64>() / (r - 1) as f64)
                .collect()
        })
        .collect();
    (mean, cov)
}

#[test]
fn scores_match_jacobi_oracle_up_to_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let matrix = integer_matrix(&mut rng, 100, 50);
    let model = pca_fit(&matrix, 3).unwrap();
    let scores = pca_transform(&model, &matrix).unwrap();

    let (mean, cov) = covariance(&matrix);
    let (values, vectors) = support::jacobi_eigen(cov);
    for c in 0..3 {
        assert!((model.explained_variance[c] - values[c]).abs() < 1e-8 * values[0]);
        let oracle: Vec<f64> = (0..100)
            .map(|i| (0..50).map(|j| (matrix.get(i, j) - mean[j]) * vectors[c][j]).sum())
            .collect();
        let ours: Vec<f64> = (0..100).map(|i| scores.point(i)[c]).collect();
        let sign = if ours.iter().zip(&oracle).map(|(a, b)| a * b).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - sign * b).abs() < 1e-6, "component {c}: {a} vs {b}");
        }
    }
}

#[test]
fn full_rank_reconstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for (rows, cols) in [(40, 8), (12, 12), (30, 20)] {
        let matrix = integer_matrix(&mut rng, rows, cols);
        let model = pca_fit(&matrix, cols).unwrap();
        let scores = pca_transform(&model, &matrix).unwrap();
        for i in 0..rows {
            for j in 0..cols {
                let rebuilt = model.mean[j]
                    + (0..cols).map(|c| scores.point(i)[c] * model.components[c][j]).sum::<f64>();
                assert!((rebuilt - matrix.get(i, j)).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn loadings_orthonormal_and_variance_sorted() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let matrix = integer_matrix(&mut rng, 60, 15);
        let model = pca_fit(&matrix, 6).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let dot: f64 = model.components[a].iter().zip(&model.components[b]).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((dot - target).abs() < 1e-8);
            }
        }
        assert!(model.explained_variance.windows(2).all(|w| w[1] <= w[0]));
        assert!(model.explained_variance.iter().all(|&v| v >= 0.0));
        let scores = pca_transform(&model, &matrix).unwrap();
        for c in 0..6 {
            let mean = (0..60).map(|i| scores.point(i)[c]).sum::<f64>() / 60.0;
            assert!(mean.abs() < 1e-10);
        }
    }
}

#[test]
fn transform_is_shift_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for case in 0..100 {
        let dim = [1, 2, 3][case % 3];
        let len = rng.random_range(30..120);
        let y: Vec<f64> = (0..len * dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let c = rng.random_range(-1e3..1e3);
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let cfg = TdaConfig::new(rng.random_range(2..12), 1 + case % 3);
        let a = tda_transform(&TimeSeries::from_flat(y, dim).unwrap(), &cfg).unwrap();
        let b = tda_transform(&TimeSeries::from_flat(shifted, dim).unwrap(), &cfg).unwrap();
        assert_eq!(a.values.len(), len - cfg.window + 1);
        for (x, z) in a.values.as_flat().iter().zip(b.values.as_flat()) {
            assert!((x - z).abs() <= 1e-10, "case {case}: {x} vs {z}");
        }
    }
}

#[test]
fn variance_increase_shows_as_mean_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let y: Vec<f64> = (0..200)
        .map(|t| rng.sample::<f64, _>(StandardNormal) * if t < 100 { 1.0 } else { 3.0 })
        .collect();
    let derived = tda_transform(&TimeSeries::univariate(y).unwrap(), &TdaConfig::new(5, 1)).unwrap();
    let d = derived.values.as_flat();
    let (before, after) = (&d[..96], &d[100..]);
    let stats = |s: &[f64]| {
        let m = s.iter().sum::<f64>() / s.len() as f64;
        (m, s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (s.len() - 1) as f64)
    };
    let ((m1, v1), (m2, v2)) = (stats(before), stats(after));
    let se = (v1 / before.len() as f64 + v2 / after.len() as f64).sqrt();
    assert!((m1 - m2).abs() > 2.0 * se, "means {m1} vs {m2}, se {se}");
}
