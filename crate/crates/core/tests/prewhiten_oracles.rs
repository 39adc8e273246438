mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tdacpd::prewhiten::{ar_residuals, autocovariances, difference, fit_ar};
use tdacpd::TimeSeries;

fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..n + 200 {
        x = phi * x + rng.sample::<f64, _>(StandardNormal);
        if t >= 200 {
            out.push(x);
        }
    }
    out
}

#[test]
fn white_noise_has_no_ar_coefficient() {
    let y = ar1(0.0, 5000, 41);
    let m = fit_ar(&y, 1).unwrap();
    assert!(m.coefficients[0].abs() < 0.05);
    assert!(support::ls_ar1(&y).abs() < 0.05);
}

#[test]
fn ar1_recovered_and_residuals_whitened() {
    let y = ar1(0.6, 5000, 42);
    let m = fit_ar(&y, 1).unwrap();
    let phi = m.coefficients[0];
    assert!((0.55..=0.65).contains(&phi), "phi {phi}");
    assert!((phi - support::ls_ar1(&y)).abs() < 0.01);
    let r = ar_residuals(&y, &m).unwrap();
    assert_eq!(r.values.len() + r.offset, y.len());
    assert!(support::lag1_autocorrelation(&r.values).abs() < 0.05);
}

#[test]
fn yule_walker_solves_toeplitz_system() {
    for (seed, p) in [(43, 1), (44, 3), (45, 6)] {
        let y = ar1(0.5, 2000, seed);
        let m = fit_ar(&y, p).unwrap();
        let g = autocovariances(&y, p);
        for k in 1..=p {
            let lhs: f64 = (1..=p).map(|j| m.coefficients[j - 1] * g[k.abs_diff(j)]).sum();
            assert!((lhs - g[k]).abs() < 1e-8);
        }
        let sigma: f64 = g[0] - (1..=p).map(|j| m.coefficients[j - 1] * g[j]).sum::<f64>();
        assert!((sigma - m.noise_variance).abs() < 1e-8);
    }
}

#[test]
fn difference_inverts_cumulative_sum() {
    let x: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
    let cum: Vec<f64> = x.iter().scan(0.0, |s, v| {
        *s += v;
        Some(*s)
    }).collect();
    let d = difference(&TimeSeries::univariate(cum).unwrap(), 1).unwrap();
    assert_eq!(d.as_flat(), &x[1..]);
}

proptest! {
    #[test]
    fn fit_is_shift_equivariant(seed in 0u64..1000, c in -100.0f64..100.0, p in 1usize..4) {
        let y = ar1(0.3, 300, seed);
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let a = fit_ar(&y, p).unwrap();
        let b = fit_ar(&shifted, p).unwrap();
        for (x, z) in a.coefficients.iter().zip(&b.coefficients) {
            prop_assert!((x - z).abs() < 1e-10);
        }
        prop_assert!((b.intercept - a.intercept - c).abs() < 1e-9);
    }

    #[test]
    fn residual_length_bookkeeping(y in prop::collection::vec(-5.0f64..5.0, 10..60), p in 0usize..5) {
        if let Ok(m) = fit_ar(&y, p) {
            let r = ar_residuals(&y, &m).unwrap();
            prop_assert_eq!(r.values.len() + p, y.len());
            prop_assert!(m.noise_variance >= 0.0);
        }
    }
}
