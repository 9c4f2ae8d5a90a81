//! Cross-validation of the circulant-embedding fGn generator against an
//! independent direct-covariance Cholesky synthesis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use vgraph::series::{generate, SyntheticKind, SyntheticSpec};

fn autocov(hurst: f64, k: usize) -> f64 {
    let k = k as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k - 1.0).abs().powf(h2) - 2.0 * k.powf(h2) + (k + 1.0).powf(h2))
}

/// Exact fGn by Cholesky factorization of the full covariance matrix:
/// O(n^3), usable only for short series, independent of the FFT path.
fn fgn_cholesky(n: usize, hurst: f64, seed: u64) -> Vec<f64> {
    // lower-triangular factor of the Toeplitz covariance
    let mut factor = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = autocov(hurst, i - j);
            for k in 0..j {
                sum -= factor[i * n + k] * factor[j * n + k];
            }
            if i == j {
                factor[i * n + i] = sum.max(0.0).sqrt();
            } else {
                factor[i * n + j] = sum / factor[j * n + j];
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    (0..n)
        .map(|i| (0..=i).map(|k| factor[i * n + k] * noise[k]).sum())
        .collect()
}

fn lag1_acf(values: &[f64]) -> f64 {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let cov: f64 = (0..n - 1)
        .map(|i| (values[i] - mean) * (values[i + 1] - mean))
        .sum();
    cov / var
}

#[test]
fn circulant_generator_matches_cholesky_synthesis() {
    let hurst = 0.8;
    let n = 1024;
    let theory = 2f64.powf(2.0 * hurst - 1.0) - 1.0;

    let mean_over_seeds = |gen: &dyn Fn(u64) -> Vec<f64>| -> f64 {
        (0..5u64).map(|s| lag1_acf(&gen(s))).sum::<f64>() / 5.0
    };

    let chol = mean_over_seeds(&|seed| fgn_cholesky(n, hurst, seed));
    let circ = mean_over_seeds(&|seed| {
        generate(&SyntheticSpec {
            kind: SyntheticKind::Fgn { hurst },
            length: n,
            seed,
        })
        .unwrap()
        .values()
        .to_vec()
    });

    assert!((chol - theory).abs() < 0.06, "cholesky acf {chol} vs {theory}");
    assert!((circ - theory).abs() < 0.06, "circulant acf {circ} vs {theory}");
    assert!((chol - circ).abs() < 0.08, "generators disagree: {chol} vs {circ}");
}

#[test]
fn cholesky_variance_is_unit() {
    let sample = fgn_cholesky(512, 0.6, 3);
    let mean = sample.iter().sum::<f64>() / 512.0;
    let var: f64 = sample.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 511.0;
    assert!((var - 1.0).abs() < 0.3, "variance {var}");
}
