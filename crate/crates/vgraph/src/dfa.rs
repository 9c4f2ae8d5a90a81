//! Detrended fluctuation analysis.
//!
//! The profile (cumulative sum of deviations from the mean) is split into
//! non-overlapping segments of length s, a least-squares line is removed
//! from each segment, and F(s) is the root mean square of the residuals.
//! The Hurst exponent is the slope of log10 F(s) against log10 s.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regress::{ols, LinearFit};
use crate::series::TimeSeries;

/// Segmentation direction. `ForwardOnly` matches the textbook definition
/// and discards the trailing remainder; `BothEnds` repeats the pass from
/// the tail and averages the mean squares, so short series lose nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    ForwardOnly,
    BothEnds,
}

/// Scale-grid configuration. Detrending is strictly linear.
#[derive(Debug, Clone, Serialize)]
pub struct DfaConfig {
    pub min_scale: usize,
    pub max_scale: usize,
    pub scale_count: usize,
    pub direction: Direction,
}

impl DfaConfig {
    /// 50 log-spaced scales on [10, n/4].
    pub fn default_for_len(n: usize) -> Result<Self> {
        let config = DfaConfig {
            min_scale: 10,
            max_scale: n / 4,
            scale_count: 50,
            direction: Direction::ForwardOnly,
        };
        config.validate_for_len(n)?;
        Ok(config)
    }

    pub fn validate_for_len(&self, n: usize) -> Result<()> {
        if self.min_scale < 4 {
            return Err(Error::BadDfaConfig(format!(
                "min_scale {} below 4",
                self.min_scale
            )));
        }
        if self.max_scale > n / 4 {
            return Err(Error::BadDfaConfig(format!(
                "max_scale {} above length/4 = {}",
                self.max_scale,
                n / 4
            )));
        }
        if self.min_scale >= self.max_scale {
            return Err(Error::BadDfaConfig(format!(
                "min_scale {} not below max_scale {}",
                self.min_scale, self.max_scale
            )));
        }
        if self.scale_count < 10 {
            return Err(Error::BadDfaConfig(format!(
                "scale_count {} below 10",
                self.scale_count
            )));
        }
        Ok(())
    }

    /// Unique log-spaced integer scales.
    pub fn scales(&self) -> Vec<usize> {
        log_spaced_integers(self.min_scale, self.max_scale, self.scale_count)
    }
}

/// Unique integers approximately log-spaced on [lo, hi].
pub fn log_spaced_integers(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    debug_assert!(lo >= 1 && lo <= hi && count >= 1);
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| {
            let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            (llo + t * (lhi - llo)).exp().round() as usize
        })
        .map(|s| s.clamp(lo, hi))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Per-scale fluctuations with the fitted Hurst exponent.
#[derive(Debug, Clone, Serialize)]
pub struct DfaResult {
    /// (scale, F(scale)) sorted by scale ascending.
    pub points: Vec<(usize, f64)>,
    pub hurst: f64,
    pub fit: LinearFit,
}

/// Memory classification per the sign of H - 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Persistence {
    AntiPersistent,
    Uncorrelated,
    Persistent,
}

impl DfaResult {
    pub fn classification(&self) -> Persistence {
        if self.hurst < 0.5 {
            Persistence::AntiPersistent
        } else if self.hurst > 0.5 {
            Persistence::Persistent
        } else {
            Persistence::Uncorrelated
        }
    }
}

/// Cumulative sum of deviations from the mean; the final entry telescopes
/// to zero up to rounding.
pub fn profile(series: &TimeSeries) -> Vec<f64> {
    let x = series.values();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut acc = 0.0;
    x.iter()
        .map(|v| {
            acc += v - mean;
            acc
        })
        .collect()
}

/// Root-mean-square residual of per-segment linear detrending at scale `s`.
pub fn fluctuation(series: &TimeSeries, s: usize) -> Result<f64> {
    let n = series.len();
    if s < 4 || s > n / 4 {
        return Err(Error::ScaleOutOfRange {
            scale: s,
            min: 4,
            max: n / 4,
        });
    }
    fluctuation_with(series, s, Direction::ForwardOnly)
}

fn fluctuation_with(series: &TimeSeries, s: usize, direction: Direction) -> Result<f64> {
    let prof = profile(series);
    let forward = mean_square_residual(&prof, s, false);
    let ms = match direction {
        Direction::ForwardOnly => forward,
        Direction::BothEnds => 0.5 * (forward + mean_square_residual(&prof, s, true)),
    };
    Ok(ms.sqrt())
}

/// Mean squared residual over the floor(N/s) segments taken from the start
/// (or from the tail when `reversed`).
fn mean_square_residual(prof: &[f64], s: usize, reversed: bool) -> f64 {
    let n = prof.len();
    let segments = n / s;
    let offset = if reversed { n - segments * s } else { 0 };

    // per-segment linear fit in local coordinates u = 0..s-1
    let sf = s as f64;
    let su = sf * (sf - 1.0) / 2.0;
    let suu = sf * (sf - 1.0) * (2.0 * sf - 1.0) / 6.0;
    let denom = sf * suu - su * su;

    let mut rss = 0.0;
    for k in 0..segments {
        let seg = &prof[offset + k * s..offset + (k + 1) * s];
        let mut sy = 0.0;
        let mut suy = 0.0;
        for (u, &y) in seg.iter().enumerate() {
            sy += y;
            suy += u as f64 * y;
        }
        let slope = (sf * suy - su * sy) / denom;
        let intercept = (sy - slope * su) / sf;
        for (u, &y) in seg.iter().enumerate() {
            let r = y - intercept - slope * u as f64;
            rss += r * r;
        }
    }
    rss / (segments * s) as f64
}

/// Fit F(s) over the configured scale grid and return the Hurst exponent.
/// Errors when any F(s) is zero, which signals a constant or perfectly
/// linear series.
pub fn estimate_hurst(series: &TimeSeries, config: &DfaConfig) -> Result<DfaResult> {
    config.validate_for_len(series.len())?;
    let scales = config.scales();
    let fluctuations: Vec<f64> = scales
        .par_iter()
        .map(|&s| fluctuation_with(series, s, config.direction))
        .collect::<Result<_>>()?;
    if let Some(idx) = fluctuations.iter().position(|f| *f == 0.0) {
        return Err(Error::DegenerateFluctuation { scale: scales[idx] });
    }
    let log_s: Vec<f64> = scales.iter().map(|&s| (s as f64).log10()).collect();
    let log_f: Vec<f64> = fluctuations.iter().map(|f| f.log10()).collect();
    let fit = ols(&log_s, &log_f)?;
    Ok(DfaResult {
        points: scales.into_iter().zip(fluctuations).collect(),
        hurst: fit.slope,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{generate, SyntheticKind, SyntheticSpec};

    fn ts(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(values, "t").unwrap()
    }

    #[test]
    fn profile_examples() {
        assert_eq!(profile(&ts(vec![1.0, 2.0, 3.0])), vec![-1.0, -1.0, 0.0]);
        assert_eq!(profile(&ts(vec![7.0; 6])), vec![0.0; 6]);
        let s = generate(&SyntheticSpec {
            kind: SyntheticKind::WhiteNoise,
            length: 1000,
            seed: 5,
        })
        .unwrap();
        let max_abs = s.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let last = *profile(&s).last().unwrap();
        assert!(last.abs() <= 1e-9 * 1000.0 * max_abs);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = ts(vec![4.0; 200]);
        assert_eq!(fluctuation(&s, 10).unwrap(), 0.0);
        let config = DfaConfig::default_for_len(200).unwrap();
        assert!(matches!(
            estimate_hurst(&s, &config),
            Err(Error::DegenerateFluctuation { .. })
        ));
    }

    #[test]
    fn scale_bounds_enforced() {
        let s = ts((0..100).map(|i| (i as f64).sin()).collect());
        assert!(fluctuation(&s, 3).is_err());
        assert!(fluctuation(&s, 26).is_err());
        assert!(fluctuation(&s, 25).is_ok());
    }

    #[test]
    fn forward_only_uses_full_segments() {
        // N = 103, s = 10: forward pass covers exactly 100 points; the
        // independent check recomputes the same quantity from the profile
        let s = generate(&SyntheticSpec {
            kind: SyntheticKind::WhiteNoise,
            length: 103,
            seed: 2,
        })
        .unwrap();
        let f = fluctuation(&s, 10).unwrap();
        let naive = naive_dfa_fluctuation(s.values(), 10);
        assert!((f - naive).abs() < 1e-12);
    }

    // independent reimplementation: generic polynomial fit via normal
    // equations instead of the closed-form sweep
    fn naive_dfa_fluctuation(x: &[f64], s: usize) -> f64 {
        let n = x.len();
        let mean = x.iter().sum::<f64>() / n as f64;
        let mut prof = Vec::with_capacity(n);
        let mut acc = 0.0;
        for v in x {
            acc += v - mean;
            prof.push(acc);
        }
        let segs = n / s;
        let mut rss = 0.0;
        for k in 0..segs {
            let seg = &prof[k * s..(k + 1) * s];
            // normal equations for y = a + b u
            let (mut s_u, mut s_uu, mut s_y, mut s_uy) = (0.0, 0.0, 0.0, 0.0);
            for (u, &y) in seg.iter().enumerate() {
                let u = u as f64;
                s_u += u;
                s_uu += u * u;
                s_y += y;
                s_uy += u * y;
            }
            let m = s as f64;
            let det = m * s_uu - s_u * s_u;
            let b = (m * s_uy - s_u * s_y) / det;
            let a = (s_y - b * s_u) / m;
            for (u, &y) in seg.iter().enumerate() {
                let r = y - a - b * u as f64;
                rss += r * r;
            }
        }
        (rss / (segs * s) as f64).sqrt()
    }

    #[test]
    fn white_noise_recovers_half() {
        let mut errs = Vec::new();
        for seed in 0..10 {
            let s = generate(&SyntheticSpec {
                kind: SyntheticKind::WhiteNoise,
                length: 8192,
                seed,
            })
            .unwrap();
            let config = DfaConfig::default_for_len(8192).unwrap();
            let r = estimate_hurst(&s, &config).unwrap();
            errs.push((r.hurst - 0.5).abs());
            assert!(r.fit.pearson_r.abs() > 0.95);
        }
        let mean_err = errs.iter().sum::<f64>() / errs.len() as f64;
        assert!(mean_err < 0.05, "mean error {mean_err}");
    }

    #[test]
    fn fgn_recovers_configured_hurst() {
        for &h in &[0.3, 0.8] {
            let s = generate(&SyntheticSpec {
                kind: SyntheticKind::Fgn { hurst: h },
                length: 8192,
                seed: 11,
            })
            .unwrap();
            let config = DfaConfig::default_for_len(8192).unwrap();
            let r = estimate_hurst(&s, &config).unwrap();
            assert!((r.hurst - h).abs() < 0.05, "H = {h}, got {}", r.hurst);
        }
    }

    #[test]
    fn scale_equivariance() {
        let s = generate(&SyntheticSpec {
            kind: SyntheticKind::WhiteNoise,
            length: 512,
            seed: 3,
        })
        .unwrap();
        let scaled = ts(s.values().iter().map(|v| -2.5 * v + 7.0).collect());
        let f1 = fluctuation(&s, 16).unwrap();
        let f2 = fluctuation(&scaled, 16).unwrap();
        assert!((f2 - 2.5 * f1).abs() < 1e-9 * f2.abs().max(1.0));

        let config = DfaConfig::default_for_len(512).unwrap();
        let h1 = estimate_hurst(&s, &config).unwrap().hurst;
        let h2 = estimate_hurst(&scaled, &config).unwrap().hurst;
        assert!((h1 - h2).abs() < 1e-9);
    }

    #[test]
    fn both_ends_direction_runs() {
        let s = generate(&SyntheticSpec {
            kind: SyntheticKind::WhiteNoise,
            length: 1003,
            seed: 4,
        })
        .unwrap();
        let config = DfaConfig {
            min_scale: 10,
            max_scale: 250,
            scale_count: 20,
            direction: Direction::BothEnds,
        };
        let r = estimate_hurst(&s, &config).unwrap();
        assert!((r.hurst - 0.5).abs() < 0.15);
    }

    #[test]
    fn classification_contract() {
        let mk = |h: f64| DfaResult {
            points: vec![],
            hurst: h,
            fit: LinearFit {
                intercept: 0.0,
                slope: h,
                slope_se: 0.0,
                pearson_r: 1.0,
                r_squared: 1.0,
                adjusted_r_squared: 1.0,
                slope_p_value: 0.0,
                n: 0,
            },
        };
        assert_eq!(mk(0.3).classification(), Persistence::AntiPersistent);
        assert_eq!(mk(0.5).classification(), Persistence::Uncorrelated);
        assert_eq!(mk(0.7).classification(), Persistence::Persistent);
    }
}
