//! Simple ordinary-least-squares machinery shared by every log-log and
//! semi-log fit in the analysis pipeline.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::student_t_sf;

/// A fitted line `y = intercept + slope * x` with the usual diagnostics.
///
/// `slope_p_value` is the two-sided t-test of slope = 0 with n - 2 degrees
/// of freedom.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_se: f64,
    pub pearson_r: f64,
    pub r_squared: f64,
    pub adjusted_r_squared: f64,
    pub slope_p_value: f64,
    pub n: usize,
}

/// Closed-form simple OLS of `y` on `x`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::BadRegressionInput { x: x.len(), y: y.len() });
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateRegression("x is constant"));
    }
    if syy == 0.0 {
        return Err(Error::DegenerateRegression("y is constant"));
    }

    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let pearson_r = sxy / (sxx * syy).sqrt();
    let ss_res = (syy - slope * sxy).max(0.0);
    let r_squared = 1.0 - ss_res / syy;
    let adjusted_r_squared = 1.0 - (1.0 - r_squared) * (n - 1.0) / (n - 2.0);

    let df = n - 2.0;
    let slope_se = (ss_res / df / sxx).sqrt();
    let slope_p_value = if slope_se == 0.0 {
        0.0
    } else {
        2.0 * student_t_sf((slope / slope_se).abs(), df)
    };

    Ok(LinearFit {
        intercept,
        slope,
        slope_se,
        pearson_r,
        r_squared,
        adjusted_r_squared,
        slope_p_value,
        n: x.len(),
    })
}

/// Product-moment correlation; `None` when either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
