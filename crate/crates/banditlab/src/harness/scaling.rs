//! Power-law fitting for regret-vs-horizon curves.
//!
//! A learner with `R(T) ≈ c·T^α` shows up as a line of slope `α` in ln–ln
//! space; [`fit_scaling`] recovers `α` by ordinary least squares and reports
//! enough diagnostics to judge whether a line was a sane model at all.

use serde::Serialize;

use super::HarnessError;

/// OLS fit of `ln y = slope·ln x + intercept`.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Half-width of the 95% confidence interval for the slope
    /// (Student-t with `points_used − 2` degrees of freedom).
    pub ci95: f64,
    /// ln-space residuals, in input order of the used points.
    pub residuals: Vec<f64>,
    pub points_used: usize,
    /// Points dropped because `x ≤ 0` or `y ≤ 0` has no logarithm.
    pub points_excluded: usize,
}

impl ScalingFit {
    /// The fitted curve evaluated at `x`.
    pub fn fitted(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Two-sided 97.5% Student-t quantile; flattens to the normal 1.96 for
/// large samples.
fn t_quantile_975(df: usize) -> f64 {
    const TABLE: [f64; 30] = [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179,
        2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
        2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    ];
    match df {
        0 => f64::INFINITY,
        d if d <= TABLE.len() => TABLE[d - 1],
        _ => 1.96,
    }
}

/// Fits a power law through `(x, y)` points. Needs at least four usable
/// points (fewer cannot distinguish a trend from noise), and at least two
/// distinct `x` values.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit, HarnessError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let points_excluded = points.len() - usable.len();
    if usable.len() < 4 {
        return Err(HarnessError::NotEnoughPoints {
            need: 4,
            got: usable.len(),
        });
    }
    let n = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::Spec(
            "scaling fit needs at least two distinct x values".into(),
        ));
    }
    let sxy: f64 = usable
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let residuals: Vec<f64> = usable
        .iter()
        .map(|&(x, y)| y - (intercept + slope * x))
        .collect();
    let df = usable.len() - 2;
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let slope_stderr = if df > 0 { (ssr / df as f64 / sxx).sqrt() } else { 0.0 };
    let ci95 = t_quantile_975(df) * slope_stderr;

    Ok(ScalingFit {
        slope,
        intercept,
        slope_stderr,
        ci95,
        residuals,
        points_used: usable.len(),
        points_excluded,
    })
}
