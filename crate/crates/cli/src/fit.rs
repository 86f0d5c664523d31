//! Least-squares scaling fits over sweep rows.

use crate::sweep::SweepRow;
use crate::{Error, Result};

/// The regression model: which transform of the x variable the response is
/// linear in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `y = a·log₂x + b`
    Log2,
    /// `y = a·x + b`
    Linear,
}

impl FitModel {
    fn transform(self, x: f64) -> Result<f64> {
        match self {
            FitModel::Log2 => {
                if x <= 0.0 {
                    Err(Error::Fit(format!("log₂ regressor needs x > 0, got {x}")))
                } else {
                    Ok(x.log2())
                }
            }
            FitModel::Linear => Ok(x),
        }
    }
}

/// Which grid coordinate plays the x role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XVar {
    T,
    M,
}

impl XVar {
    pub fn of(self, row: &SweepRow) -> f64 {
        match self {
            XVar::T => row.t as f64,
            XVar::M => row.m as f64,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            XVar::T => "t",
            XVar::M => "m",
        }
    }
}

/// Fit coefficients and goodness of fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `y` against the model-transformed `x`.
/// Needs at least three points and a non-constant regressor.
pub fn fit_scaling(points: &[(f64, f64)], model: FitModel) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points
        .iter()
        .map(|&(x, _)| model.transform(x))
        .collect::<Result<_>>()?;
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();

    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx < 1e-300 {
        return Err(Error::Fit("regressor is constant across rows".to_string()));
    }
    let a = sxy / sxx;
    let b = y_mean - a * x_mean;

    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        ss_res += (y - (a * x + b)).powi(2);
        ss_tot += (y - y_mean).powi(2);
    }
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else if ss_res <= 1e-300 {
        1.0
    } else {
        0.0
    };
    Ok(FitResult { a, b, r_squared })
}

/// Pulls `(x, column)` pairs out of sweep rows, skipping rows where the
/// column is absent, then fits.
pub fn fit_rows(rows: &[SweepRow], column: &str, x: XVar, model: FitModel) -> Result<FitResult> {
    let mut points = Vec::new();
    for row in rows {
        let value = row
            .get(column)
            .ok_or_else(|| Error::Fit(format!("unknown column {column:?}")))?;
        if let Some(y) = value {
            points.push((x.of(row), y));
        }
    }
    fit_scaling(&points, model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_log_law() {
        // y = 2·log₂t + 1, noiseless.
        let points: Vec<(f64, f64)> = [4u32, 16, 64, 256, 1024]
            .iter()
            .map(|&t| (t as f64, 2.0 * (t as f64).log2() + 1.0))
            .collect();
        let fit = fit_scaling(&points, FitModel::Log2).unwrap();
        assert!((fit.a - 2.0).abs() < 1e-12);
        assert!((fit.b - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recovers_exact_linear_law() {
        let points: Vec<(f64, f64)> = (1..=6).map(|t| (t as f64, 3.0 * t as f64 - 2.0)).collect();
        let fit = fit_scaling(&points, FitModel::Linear).unwrap();
        assert!((fit.a - 3.0).abs() < 1e-12);
        assert!((fit.b + 2.0).abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(fit_scaling(&[(1.0, 1.0), (2.0, 2.0)], FitModel::Linear).is_err());
        let constant = [(4.0, 1.0), (4.0, 2.0), (4.0, 3.0)];
        assert!(fit_scaling(&constant, FitModel::Linear).is_err());
        let negative = [(0.0, 1.0), (2.0, 2.0), (4.0, 3.0)];
        assert!(fit_scaling(&negative, FitModel::Log2).is_err());
    }

    #[test]
    fn constant_response_has_unit_r_squared() {
        let flat = [(1.0, 5.0), (2.0, 5.0), (3.0, 5.0)];
        let fit = fit_scaling(&flat, FitModel::Linear).unwrap();
        assert_eq!(fit.a, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn fit_rows_skips_missing_cells() {
        let mut rows = Vec::new();
        for t in [4u64, 16, 64, 256] {
            let mut row = SweepRow {
                t,
                m: 1,
                ..SweepRow::default()
            };
            row.lb_scheme_a = if t == 4 {
                None
            } else {
                Some((t as f64).log2())
            };
            rows.push(row);
        }
        let fit = fit_rows(&rows, "LB_schemeA", XVar::T, FitModel::Log2).unwrap();
        assert!((fit.a - 1.0).abs() < 1e-12);
        assert!(fit_rows(&rows, "nope", XVar::T, FitModel::Log2).is_err());
    }
}
