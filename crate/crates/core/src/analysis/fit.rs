use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::AsymptoticModel;
use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 8;
/// Required ratio `x_max / x_min` (three decades).
pub const MIN_FIT_SPAN: f64 = 1000.0;
/// Largest acceptable 2-norm condition number of the centered basis.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResidual {
    pub x: u64,
    /// `(exact − model)/x`.
    #[serde(serialize_with = "crate::report::real17")]
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub model: AsymptoticModel,
    pub x_min: u64,
    pub x_max: u64,
    pub count: usize,
    pub residuals: Vec<FitResidual>,
    #[serde(serialize_with = "crate::report::real17")]
    pub max_abs_residual: f64,
    /// Condition number of the centered ln-power basis.
    #[serde(serialize_with = "crate::report::real17")]
    pub condition: f64,
}

/// Least-squares fit of `value/x` against `{ln³x, ln²x, ln x, 1}`.
///
/// The basis is built in powers of `t = ln x − mean(ln x)` and solved by
/// Householder QR; the coefficients are then re-expanded in powers of `ln x`.
pub fn fit_log_poly(samples: &[(u64, f64)]) -> Result<FitReport> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::Precondition(format!(
            "fit needs at least {MIN_FIT_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(x, _)) = samples.iter().find(|(x, _)| *x < 2) {
        return Err(Error::Precondition(format!(
            "fit samples need x >= 2, got {x}"
        )));
    }
    let x_min = samples.iter().map(|s| s.0).min().unwrap();
    let x_max = samples.iter().map(|s| s.0).max().unwrap();
    if (x_max as f64) < MIN_FIT_SPAN * x_min as f64 {
        return Err(Error::Precondition(format!(
            "fit samples must span at least three decades, got [{x_min}, {x_max}]"
        )));
    }

    let logs: Vec<f64> = samples.iter().map(|&(x, _)| (x as f64).ln()).collect();
    let center = logs.iter().sum::<f64>() / logs.len() as f64;
    let n = samples.len();
    let basis = DMatrix::from_fn(n, 4, |i, j| (logs[i] - center).powi(3 - j as i32));
    let target = DVector::from_iterator(n, samples.iter().map(|&(x, v)| v / x as f64));

    let sv = basis.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned {
            condition,
            limit: MAX_CONDITION,
        });
    }

    let (q, r) = basis.qr().unpack();
    let qtb = q.transpose() * &target;
    let b = r
        .solve_upper_triangular(&qtb)
        .ok_or(Error::IllConditioned {
            condition: f64::INFINITY,
            limit: MAX_CONDITION,
        })?;

    // b3 t³ + b2 t² + b1 t + b0 with t = L − c, expanded in powers of L.
    let c = center;
    let (b3, b2, b1, b0) = (b[0], b[1], b[2], b[3]);
    let model = AsymptoticModel::new(
        b3,
        b2 - 3.0 * c * b3,
        b1 - 2.0 * c * b2 + 3.0 * c * c * b3,
        b0 - c * b1 + c * c * b2 - c * c * c * b3,
    );

    let residuals: Vec<FitResidual> = samples
        .iter()
        .zip(&logs)
        .zip(target.iter())
        .map(|((&(x, _), &l), &y)| {
            let t = l - c;
            let fitted = ((b3 * t + b2) * t + b1) * t + b0;
            FitResidual {
                x,
                residual: y - fitted,
            }
        })
        .collect();
    let max_abs_residual = residuals
        .iter()
        .map(|r| r.residual.abs())
        .fold(0.0, f64::max);

    Ok(FitReport {
        model,
        x_min,
        x_max,
        count: n,
        residuals,
        max_abs_residual,
        condition,
    })
}
