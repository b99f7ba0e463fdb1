//! Main terms, error envelopes and least-squares fits for the divisor sums.
//!
//! Logarithms are natural throughout.

mod envelope;
mod fit;

use serde::Serialize;

use crate::arith::{isqrt, CompensatedSum};
use crate::error::{Error, Result};
use crate::sieve::{sieve, ArithmeticKind, SieveConfig};

pub use envelope::{
    envelope, envelope_with, Claim, DecadeMax, EnvelopeReport, EnvelopeSample, ExactValue, Rejected,
};
pub use fit::{fit_log_poly, FitReport, FitResidual, MAX_CONDITION, MIN_FIT_SAMPLES, MIN_FIT_SPAN};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;
/// 1/π², the leading coefficient of `Σ d(n)²`.
pub const INV_PI_SQUARED: f64 = 0.101_321_183_642_337_771_443_879_463_209_727_3;
/// 6/π² = 1/ζ(2).
pub const SIX_OVER_PI_SQUARED: f64 = 0.607_927_101_854_026_628_663_276_779_258_363_8;

/// Coefficients of `x·(a3·ln³x + a2·ln²x + a1·ln x + a0)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AsymptoticModel {
    #[serde(serialize_with = "crate::report::real17")]
    pub a3: f64,
    #[serde(serialize_with = "crate::report::real17")]
    pub a2: f64,
    #[serde(serialize_with = "crate::report::real17")]
    pub a1: f64,
    #[serde(serialize_with = "crate::report::real17")]
    pub a0: f64,
}

impl AsymptoticModel {
    pub fn new(a3: f64, a2: f64, a1: f64, a0: f64) -> Self {
        Self { a3, a2, a1, a0 }
    }

    /// The leading term `π⁻²·x·ln³x` alone.
    pub fn leading() -> Self {
        Self::new(INV_PI_SQUARED, 0.0, 0.0, 0.0)
    }

    /// `a3·L³ + a2·L² + a1·L + a0` with `L = ln x`, i.e. the model divided by x.
    pub fn per_x(&self, x: f64) -> f64 {
        let l = x.ln();
        ((self.a3 * l + self.a2) * l + self.a1) * l + self.a0
    }

    pub fn eval(&self, x: f64) -> f64 {
        x * self.per_x(x)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(c * self.a3, c * self.a2, c * self.a1, c * self.a0)
    }
}

/// `Σ_{n≤x} lnᵏ(n)/n`, with compensated summation. The empty sum (x = 0) is 0.
pub fn harmonic_log_sum(x: u64, k: u32) -> f64 {
    harmonic_log_sums(&[x], k)[0]
}

/// [`harmonic_log_sum`] at several points, from a single pass up to the largest.
pub fn harmonic_log_sums(points: &[u64], k: u32) -> Vec<f64> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| points[i]);
    let mut out = vec![0.0; points.len()];
    let mut acc = CompensatedSum::new();
    let mut n = 0u64;
    for i in order {
        while n < points[i] {
            n += 1;
            let nf = n as f64;
            acc.add(nf.ln().powi(k as i32) / nf);
        }
        out[i] = acc.value();
    }
    out
}

/// `ln^{k+1}(x)/(k+1)`.
pub fn harmonic_log_main(x: f64, k: u32) -> f64 {
    x.ln().powi(k as i32 + 1) / f64::from(k + 1)
}

/// `x·ln x`, plus `(2γ − 1)·x` when `refined`.
pub fn divisor_main(x: f64, refined: bool) -> f64 {
    let main = x * x.ln();
    if refined {
        main + (2.0 * EULER_GAMMA - 1.0) * x
    } else {
        main
    }
}

/// `π⁻²·x·ln³x`.
pub fn mean_square_main(x: f64) -> f64 {
    INV_PI_SQUARED * x * x.ln().powi(3)
}

/// `½·y·ln²y`, the main term of `D₃(y)`.
pub fn d3_main(y: f64) -> f64 {
    0.5 * y * y.ln().powi(2)
}

/// `⅙·y·ln³y`, the main term of `D₄(y)`.
pub fn d4_main(y: f64) -> f64 {
    y * y.ln().powi(3) / 6.0
}

/// Truncated series `Σ_{δ≤√x} μ(δ)/δ²` and its limit `6/π²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobiusTail {
    #[serde(serialize_with = "crate::report::real17")]
    pub partial: f64,
    #[serde(serialize_with = "crate::report::real17")]
    pub limit: f64,
}

pub fn mobius_tail(x: u64) -> Result<MobiusTail> {
    Ok(mobius_tails(&[x], &SieveConfig::default())?[0])
}

/// [`mobius_tail`] at several points, sharing one μ table.
pub fn mobius_tails(points: &[u64], config: &SieveConfig) -> Result<Vec<MobiusTail>> {
    if points.contains(&0) {
        return Err(Error::Domain("x must be at least 1, got 0".to_string()));
    }
    let Some(&max) = points.iter().max() else {
        return Ok(Vec::new());
    };
    let mu = sieve(ArithmeticKind::Mobius, isqrt(max), config)?;
    Ok(points
        .iter()
        .map(|&x| {
            // Smallest terms first.
            let mut acc = CompensatedSum::new();
            for delta in (1..=isqrt(x)).rev() {
                let m = mu.at(delta);
                if m != 0 {
                    let d = delta as f64;
                    acc.add(m as f64 / (d * d));
                }
            }
            MobiusTail {
                partial: acc.value(),
                limit: SIX_OVER_PI_SQUARED,
            }
        })
        .collect())
}

/// `points` integers spaced geometrically from `x_min` to `x_max` inclusive,
/// rounded to the nearest integer, duplicates removed.
pub fn geometric_grid(x_min: u64, x_max: u64, points: usize) -> Result<Vec<u64>> {
    if x_min == 0 {
        return Err(Error::Domain("x_min must be at least 1".to_string()));
    }
    if x_max <= x_min {
        return Err(Error::Domain(format!(
            "x_max ({x_max}) must exceed x_min ({x_min})"
        )));
    }
    if points < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 grid points, got {points}"
        )));
    }
    let ratio = x_max as f64 / x_min as f64;
    let last = points - 1;
    let mut grid: Vec<u64> = (0..points)
        .map(|i| match i {
            0 => x_min,
            i if i == last => x_max,
            i => (x_min as f64 * ratio.powf(i as f64 / last as f64)).round() as u64,
        })
        .collect();
    grid.dedup();
    Ok(grid)
}
