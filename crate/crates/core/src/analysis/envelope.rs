//! Normalized error ratios `|exact − main| / normalizer` over sampled `x`.
//!
//! A ratio that stays bounded (and stops growing) as `x` runs over several
//! decades is the numerical witness for the corresponding `O(·)` estimate.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{
    d3_main, d4_main, divisor_main, harmonic_log_main, harmonic_log_sums, mean_square_main,
    mobius_tails, SIX_OVER_PI_SQUARED,
};
use crate::error::{Error, Result};
use crate::sieve::SieveConfig;
use crate::summatory::Summator;

/// An asymptotic estimate whose error envelope can be sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    /// `Σ_{n≤x} lnᵏn/n = ln^{k+1}x/(k+1) + O(1)`.
    HarmonicLog(u32),
    /// `D₂(x) = x ln x + O(x)`.
    Divisor,
    /// `D₂(x) = x ln x + (2γ−1)x + O(√x)`.
    DivisorRefined,
    /// `D₃(y) = ½ y ln²y + O(y ln y)`.
    D3,
    /// `D₄(y) = ⅙ y ln³y + O(y ln²y)`.
    D4,
    /// `S(x) = π⁻² x ln³x + O(x ln²x)`.
    MeanSquare,
    /// `Σ_{δ≤√x} μ(δ)/δ² = 6/π² + O(x^{-1/2})`.
    MobiusTail,
}

impl Claim {
    pub fn main_term(self, x: f64) -> f64 {
        match self {
            Claim::HarmonicLog(k) => harmonic_log_main(x, k),
            Claim::Divisor => divisor_main(x, false),
            Claim::DivisorRefined => divisor_main(x, true),
            Claim::D3 => d3_main(x),
            Claim::D4 => d4_main(x),
            Claim::MeanSquare => mean_square_main(x),
            Claim::MobiusTail => SIX_OVER_PI_SQUARED,
        }
    }

    pub fn normalizer(self, x: f64) -> f64 {
        match self {
            Claim::HarmonicLog(_) => 1.0,
            Claim::Divisor => x,
            Claim::DivisorRefined => x.sqrt(),
            Claim::D3 => x * x.ln(),
            Claim::D4 | Claim::MeanSquare => x * x.ln().powi(2),
            Claim::MobiusTail => 1.0 / x.sqrt(),
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::HarmonicLog(k) => write!(f, "eq3:{k}"),
            Claim::Divisor => f.write_str("eq4"),
            Claim::DivisorRefined => f.write_str("eq4r"),
            Claim::D3 => f.write_str("d3"),
            Claim::D4 => f.write_str("d4"),
            Claim::MeanSquare => f.write_str("s"),
            Claim::MobiusTail => f.write_str("mobius"),
        }
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eq4" => Claim::Divisor,
            "eq4r" => Claim::DivisorRefined,
            "d3" => Claim::D3,
            "d4" => Claim::D4,
            "s" => Claim::MeanSquare,
            "mobius" => Claim::MobiusTail,
            _ => match s.strip_prefix("eq3:").map(str::parse::<u32>) {
                Some(Ok(k)) => Claim::HarmonicLog(k),
                _ => {
                    return Err(Error::Domain(format!(
                        "unknown claim `{s}` (expected eq3:K, eq4, eq4r, d3, d4, s or mobius)"
                    )))
                }
            },
        })
    }
}

impl Serialize for Claim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The exact side of a claim: an integer sum, or a real partial sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactValue {
    Integer(i128),
    Real(f64),
}

impl ExactValue {
    pub fn as_f64(self) -> f64 {
        match self {
            ExactValue::Integer(v) => v as f64,
            ExactValue::Real(v) => v,
        }
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExactValue::Integer(v) => crate::report::as_decimal(v, s),
            ExactValue::Real(v) => crate::report::real17(v, s),
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Integer(v) => write!(f, "{v}"),
            ExactValue::Real(v) => f.write_str(&crate::report::fmt17(*v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeSample {
    pub x: u64,
    pub exact: ExactValue,
    #[serde(serialize_with = "crate::report::real17")]
    pub main: f64,
    #[serde(serialize_with = "crate::report::real17")]
    pub normalizer: f64,
    #[serde(serialize_with = "crate::report::real17")]
    pub ratio: f64,
}

/// A sample dropped because its normalizer was not positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rejected {
    pub x: u64,
    pub reason: String,
}

/// Largest ratio among samples in one decade of the sampled range.
///
/// Decade `j` holds samples with `x_first·10^j < x ≤ x_first·10^{j+1}`
/// (decade 0 also holds `x_first` itself).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecadeMax {
    pub decade: u32,
    pub x_lo: u64,
    pub x_hi: u64,
    #[serde(serialize_with = "crate::report::real17")]
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub claim: Claim,
    pub samples: Vec<EnvelopeSample>,
    pub rejected: Vec<Rejected>,
    #[serde(serialize_with = "crate::report::real17")]
    pub sup_ratio: f64,
    pub trend: Vec<DecadeMax>,
}

impl EnvelopeReport {
    /// Whether the last decade's max ratio is at most the previous decade's.
    /// `None` with fewer than two decades.
    pub fn final_decades_nonincreasing(&self) -> Option<bool> {
        match self.trend.as_slice() {
            [.., prev, last] => Some(last.max_ratio <= prev.max_ratio),
            _ => None,
        }
    }
}

/// Samples `claim` at every `x` in `xs` with the default memory budget.
pub fn envelope(claim: Claim, xs: &[u64]) -> Result<EnvelopeReport> {
    envelope_with(claim, xs, &SieveConfig::default())
}

/// Samples `claim` at every `x` in `xs`. Duplicates are dropped and samples are
/// sorted by `x`; exact sides are computed in parallel.
pub fn envelope_with(claim: Claim, xs: &[u64], config: &SieveConfig) -> Result<EnvelopeReport> {
    if xs.len() < 2 {
        return Err(Error::Precondition(format!(
            "envelope needs at least 2 samples, got {}",
            xs.len()
        )));
    }
    let mut xs = xs.to_vec();
    xs.sort_unstable();
    xs.dedup();

    let mut rejected = Vec::new();
    let mut accepted = Vec::with_capacity(xs.len());
    for &x in &xs {
        let norm = if x == 0 {
            0.0
        } else {
            claim.normalizer(x as f64)
        };
        if norm > 0.0 && norm.is_finite() {
            accepted.push(x);
        } else {
            rejected.push(Rejected {
                x,
                reason: format!("normalizer for claim {claim} is {norm} at x = {x}"),
            });
        }
    }
    if accepted.is_empty() {
        return Err(Error::Precondition(format!(
            "no sample of claim {claim} has a positive normalizer"
        )));
    }

    let exact = exact_values(claim, &accepted, config)?;
    let samples: Vec<EnvelopeSample> = accepted
        .iter()
        .zip(exact)
        .map(|(&x, exact)| {
            let xf = x as f64;
            let main = claim.main_term(xf);
            let normalizer = claim.normalizer(xf);
            EnvelopeSample {
                x,
                exact,
                main,
                normalizer,
                ratio: (exact.as_f64() - main).abs() / normalizer,
            }
        })
        .collect();

    let sup_ratio = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let trend = decade_trend(&samples);
    Ok(EnvelopeReport {
        claim,
        samples,
        rejected,
        sup_ratio,
        trend,
    })
}

fn exact_values(claim: Claim, xs: &[u64], config: &SieveConfig) -> Result<Vec<ExactValue>> {
    let summator = Summator::new(*config);
    let integer = |f: &(dyn Fn(u64) -> Result<i128> + Sync)| -> Result<Vec<ExactValue>> {
        xs.par_iter()
            .map(|&x| f(x).map(ExactValue::Integer))
            .collect()
    };
    match claim {
        Claim::HarmonicLog(k) => Ok(harmonic_log_sums(xs, k)
            .into_iter()
            .map(ExactValue::Real)
            .collect()),
        Claim::MobiusTail => Ok(mobius_tails(xs, config)?
            .into_iter()
            .map(|t| ExactValue::Real(t.partial))
            .collect()),
        Claim::Divisor | Claim::DivisorRefined => integer(&|x| Ok(summator.hyperbola(x)?.value)),
        Claim::D3 => integer(&|x| Ok(summator.dk_recursive(3, x)?.value)),
        Claim::D4 => integer(&|x| Ok(summator.d4(x)?.value)),
        Claim::MeanSquare => integer(&|x| Ok(summator.mean_square(x)?.value)),
    }
}

fn decade_of(x: u64, first: u64) -> u32 {
    let r = x as f64 / first as f64;
    if r <= 10.0 {
        return 0;
    }
    // Tolerate rounding so that exact powers of ten close their decade.
    ((r.log10() - 1e-9).ceil() as u32).saturating_sub(1)
}

fn decade_trend(samples: &[EnvelopeSample]) -> Vec<DecadeMax> {
    let Some(first) = samples.first().map(|s| s.x) else {
        return Vec::new();
    };
    let mut trend: Vec<DecadeMax> = Vec::new();
    for s in samples {
        let decade = decade_of(s.x, first);
        match trend.last_mut() {
            Some(d) if d.decade == decade => {
                d.x_hi = s.x;
                d.max_ratio = d.max_ratio.max(s.ratio);
            }
            _ => trend.push(DecadeMax {
                decade,
                x_lo: s.x,
                x_hi: s.x,
                max_ratio: s.ratio,
            }),
        }
    }
    trend
}
