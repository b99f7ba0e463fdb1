//! Pointwise tables of μ, d, d_k and d² on `[1, N]`.
//!
//! Every supported function is multiplicative and its value on a prime power
//! `p^e` depends only on `e`, so both sieves below reduce to tracking prime
//! exponents. [`sieve`] uses a linear (smallest-prime-factor) sieve and keeps
//! the whole table in memory; [`SegmentedSieve`] marks multiples of each prime
//! one fixed-size window at a time and is used when the table would be too
//! large, or as an independent cross-check.

mod linear;
mod segmented;
pub mod verify;

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use linear::sieve;
pub use segmented::{Segment, SegmentedSieve};

/// Header line of the CSV table export.
pub const CSV_HEADER: &str = "n,value";

/// Which arithmetic function a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithmeticKind {
    /// Möbius function μ(n).
    Mobius,
    /// Number of divisors d(n) = d₂(n).
    Divisor,
    /// Piltz divisor function d_k(n), k ≥ 1.
    DivisorK(u32),
    /// d(n)².
    DivisorSquared,
}

impl ArithmeticKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            ArithmeticKind::DivisorK(0) => {
                Err(Error::Domain("divisor_k requires k >= 1".to_string()))
            }
            k => Ok(k),
        }
    }

    pub fn is_signed(self) -> bool {
        matches!(self, ArithmeticKind::Mobius)
    }

    /// Value of the function at `p^e` for any prime `p`, `e ≥ 1`.
    pub fn prime_power_value(self, e: u32) -> Result<i128> {
        debug_assert!(e >= 1);
        Ok(match self {
            ArithmeticKind::Mobius => {
                if e == 1 {
                    -1
                } else {
                    0
                }
            }
            ArithmeticKind::Divisor => i128::from(e) + 1,
            ArithmeticKind::DivisorSquared => (i128::from(e) + 1).pow(2),
            ArithmeticKind::DivisorK(k) => {
                binomial(u64::from(e) + u64::from(k) - 1, u64::from(k) - 1)?
            }
        })
    }

    /// `prime_power_value(e)` for `e = 0..=max_exp` (index 0 holds f(1) = 1).
    pub(crate) fn exponent_table(self, max_exp: u32) -> Result<Vec<i128>> {
        let mut out = Vec::with_capacity(max_exp as usize + 1);
        out.push(1);
        for e in 1..=max_exp {
            out.push(self.prime_power_value(e)?);
        }
        Ok(out)
    }

    /// Bytes per stored value.
    pub(crate) fn value_width(self) -> u64 {
        if self.is_signed() {
            1
        } else {
            8
        }
    }
}

fn binomial(n: u64, k: u64) -> Result<i128> {
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc
            .checked_mul(i128::from(n - i))
            .ok_or(Error::Overflow("binomial coefficient"))?
            / i128::from(i + 1);
    }
    Ok(acc)
}

impl fmt::Display for ArithmeticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithmeticKind::Mobius => f.write_str("mu"),
            ArithmeticKind::Divisor => f.write_str("d"),
            ArithmeticKind::DivisorK(k) => write!(f, "dk:{k}"),
            ArithmeticKind::DivisorSquared => f.write_str("d2"),
        }
    }
}

impl FromStr for ArithmeticKind {
    type Err = Error;

    /// Parses the selectors `mu`, `d`, `dk:K` and `d2`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu" => Ok(ArithmeticKind::Mobius),
            "d" => Ok(ArithmeticKind::Divisor),
            "d2" => Ok(ArithmeticKind::DivisorSquared),
            _ => {
                let k = s
                    .strip_prefix("dk:")
                    .and_then(|k| k.parse::<u32>().ok())
                    .ok_or_else(|| {
                        Error::Domain(format!(
                            "unknown function `{s}` (expected mu, d, dk:K or d2)"
                        ))
                    })?;
                ArithmeticKind::DivisorK(k).validate()
            }
        }
    }
}

/// Memory and segmentation settings for table construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Upper bound on bytes a single table build may allocate.
    pub memory_cap: u64,
    /// Tables with more entries than this are streamed in segments.
    pub segment_threshold: u64,
    /// Entries per streamed segment.
    pub segment_len: u64,
}

impl SieveConfig {
    pub const DEFAULT_MEMORY_CAP: u64 = 2 << 30;
    pub const DEFAULT_SEGMENT_THRESHOLD: u64 = 100_000_000;
    pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 18;

    pub fn with_memory_cap(mut self, cap: u64) -> Self {
        self.memory_cap = cap;
        self
    }

    pub(crate) fn check(&self, what: &'static str, requested: u64) -> Result<()> {
        if requested > self.memory_cap {
            return Err(Error::Sizing {
                what,
                requested,
                cap: self.memory_cap,
            });
        }
        Ok(())
    }
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            memory_cap: Self::DEFAULT_MEMORY_CAP,
            segment_threshold: Self::DEFAULT_SEGMENT_THRESHOLD,
            segment_len: Self::DEFAULT_SEGMENT_LEN,
        }
    }
}

/// Storage for table values: μ is kept as `i8`, the divisor functions as `u64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableValues {
    Signed(Vec<i8>),
    Unsigned(Vec<u64>),
}

impl TableValues {
    pub fn len(&self) -> usize {
        match self {
            TableValues::Signed(v) => v.len(),
            TableValues::Unsigned(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value at zero-based offset `i`.
    #[inline]
    pub fn at(&self, i: usize) -> i128 {
        match self {
            TableValues::Signed(v) => i128::from(v[i]),
            TableValues::Unsigned(v) => i128::from(v[i]),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i128> + '_ {
        (0..self.len()).map(move |i| self.at(i))
    }

    /// Sum of all entries, exact.
    pub fn sum(&self) -> Result<i128> {
        match self {
            TableValues::Signed(v) => Ok(v.iter().map(|&x| i128::from(x)).sum()),
            TableValues::Unsigned(v) => v.iter().try_fold(0i128, |acc, &x| {
                acc.checked_add(i128::from(x))
                    .ok_or(Error::Overflow("table sum"))
            }),
        }
    }
}

/// Exact values of one arithmetic function on `1..=limit`.
///
/// Immutable once built; share it across threads by reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithmeticTable {
    kind: ArithmeticKind,
    limit: u64,
    values: TableValues,
}

impl ArithmeticTable {
    pub(crate) fn new(kind: ArithmeticKind, values: TableValues) -> Self {
        Self {
            kind,
            limit: values.len() as u64,
            values,
        }
    }

    pub fn kind(&self) -> ArithmeticKind {
        self.kind
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn values(&self) -> &TableValues {
        &self.values
    }

    /// Value at `n`, or a coverage error when `n` is outside `1..=limit`.
    pub fn get(&self, n: u64) -> Result<i128> {
        if n == 0 || n > self.limit {
            return Err(Error::Coverage {
                what: kind_name(self.kind),
                needed: n,
                limit: self.limit,
            });
        }
        Ok(self.values.at(n as usize - 1))
    }

    /// Value at `n`; panics when out of range.
    #[inline]
    pub fn at(&self, n: u64) -> i128 {
        self.values.at(n as usize - 1)
    }

    /// Writes the table as CSV: `n,value` header, then one row per `n`.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        write_csv_rows(1, &self.values, out)
    }
}

pub(crate) fn kind_name(kind: ArithmeticKind) -> &'static str {
    match kind {
        ArithmeticKind::Mobius => "mobius",
        ArithmeticKind::Divisor => "divisor",
        ArithmeticKind::DivisorK(_) => "divisor_k",
        ArithmeticKind::DivisorSquared => "divisor_squared",
    }
}

/// Writes CSV rows (no header) for values starting at `start`.
pub fn write_csv_rows<W: Write + ?Sized>(
    start: u64,
    values: &TableValues,
    out: &mut W,
) -> io::Result<()> {
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{},{}", start + i as u64, v)?;
    }
    Ok(())
}
