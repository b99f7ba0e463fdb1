//! Pointwise identity checks over sieved tables.

use serde::Serialize;

use super::{sieve, ArithmeticKind, ArithmeticTable, SieveConfig};
use crate::arith::isqrt;
use crate::error::{Error, Result};

/// Tables needed to evaluate `Σ_{δ²|n} μ(δ)·d₄(n/δ²)`.
#[derive(Debug, Clone)]
pub struct ConvolutionTables {
    pub d4: ArithmeticTable,
    pub mobius: ArithmeticTable,
}

impl ConvolutionTables {
    /// Builds d₄ on `1..=limit` and μ on `1..=⌊√limit⌋`.
    pub fn build(limit: u64, config: &SieveConfig) -> Result<Self> {
        Ok(Self {
            d4: sieve(ArithmeticKind::DivisorK(4), limit, config)?,
            mobius: sieve(ArithmeticKind::Mobius, isqrt(limit).max(1), config)?,
        })
    }
}

/// Returns `Σ_{δ² | n} μ(δ)·d₄(n/δ²)`, which should equal `d(n)²`.
pub fn convolution_check(n: u64, tables: &ConvolutionTables) -> Result<i128> {
    if tables.d4.kind() != ArithmeticKind::DivisorK(4)
        || tables.mobius.kind() != ArithmeticKind::Mobius
    {
        return Err(Error::Precondition(
            "convolution check needs a d_4 table and a mobius table".to_string(),
        ));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1, got 0".to_string()));
    }
    let root = isqrt(n);
    if n > tables.d4.limit() {
        return Err(Error::Coverage {
            what: "divisor_k(4)",
            needed: n,
            limit: tables.d4.limit(),
        });
    }
    if root > tables.mobius.limit() {
        return Err(Error::Coverage {
            what: "mobius",
            needed: root,
            limit: tables.mobius.limit(),
        });
    }
    let mut acc = 0i128;
    for delta in 1..=root {
        let sq = delta * delta;
        if n.is_multiple_of(sq) {
            acc += tables.mobius.at(delta) * tables.d4.at(n / sq);
        }
    }
    Ok(acc)
}

/// Which identity a [`VerifyReport`] checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// d(n)² = Σ_{δ²|n} μ(δ) d₄(n/δ²).
    Convolution,
    /// d_k(n) = Σ_{a|n} d_{k−1}(n/a) for k = 2, 3, 4.
    DkRecursion,
    /// Σ_{d|n} μ(d) = [n = 1].
    MobiusSum,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::Convolution => "convolution",
            Identity::DkRecursion => "dk-recursion",
            Identity::MobiusSum => "mobius-sum",
        }
    }
}

impl std::str::FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convolution" => Ok(Identity::Convolution),
            "dk-recursion" => Ok(Identity::DkRecursion),
            "mobius-sum" => Ok(Identity::MobiusSum),
            _ => Err(Error::Domain(format!(
                "unknown identity `{s}` (expected convolution, dk-recursion or mobius-sum)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: u64,
    #[serde(serialize_with = "crate::report::as_decimal")]
    pub expected: i128,
    #[serde(serialize_with = "crate::report::as_decimal")]
    pub actual: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub identity: Identity,
    pub limit: u64,
    pub checked: u64,
    pub passed: u64,
    pub first_mismatch: Option<Mismatch>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.passed == self.checked
    }

    /// `"<passed>/<checked> ok"` or `"<passed>/<checked> FAILED (n=...)"`.
    pub fn summary(&self) -> String {
        match &self.first_mismatch {
            None => format!("{}/{} ok", self.passed, self.checked),
            Some(m) => format!(
                "{}/{} FAILED (first mismatch at n={}: expected {}, got {})",
                self.passed, self.checked, m.n, m.expected, m.actual
            ),
        }
    }
}

/// Checks `identity` for every `n ≤ limit`.
pub fn verify(identity: Identity, limit: u64, config: &SieveConfig) -> Result<VerifyReport> {
    if limit == 0 {
        return Err(Error::Domain("limit must be at least 1, got 0".to_string()));
    }
    let mut report = VerifyReport {
        identity,
        limit,
        checked: 0,
        passed: 0,
        first_mismatch: None,
    };
    let mut record = |n: u64, expected: i128, actual: i128| {
        report.checked += 1;
        if expected == actual {
            report.passed += 1;
        } else if report.first_mismatch.is_none() {
            report.first_mismatch = Some(Mismatch {
                n,
                expected,
                actual,
            });
        }
    };
    match identity {
        Identity::Convolution => {
            let tables = ConvolutionTables::build(limit, config)?;
            let d = sieve(ArithmeticKind::Divisor, limit, config)?;
            for n in 1..=limit {
                let dn = d.at(n);
                record(n, dn * dn, convolution_check(n, &tables)?);
            }
        }
        Identity::DkRecursion => {
            let mut prev = sieve(ArithmeticKind::DivisorK(1), limit, config)?;
            for k in 2..=4 {
                let direct = sieve(ArithmeticKind::DivisorK(k), limit, config)?;
                let folded = sum_over_divisors(&prev);
                for n in 1..=limit {
                    record(n, direct.at(n), folded[n as usize - 1]);
                }
                prev = direct;
            }
        }
        Identity::MobiusSum => {
            let mu = sieve(ArithmeticKind::Mobius, limit, config)?;
            let folded = sum_over_divisors(&mu);
            for n in 1..=limit {
                record(n, i128::from(n == 1), folded[n as usize - 1]);
            }
        }
    }
    Ok(report)
}

/// `g(n) = Σ_{a | n} f(a)` for every `n` in the table's range.
fn sum_over_divisors(f: &ArithmeticTable) -> Vec<i128> {
    let limit = f.limit();
    let mut out = vec![0i128; limit as usize];
    for a in 1..=limit {
        let fa = f.at(a);
        let mut m = a;
        while m <= limit {
            out[m as usize - 1] += fa;
            m += a;
        }
    }
    out
}
