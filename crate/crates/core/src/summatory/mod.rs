//! Exact summatory functions `D_k(x) = Σ_{n≤x} d_k(n)` and `S(x) = Σ_{n≤x} d(n)²`.
//!
//! Every function has a sieve oracle (a prefix sum over a sieved table) and at
//! least one sublinear evaluation:
//!
//! * `D₂` by the hyperbola method, `O(√x)`.
//! * `D₄` from `d₄ = d₂ ∗ d₂` split at `√x`, `O(x^{3/4})` with `D₂` memoized
//!   over the quotient set of `x`.
//! * `D_k` by `D_k(x) = Σ_{m≤x} D_{k−1}(⌊x/m⌋)`, grouped into floor-quotient
//!   blocks and evaluated level by level over the quotient set.
//! * `S(x) = Σ_{δ≤√x} μ(δ)·D₄(⌊x/δ²⌋)`, sharing one `D₂` cache across all δ.
//!
//! All accumulation is in checked `i128`.

mod quotients;

use serde::Serialize;

use crate::arith::{self, isqrt, require_positive};
use crate::error::{Error, Result};
use crate::sieve::{sieve, ArithmeticKind, ArithmeticTable, SegmentedSieve, SieveConfig};

use quotients::QuotientIndex;
pub use quotients::{floor_quotients, Block, FloorBlocks, FloorQuotients};

/// How a [`SummatoryValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sieve,
    Hyperbola,
    DirichletSquare,
    MobiusWeighted,
    Recursion,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sieve => "sieve",
            Method::Hyperbola => "hyperbola",
            Method::DirichletSquare => "dirichlet_square",
            Method::MobiusWeighted => "mobius_weighted",
            Method::Recursion => "recursion",
        }
    }
}

/// An exact value `Σ_{n≤x} f(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummatoryValue {
    pub x: u64,
    pub function: ArithmeticKind,
    pub method: Method,
    pub value: i128,
}

/// Sublinear evaluator with a memory budget for its quotient caches and tables.
#[derive(Debug, Clone, Copy, Default)]
pub struct Summator {
    pub config: SieveConfig,
}

impl Summator {
    pub fn new(config: SieveConfig) -> Self {
        Self { config }
    }

    /// `Σ_{n≤x} f(n)` from a sieved table (streamed in segments above the threshold).
    pub fn oracle(&self, kind: ArithmeticKind, x: u64) -> Result<SummatoryValue> {
        require_summable(kind)?;
        require_positive(x, "x")?;
        let value = oracle_prefix_sums(kind, &[x], &self.config)?[0];
        Ok(SummatoryValue {
            x,
            function: kind,
            method: Method::Sieve,
            value,
        })
    }

    /// `D₂(x) = 2·Σ_{n≤√x} ⌊x/n⌋ − ⌊√x⌋²`.
    pub fn hyperbola(&self, x: u64) -> Result<SummatoryValue> {
        require_positive(x, "x")?;
        Ok(SummatoryValue {
            x,
            function: ArithmeticKind::Divisor,
            method: Method::Hyperbola,
            value: hyperbola_d2(x)?,
        })
    }

    /// `D₄(x) = 2·Σ_{n≤√x} d(n)·D₂(⌊x/n⌋) − D₂(⌊√x⌋)²`.
    pub fn d4(&self, x: u64) -> Result<SummatoryValue> {
        require_positive(x, "x")?;
        let mut sums = DivisorSums::new(x, &self.config)?;
        Ok(SummatoryValue {
            x,
            function: ArithmeticKind::DivisorK(4),
            method: Method::DirichletSquare,
            value: sums.d4(x)?,
        })
    }

    /// `D_k(x)` by block-grouped recursion on `k`.
    pub fn dk_recursive(&self, k: u32, x: u64) -> Result<SummatoryValue> {
        require_positive(x, "x")?;
        if k == 0 {
            return Err(Error::Domain("k must be at least 1, got 0".to_string()));
        }
        Ok(SummatoryValue {
            x,
            function: ArithmeticKind::DivisorK(k),
            method: Method::Recursion,
            value: dk_levels(k, x, &self.config)?,
        })
    }

    /// `S(x) = Σ_{δ≤√x} μ(δ)·D₄(⌊x/δ²⌋)`.
    pub fn mean_square(&self, x: u64) -> Result<SummatoryValue> {
        require_positive(x, "x")?;
        let mut sums = DivisorSums::new(x, &self.config)?;
        let mobius = sieve(ArithmeticKind::Mobius, sums.root.max(1), &self.config)?;
        let mut acc = 0i128;
        for delta in 1..=sums.root {
            let mu = mobius.at(delta);
            if mu == 0 {
                continue;
            }
            let y = x / (delta * delta);
            acc = arith::add(acc, mu * sums.d4(y)?, "mean-square accumulator")?;
        }
        Ok(SummatoryValue {
            x,
            function: ArithmeticKind::DivisorSquared,
            method: Method::MobiusWeighted,
            value: acc,
        })
    }

    /// Fastest exact method available for `kind`.
    pub fn fast(&self, kind: ArithmeticKind, x: u64) -> Result<SummatoryValue> {
        match require_summable(kind)? {
            ArithmeticKind::Divisor | ArithmeticKind::DivisorK(2) => {
                let mut v = self.hyperbola(x)?;
                v.function = kind;
                Ok(v)
            }
            ArithmeticKind::DivisorK(4) => self.d4(x),
            ArithmeticKind::DivisorK(k) => self.dk_recursive(k, x),
            ArithmeticKind::DivisorSquared => self.mean_square(x),
            ArithmeticKind::Mobius => unreachable!("rejected by require_summable"),
        }
    }
}

fn require_summable(kind: ArithmeticKind) -> Result<ArithmeticKind> {
    match kind.validate()? {
        ArithmeticKind::Mobius => Err(Error::Domain(
            "summatory evaluation supports d, dk:K and d2; not mu".to_string(),
        )),
        k => Ok(k),
    }
}

/// Sieve oracle for `Σ_{n≤x} f(n)` (see [`Summator::oracle`]).
pub fn summatory_oracle(kind: ArithmeticKind, x: u64) -> Result<SummatoryValue> {
    Summator::default().oracle(kind, x)
}

/// Exact `D₂(x)` by the hyperbola method.
pub fn divisor_summatory_hyperbola(x: u64) -> Result<SummatoryValue> {
    Summator::default().hyperbola(x)
}

/// Exact `D₄(x)` via `d₄ = d₂ ∗ d₂`.
pub fn d4_summatory(x: u64) -> Result<SummatoryValue> {
    Summator::default().d4(x)
}

/// Exact `D_k(x)` by recursion over floor-quotient blocks.
pub fn dk_summatory_recursive(k: u32, x: u64) -> Result<SummatoryValue> {
    Summator::default().dk_recursive(k, x)
}

/// Exact `S(x) = Σ_{n≤x} d(n)²` by the Möbius-weighted `D₄` formula.
pub fn mean_square_summatory(x: u64) -> Result<SummatoryValue> {
    Summator::default().mean_square(x)
}

/// Prefix sums `Σ_{n≤p} f(n)` at every point `p` in `points` (any order, `p ≥ 1`),
/// from one pass of the sieve up to the largest point.
pub fn oracle_prefix_sums(
    kind: ArithmeticKind,
    points: &[u64],
    config: &SieveConfig,
) -> Result<Vec<i128>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    if points.contains(&0) {
        return Err(Error::Domain(
            "summation bound must be at least 1, got 0".to_string(),
        ));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| points[i]);
    let sorted: Vec<u64> = order.iter().map(|&i| points[i]).collect();
    let max = *sorted.last().unwrap();

    let mut sums_sorted = vec![0i128; sorted.len()];
    if max <= config.segment_threshold {
        let table = sieve(kind, max, config)?;
        let mut acc = 0i128;
        let mut n = 0u64;
        for (slot, &p) in sums_sorted.iter_mut().zip(&sorted) {
            while n < p {
                n += 1;
                acc = arith::add(acc, table.at(n), "oracle prefix sum")?;
            }
            *slot = acc;
        }
    } else {
        let seg = SegmentedSieve::new(kind, max, config)?;
        // Per window: its total, and partial sums at each point falling inside it.
        let partials = seg.par_fold(|s| {
            let lo = sorted.partition_point(|&p| p < s.start);
            let hi = sorted.partition_point(|&p| p < s.end());
            let mut marks = Vec::with_capacity(hi - lo);
            let mut acc = 0i128;
            let mut next = lo;
            for (i, v) in s.values.iter().enumerate() {
                acc = arith::add(acc, v, "oracle prefix sum")?;
                let n = s.start + i as u64;
                while next < hi && sorted[next] == n {
                    marks.push((next, acc));
                    next += 1;
                }
            }
            Ok((acc, marks))
        })?;
        let mut base = 0i128;
        for (total, marks) in partials {
            for (j, partial) in marks {
                sums_sorted[j] = arith::add(base, partial, "oracle prefix sum")?;
            }
            base = arith::add(base, total, "oracle prefix sum")?;
        }
    }

    let mut out = vec![0i128; points.len()];
    for (slot, &i) in order.iter().enumerate() {
        out[i] = sums_sorted[slot];
    }
    Ok(out)
}

fn hyperbola_d2(x: u64) -> Result<i128> {
    let root = isqrt(x);
    // root · x < 2^96, no overflow in u128.
    let mut sum: u128 = 0;
    for n in 1..=root {
        sum += u128::from(x / n);
    }
    let sum = i128::try_from(sum).map_err(|_| Error::Overflow("hyperbola sum"))?;
    let r = i128::from(root);
    arith::add(
        arith::mul(2, sum, "hyperbola sum")?,
        -(r * r),
        "hyperbola sum",
    )
}

fn cache_bytes(index: &QuotientIndex, levels: u64) -> u64 {
    index.len() as u64 * 16 * levels
}

/// `D₂` memoized over the quotient set of a fixed `x`, plus `d(n)` for `n ≤ √x`.
struct DivisorSums {
    root: u64,
    index: QuotientIndex,
    d2: Vec<i128>,
    divisor: ArithmeticTable,
}

impl DivisorSums {
    fn new(x: u64, config: &SieveConfig) -> Result<Self> {
        let index = QuotientIndex::new(x);
        config.check("quotient cache", cache_bytes(&index, 1))?;
        let root = isqrt(x);
        Ok(Self {
            root,
            index,
            d2: vec![0; index.len()],
            divisor: sieve(ArithmeticKind::Divisor, root.max(1), config)?,
        })
    }

    /// `D₂(v)` for `v` in the quotient set; 0 marks an empty slot since `D₂(v) ≥ 1`.
    #[inline]
    fn d2(&mut self, v: u64) -> Result<i128> {
        let i = self.index.of(v);
        if self.d2[i] == 0 {
            self.d2[i] = hyperbola_d2(v)?;
        }
        Ok(self.d2[i])
    }

    /// `D₄(y)` for `y` in the quotient set.
    fn d4(&mut self, y: u64) -> Result<i128> {
        let root = isqrt(y);
        let mut acc = 0i128;
        for n in 1..=root {
            let term = arith::mul(self.divisor.at(n), self.d2(y / n)?, "D4 accumulator")?;
            acc = arith::add(acc, term, "D4 accumulator")?;
        }
        let corner = self.d2(root)?;
        arith::add(
            arith::mul(2, acc, "D4 accumulator")?,
            -arith::mul(corner, corner, "D4 accumulator")?,
            "D4 accumulator",
        )
    }
}

/// `D_k(x)` by computing `D_j` on the whole quotient set for `j < k`, then one
/// block sum for `D_k(x)`.
fn dk_levels(k: u32, x: u64, config: &SieveConfig) -> Result<i128> {
    let block_sum = |v: u64, prev: &dyn Fn(u64) -> i128| -> Result<i128> {
        FloorBlocks::new(v).try_fold(0i128, |acc, b| {
            let term = arith::mul(i128::from(b.len()), prev(b.q), "D_k accumulator")?;
            arith::add(acc, term, "D_k accumulator")
        })
    };
    if k == 1 {
        return Ok(i128::from(x));
    }
    if k == 2 {
        return block_sum(x, &|q| i128::from(q));
    }

    let index = QuotientIndex::new(x);
    config.check("quotient cache", cache_bytes(&index, 2))?;
    let mut prev = vec![0i128; index.len()];
    for v in index.values() {
        prev[index.of(v)] = i128::from(v);
    }
    let mut cur = vec![0i128; index.len()];
    for _level in 2..k {
        for v in index.values() {
            cur[index.of(v)] = block_sum(v, &|q| prev[index.of(q)])?;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    block_sum(x, &|q| prev[index.of(q)])
}
