use rayon::prelude::*;

use super::{ArithmeticKind, SieveConfig, TableValues};
use crate::arith::isqrt;
use crate::error::{Error, Result};

/// One window `[start, start + values.len())` of a streamed table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: u64,
    pub values: TableValues,
}

impl Segment {
    pub fn end(&self) -> u64 {
        self.start + self.values.len() as u64
    }
}

/// Streams `kind` on `1..=limit` in fixed-size windows.
///
/// Each window starts from `rem[i] = n`, divides out every sieving prime
/// `p ≤ √limit` from its multiples while counting exponents, and treats any
/// leftover `rem > 1` as a single large prime. Windows are independent, so
/// [`SegmentedSieve::par_fold`] can build them on a thread pool.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    kind: ArithmeticKind,
    limit: u64,
    segment_len: u64,
    primes: Vec<u64>,
    exp_values: Vec<i128>,
    next: u64,
}

impl SegmentedSieve {
    pub fn new(kind: ArithmeticKind, limit: u64, config: &SieveConfig) -> Result<Self> {
        let kind = kind.validate()?;
        if limit == 0 {
            return Err(Error::Domain(
                "sieve limit must be at least 1, got 0".to_string(),
            ));
        }
        let segment_len = config.segment_len.max(1);
        let root = isqrt(limit);
        // rem (u64) + value (<= 8 bytes) per window entry, plus the base primes
        // and one window per worker thread.
        let threads = rayon::current_num_threads() as u64;
        let requested = segment_len
            .saturating_mul(16)
            .saturating_mul(threads)
            .saturating_add(root.saturating_mul(8));
        config.check("segmented sieve working set", requested)?;

        let max_exp = 64 - limit.leading_zeros();
        Ok(Self {
            kind,
            limit,
            segment_len,
            primes: eratosthenes(root),
            exp_values: kind.exponent_table(max_exp)?,
            next: 1,
        })
    }

    pub fn kind(&self) -> ArithmeticKind {
        self.kind
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_count(&self) -> u64 {
        self.limit.div_ceil(self.segment_len)
    }

    /// Builds the `index`-th window (zero-based).
    pub fn segment(&self, index: u64) -> Result<Segment> {
        let start = 1 + index * self.segment_len;
        let end = (start + self.segment_len).min(self.limit + 1);
        self.build(start, end)
    }

    fn build(&self, start: u64, end: u64) -> Result<Segment> {
        let len = (end - start) as usize;
        let mut rem: Vec<u64> = (start..end).collect();
        let mut val = vec![1i128; len];
        for &p in &self.primes {
            let first = start.div_ceil(p) * p;
            let mut m = first;
            while m < end {
                let i = (m - start) as usize;
                let mut e = 0usize;
                while rem[i].is_multiple_of(p) {
                    rem[i] /= p;
                    e += 1;
                }
                val[i] = val[i]
                    .checked_mul(self.exp_values[e])
                    .ok_or(Error::Overflow("sieve value"))?;
                m += p;
            }
        }
        let single = self.exp_values[1];
        for (r, v) in rem.iter().zip(val.iter_mut()) {
            if *r > 1 {
                *v *= single;
            }
        }
        let values = if self.kind.is_signed() {
            TableValues::Signed(val.into_iter().map(|v| v as i8).collect())
        } else {
            TableValues::Unsigned(
                val.into_iter()
                    .map(|v| u64::try_from(v).map_err(|_| Error::Overflow("sieve value")))
                    .collect::<Result<_>>()?,
            )
        };
        Ok(Segment { start, values })
    }

    /// Maps every window through `map` in parallel and returns the results in
    /// window order; output is independent of scheduling.
    pub fn par_fold<T, F>(&self, map: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&Segment) -> Result<T> + Sync,
    {
        (0..self.segment_count())
            .into_par_iter()
            .map(|i| self.segment(i).and_then(|s| map(&s)))
            .collect()
    }
}

impl Iterator for SegmentedSieve {
    type Item = Result<Segment>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next > self.limit {
            return None;
        }
        let start = self.next;
        let end = (start + self.segment_len).min(self.limit + 1);
        self.next = end;
        Some(self.build(start, end))
    }
}

/// Primes up to `n` by the plain sieve of Eratosthenes.
pub(crate) fn eratosthenes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}
