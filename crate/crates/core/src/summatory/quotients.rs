use serde::Serialize;

use crate::arith::isqrt;
use crate::error::Result;

/// A maximal run `n_lo..=n_hi` on which `⌊x/n⌋ = q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub q: u64,
    pub n_lo: u64,
    pub n_hi: u64,
}

impl Block {
    pub fn len(&self) -> u64 {
        self.n_hi - self.n_lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Iterator over the blocks of `⌊x/n⌋`, `n = 1..=x`, in order of increasing `n`.
#[derive(Debug, Clone)]
pub struct FloorBlocks {
    x: u64,
    n: u64,
}

impl FloorBlocks {
    pub fn new(x: u64) -> Self {
        Self { x, n: 1 }
    }
}

impl Iterator for FloorBlocks {
    type Item = Block;

    #[inline]
    fn next(&mut self) -> Option<Block> {
        if self.n > self.x {
            return None;
        }
        let q = self.x / self.n;
        let hi = self.x / q;
        let block = Block {
            q,
            n_lo: self.n,
            n_hi: hi,
        };
        self.n = hi + 1;
        Some(block)
    }
}

/// The complete block decomposition of `[1, x]` under `n ↦ ⌊x/n⌋`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FloorQuotients {
    pub x: u64,
    pub blocks: Vec<Block>,
}

/// Collects the blocks of `x`; there are at most `2⌊√x⌋` of them.
pub fn floor_quotients(x: u64) -> Result<FloorQuotients> {
    crate::arith::require_positive(x, "x")?;
    Ok(FloorQuotients {
        x,
        blocks: FloorBlocks::new(x).collect(),
    })
}

/// Dense index over the quotient set `{⌊x/m⌋ : m ≥ 1}`.
///
/// Values `v ≤ √x` map to `v − 1`; larger values map through `⌊x/v⌋`,
/// which is injective on the quotient set.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QuotientIndex {
    x: u64,
    root: u64,
}

impl QuotientIndex {
    pub(crate) fn new(x: u64) -> Self {
        Self { x, root: isqrt(x) }
    }

    pub(crate) fn len(&self) -> usize {
        2 * self.root as usize + 1
    }

    #[inline]
    pub(crate) fn of(&self, v: u64) -> usize {
        debug_assert!(v >= 1 && v <= self.x);
        if v <= self.root {
            (v - 1) as usize
        } else {
            (self.root + self.x / v - 1) as usize
        }
    }

    /// Every member of the quotient set, each exactly once.
    pub(crate) fn values(&self) -> impl Iterator<Item = u64> + '_ {
        let large = self.x / (self.root + 1);
        (1..=self.root).chain((1..=large).map(move |m| self.x / m))
    }
}
