//! Small exact-integer helpers shared by the summation code.

use crate::error::{Error, Result};

/// `⌊√n⌋`, computed by integer Newton iteration.
///
/// The floating-point estimate is only used as a starting point; the result is
/// corrected so that `r² ≤ n < (r+1)²` always holds.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    // Start above the root so the iteration decreases monotonically.
    let mut r = (n as f64).sqrt() as u64 + 1;
    loop {
        let next = (r + n / r) / 2;
        if next >= r {
            break;
        }
        r = next;
    }
    while (r as u128) * (r as u128) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128) * ((r + 1) as u128) <= n as u128 {
        r += 1;
    }
    r
}

#[inline]
pub(crate) fn add(a: i128, b: i128, ctx: &'static str) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow(ctx))
}

#[inline]
pub(crate) fn mul(a: i128, b: i128, ctx: &'static str) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow(ctx))
}

pub(crate) fn require_positive(x: u64, what: &str) -> Result<()> {
    if x == 0 {
        return Err(Error::Domain(format!("{what} must be at least 1, got 0")));
    }
    Ok(())
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_perfect_squares_and_neighbours() {
        for r in [
            0u64,
            1,
            2,
            3,
            10,
            31_622,
            1 << 20,
            3_037_000_499,
            4_294_967_295,
        ] {
            let sq = r * r;
            assert_eq!(isqrt(sq), r);
            if sq > 0 {
                assert_eq!(isqrt(sq - 1), r - 1);
            }
            assert_eq!(isqrt(sq + 1), r.max(1));
        }
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }

    #[test]
    fn isqrt_matches_linear_scan() {
        let mut r = 0u64;
        for n in 0..100_000u64 {
            while (r + 1) * (r + 1) <= n {
                r += 1;
            }
            assert_eq!(isqrt(n), r, "n = {n}");
        }
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut c = CompensatedSum::new();
        c.add(1.0);
        for _ in 0..10_000 {
            c.add(1e-16);
        }
        assert!((c.value() - (1.0 + 1e-12)).abs() < 1e-20);
    }

    #[test]
    fn checked_helpers_report_overflow() {
        assert_eq!(add(i128::MAX, 1, "t"), Err(Error::Overflow("t")));
        assert_eq!(mul(i128::MAX, 2, "t"), Err(Error::Overflow("t")));
        assert!(require_positive(0, "x").unwrap_err().is_usage());
    }
}
