use super::{ArithmeticKind, ArithmeticTable, SieveConfig, TableValues};
use crate::error::{Error, Result};

// Bytes per entry of the exponent (u8) and cofactor (u32) working arrays.
const WORKING_BYTES_PER_ENTRY: u64 = 5;

/// Builds the full table of `kind` on `1..=n` with a linear sieve.
///
/// Each composite `m = i·p` is visited exactly once, with `p` its smallest
/// prime factor. Along the way we record the exponent of that prime and the
/// cofactor left after removing its full power, so
/// `f(m) = f(cofactor) · f(p^e)` is available as soon as `m` is reached.
pub fn sieve(kind: ArithmeticKind, n: u64, config: &SieveConfig) -> Result<ArithmeticTable> {
    let kind = kind.validate()?;
    if n == 0 {
        return Err(Error::Domain(
            "sieve limit must be at least 1, got 0".to_string(),
        ));
    }
    if n > u64::from(u32::MAX) {
        return Err(Error::Sizing {
            what: "linear sieve index",
            requested: n,
            cap: u64::from(u32::MAX),
        });
    }
    let requested = n
        .saturating_mul(WORKING_BYTES_PER_ENTRY + kind.value_width())
        .saturating_add(primes_bytes(n));
    config.check("linear sieve table", requested)?;

    let len = n as usize + 1;
    // exponent[m] = exponent of spf(m) in m; cofactor[m] = m / spf(m)^exponent.
    // cofactor == 0 marks "not yet reached", i.e. prime once the scan gets there.
    let mut exponent = vec![0u8; len];
    let mut cofactor = vec![0u32; len];
    let mut primes: Vec<u32> = Vec::new();

    // f(p^e) for every exponent that can occur below n.
    let max_exp = 64 - n.leading_zeros();
    let pp = kind.exponent_table(max_exp)?;

    let values = if kind.is_signed() {
        let mut v = vec![0i8; len];
        v[1] = 1;
        run(n, &mut exponent, &mut cofactor, &mut primes, |m, c, e| {
            v[m] = (i128::from(v[c]) * pp[e]) as i8;
            Ok(())
        })?;
        v.remove(0);
        TableValues::Signed(v)
    } else {
        let mut v = vec![0u64; len];
        v[1] = 1;
        run(n, &mut exponent, &mut cofactor, &mut primes, |m, c, e| {
            v[m] = u64::try_from(pp[e])
                .ok()
                .and_then(|f| v[c].checked_mul(f))
                .ok_or(Error::Overflow("sieve value"))?;
            Ok(())
        })?;
        v.remove(0);
        TableValues::Unsigned(v)
    };
    Ok(ArithmeticTable::new(kind, values))
}

fn primes_bytes(n: u64) -> u64 {
    // π(n) < 1.26 n / ln n for n > 1.
    let ln = (n.max(3) as f64).ln();
    ((1.26 * n as f64 / ln) as u64 + 1) * 4
}

/// Drives the sieve, calling `assign(m, cofactor, exponent)` for every `m ≥ 2`
/// in increasing order; `cofactor < m` has already been assigned by then.
fn run<F>(
    n: u64,
    exponent: &mut [u8],
    cofactor: &mut [u32],
    primes: &mut Vec<u32>,
    mut assign: F,
) -> Result<()>
where
    F: FnMut(usize, usize, usize) -> Result<()>,
{
    let n = n as usize;
    for i in 2..=n {
        if cofactor[i] == 0 {
            primes.push(i as u32);
            exponent[i] = 1;
            cofactor[i] = 1;
        }
        assign(i, cofactor[i] as usize, exponent[i] as usize)?;
        for &p in primes.iter() {
            let p = p as usize;
            let m = match i.checked_mul(p) {
                Some(m) if m <= n => m,
                _ => break,
            };
            if i % p == 0 {
                // p is the smallest prime factor of i, so spf(m) = p too.
                exponent[m] = exponent[i] + 1;
                cofactor[m] = cofactor[i];
                break;
            }
            exponent[m] = 1;
            cofactor[m] = i as u32;
        }
    }
    Ok(())
}
