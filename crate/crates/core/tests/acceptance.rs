//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p divsq-core --test acceptance`. Every threshold is
//! pinned below; the bounds marked "oracle run" were measured once with an
//! independent sieve-based computation and frozen here.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use divsq_core::analysis::{
    envelope, fit_log_poly, geometric_grid, harmonic_log_main, harmonic_log_sums, mobius_tails,
    Claim, EnvelopeReport, EULER_GAMMA, INV_PI_SQUARED, SIX_OVER_PI_SQUARED,
};
use divsq_core::arith::CompensatedSum;
use divsq_core::sieve::verify::{convolution_check, ConvolutionTables};
use divsq_core::sieve::{sieve, ArithmeticKind, SieveConfig};
use divsq_core::summatory::{
    d4_summatory, divisor_summatory_hyperbola, dk_summatory_recursive, mean_square_summatory,
    oracle_prefix_sums,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// AC5: fitted ln³ coefficient from an independent oracle run (numpy divisor
// sieve to 1e7, same 16-point grid, centered least squares): 0.10102771950125554.
const A3_ORACLE: f64 = 0.101_027_719_501_255_54;
/// Band around 1/π² the fitted coefficient must fall in.
const A3_BAND: f64 = 5e-4;
/// Re-runs must reproduce the oracle coefficient to this absolute tolerance.
const A3_DRIFT: f64 = 1e-8;

// AC6: oracle run sup over 41 geometric samples of [1e3, 1e7] was 0.87360
// (at x = 1e3), per-decade maxima 0.8736, 0.8358, 0.8178, 0.8053.
const S_ENVELOPE_BOUND: f64 = 0.90;

// AC7: sup over every x ≤ 1e7 of |Σ lnᵏn/n − ln^{k+1}x/(k+1)|; oracle run gave
// 1.0 (at x = 1), 0.10930 and 0.26095.
const HARMONIC_BOUNDS: [f64; 3] = [1.0, 0.115, 0.27];
const GAMMA_TOL: f64 = 1e-3;

// AC8: sup of |partial − 6/π²|·√x over 81 geometric x in [1e2, 1e10]; oracle run
// gave 0.0833 (at x = 100).
const MOBIUS_TAIL_C: f64 = 0.10;

// AC9 budgets.
const HYPERBOLA_1E10_BUDGET: Duration = Duration::from_secs(1);
const MEAN_SQUARE_1E9_BUDGET: Duration = Duration::from_secs(60);

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1_convolution() -> Result<String, String> {
    const N: u64 = 100_000;
    let cfg = SieveConfig::default();
    let tables = ConvolutionTables::build(N, &cfg).map_err(|e| e.to_string())?;
    let d = sieve(ArithmeticKind::Divisor, N, &cfg).map_err(|e| e.to_string())?;
    for n in 1..=N {
        let got = convolution_check(n, &tables).map_err(|e| e.to_string())?;
        let want = d.at(n) * d.at(n);
        ensure(got == want, || {
            format!("n={n}: convolution {got} != d(n)^2 {want}")
        })?;
    }
    Ok(format!("{N}/{N} exact"))
}

fn ac2_hyperbola() -> Result<String, String> {
    const N: u64 = 100_000;
    let cfg = SieveConfig::default();
    let d = sieve(ArithmeticKind::Divisor, N, &cfg).map_err(|e| e.to_string())?;
    let mut acc = 0i128;
    for x in 1..=N {
        acc += d.at(x);
        let got = divisor_summatory_hyperbola(x)
            .map_err(|e| e.to_string())?
            .value;
        ensure(got == acc, || {
            format!("x={x}: hyperbola {got} != sieve {acc}")
        })?;
    }
    // Streamed oracle up to 1e8.
    let streamed = SieveConfig {
        segment_threshold: 10_000_000,
        ..cfg
    };
    let xs = geometric_grid(N, 100_000_000, 13).map_err(|e| e.to_string())?;
    let oracle =
        oracle_prefix_sums(ArithmeticKind::Divisor, &xs, &streamed).map_err(|e| e.to_string())?;
    for (&x, &want) in xs.iter().zip(&oracle) {
        let got = divisor_summatory_hyperbola(x)
            .map_err(|e| e.to_string())?
            .value;
        ensure(got == want, || {
            format!("x={x}: hyperbola {got} != sieve {want}")
        })?;
    }
    Ok(format!(
        "x <= {N} exhaustive + {} geometric samples to 1e8, D2(1e8) = {}",
        xs.len(),
        oracle.last().unwrap()
    ))
}

fn ac3_mean_square() -> Result<String, String> {
    let s10 = mean_square_summatory(10).map_err(|e| e.to_string())?.value;
    ensure(s10 == 83, || format!("S(10) = {s10}, expected 83"))?;
    let xs = [1_000u64, 10_000, 100_000, 1_000_000];
    let oracle = oracle_prefix_sums(ArithmeticKind::DivisorSquared, &xs, &SieveConfig::default())
        .map_err(|e| e.to_string())?;
    let mut shown = Vec::new();
    for (&x, &want) in xs.iter().zip(&oracle) {
        let got = mean_square_summatory(x).map_err(|e| e.to_string())?.value;
        ensure(got == want, || format!("x={x}: fast {got} != sieve {want}"))?;
        shown.push(format!("S({x})={got}"));
    }
    Ok(format!("S(10)=83, {}", shown.join(", ")))
}

fn ac4_cross_agreement() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_edd4);
    for _ in 0..50 {
        let x = rng.gen_range(1..=100_000_000u64);
        let a = dk_summatory_recursive(4, x)
            .map_err(|e| e.to_string())?
            .value;
        let b = d4_summatory(x).map_err(|e| e.to_string())?.value;
        ensure(a == b, || {
            format!("x={x}: recursion {a} != dirichlet_square {b}")
        })?;
    }
    Ok("50/50 random x <= 1e8 agree".to_string())
}

fn ac5_leading_constant() -> Result<String, String> {
    let xs = geometric_grid(10_000, 10_000_000, 16).map_err(|e| e.to_string())?;
    let oracle = oracle_prefix_sums(ArithmeticKind::DivisorSquared, &xs, &SieveConfig::default())
        .map_err(|e| e.to_string())?;
    let samples: Vec<(u64, f64)> = xs
        .iter()
        .zip(&oracle)
        .map(|(&x, &s)| (x, s as f64))
        .collect();
    let fit = fit_log_poly(&samples).map_err(|e| e.to_string())?;
    let a3 = fit.model.a3;
    ensure((a3 - INV_PI_SQUARED).abs() <= A3_BAND, || {
        format!("a3 = {a3:.10} outside 1/pi^2 +- {A3_BAND}")
    })?;
    ensure((a3 - A3_ORACLE).abs() <= A3_DRIFT, || {
        format!("a3 = {a3:.12} drifted from pinned {A3_ORACLE:.12}")
    })?;
    Ok(format!(
        "a3 = {a3:.10} (1/pi^2 = {INV_PI_SQUARED:.10}, |diff| = {:.2e} <= {A3_BAND:e}); a2 = {:.6}, a1 = {:.6}, a0 = {:.6}; cond = {:.1}",
        (a3 - INV_PI_SQUARED).abs(),
        fit.model.a2,
        fit.model.a1,
        fit.model.a0,
        fit.condition
    ))
}

fn trend_line(r: &EnvelopeReport) -> String {
    r.trend
        .iter()
        .map(|d| format!("[{}..{}] {:.5}", d.x_lo, d.x_hi, d.max_ratio))
        .collect::<Vec<_>>()
        .join(", ")
}

fn ac6_final_envelope() -> Result<String, String> {
    let xs = geometric_grid(1_000, 10_000_000, 41).map_err(|e| e.to_string())?;
    let r = envelope(Claim::MeanSquare, &xs).map_err(|e| e.to_string())?;
    ensure(r.rejected.is_empty(), || {
        format!("rejected samples: {:?}", r.rejected)
    })?;
    ensure(
        r.sup_ratio.is_finite() && r.sup_ratio <= S_ENVELOPE_BOUND,
        || format!("sup ratio {} exceeds {S_ENVELOPE_BOUND}", r.sup_ratio),
    )?;
    ensure(r.trend.len() == 4, || {
        format!("expected 4 decades, got {}", r.trend.len())
    })?;
    ensure(r.final_decades_nonincreasing() == Some(true), || {
        format!(
            "per-decade max grows in the final decade: {}",
            trend_line(&r)
        )
    })?;
    Ok(format!(
        "sup = {:.5} <= {S_ENVELOPE_BOUND}; decades {}",
        r.sup_ratio,
        trend_line(&r)
    ))
}

fn ac7_harmonic() -> Result<String, String> {
    const X: u64 = 10_000_000;
    let mut parts = Vec::new();
    for k in 0..3u32 {
        // Sweep every x ≤ 1e7.
        let mut acc = CompensatedSum::new();
        let mut sup = 0.0f64;
        for n in 1..=X {
            let nf = n as f64;
            acc.add(nf.ln().powi(k as i32) / nf);
            sup = sup.max((acc.value() - harmonic_log_main(nf, k)).abs());
        }
        ensure(sup <= HARMONIC_BOUNDS[k as usize], || {
            format!("k={k}: sup {sup} exceeds {}", HARMONIC_BOUNDS[k as usize])
        })?;
        // The library's batched sum must agree with the sweep at the endpoint.
        let lib = harmonic_log_sums(&[X], k)[0];
        ensure((lib - acc.value()).abs() <= 1e-9, || {
            format!("k={k}: library sum {lib} != sweep {}", acc.value())
        })?;
        let end = lib - harmonic_log_main(X as f64, k);
        if k == 0 {
            ensure((end - EULER_GAMMA).abs() <= GAMMA_TOL, || {
                format!("H(1e7) - ln(1e7) = {end}, not within {GAMMA_TOL} of gamma")
            })?;
        }
        parts.push(format!("k={k}: sup {sup:.5}, end {end:.7}"));
    }
    Ok(parts.join("; "))
}

fn ac8_mobius_tail() -> Result<String, String> {
    let t10 = mobius_tails(&[10], &SieveConfig::default()).map_err(|e| e.to_string())?[0].partial;
    let want = 1.0 - 0.25 - 1.0 / 9.0;
    ensure((t10 - want).abs() < 1e-15, || {
        format!("partial(10) = {t10}, expected {want}")
    })?;
    let xs = geometric_grid(100, 10_000_000_000, 81).map_err(|e| e.to_string())?;
    let tails = mobius_tails(&xs, &SieveConfig::default()).map_err(|e| e.to_string())?;
    let mut worst = (0.0f64, 0u64);
    for (&x, t) in xs.iter().zip(&tails) {
        let c = (t.partial - SIX_OVER_PI_SQUARED).abs() * (x as f64).sqrt();
        if c > worst.0 {
            worst = (c, x);
        }
    }
    ensure(worst.0 <= MOBIUS_TAIL_C, || {
        format!(
            "|partial - 6/pi^2|*sqrt(x) = {} at x={} exceeds {MOBIUS_TAIL_C}",
            worst.0, worst.1
        )
    })?;
    let last = tails.last().unwrap().partial;
    Ok(format!(
        "partial(10) = {t10:.6}; max C = {:.4} at x={} (<= {MOBIUS_TAIL_C}); partial(1e10) = {last:.10}",
        worst.0, worst.1
    ))
}

fn ac9_performance() -> Result<String, String> {
    let t = Instant::now();
    let d2 = divisor_summatory_hyperbola(10_000_000_000)
        .map_err(|e| e.to_string())?
        .value;
    let th = t.elapsed();
    let t = Instant::now();
    let s = mean_square_summatory(1_000_000_000)
        .map_err(|e| e.to_string())?
        .value;
    let ts = t.elapsed();
    ensure(th <= HYPERBOLA_1E10_BUDGET, || {
        format!("D2(1e10) took {th:?} > {HYPERBOLA_1E10_BUDGET:?}")
    })?;
    ensure(ts <= MEAN_SQUARE_1E9_BUDGET, || {
        format!("S(1e9) took {ts:?} > {MEAN_SQUARE_1E9_BUDGET:?}")
    })?;
    Ok(format!(
        "D2(1e10) = {d2} in {th:.2?}; S(1e9) = {s} in {ts:.2?}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("AC1 convolution identity, n <= 1e5", ac1_convolution),
        ("AC2 hyperbola vs sieve", ac2_hyperbola),
        ("AC3 mean-square fast path vs sieve", ac3_mean_square),
        ("AC4 recursion vs dirichlet-square D4", ac4_cross_agreement),
        ("AC5 leading-constant recovery", ac5_leading_constant),
        ("AC6 final-result envelope", ac6_final_envelope),
        ("AC7 harmonic-log envelope", ac7_harmonic),
        ("AC8 Mobius tail", ac8_mobius_tail),
        ("AC9 performance", ac9_performance),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
