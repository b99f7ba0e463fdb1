use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use divsq_core::analysis::{envelope_with, fit_log_poly, geometric_grid};
use divsq_core::report::SummatoryRecord;
use divsq_core::sieve::verify::verify;
use divsq_core::sieve::{
    sieve, write_csv_rows, ArithmeticKind, SegmentedSieve, TableValues, CSV_HEADER,
};
use divsq_core::summatory::{Summator, SummatoryValue};
use serde::Serialize;

use crate::args::{Format, RunCommand, RunConfig, Suite, SumMethod};

/// Exit status for bad invocations.
pub const EXIT_USAGE: u8 = 2;
/// Exit status for failures during computation (overflow, memory cap, failed checks).
pub const EXIT_COMPUTE: u8 = 3;

/// Bench timings below this are treated as this long when checking regressions.
const BENCH_NOISE_FLOOR_MS: f64 = 1.0;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl From<divsq_core::Error> for CliError {
    fn from(e: divsq_core::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Compute(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Compute(format!("i/o error: {e}"))
    }
}

/// Prints one JSON line on stderr and maps the error to its exit status.
pub fn fail(e: &CliError) -> ExitCode {
    let (kind, message, code) = match e {
        CliError::Usage(m) => ("usage", m, EXIT_USAGE),
        CliError::Compute(m) => ("computation", m, EXIT_COMPUTE),
    };
    let line = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{line}");
    ExitCode::from(code)
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let result = dispatch(config, &mut sink);
    sink.flush()?;
    result
}

fn dispatch(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let summator = Summator::new(config.sieve);
    match &config.command {
        RunCommand::Sieve { kind, limit } => emit_sieve(config, *kind, *limit, out),
        RunCommand::Sum { kind, x, method } => {
            let start = Instant::now();
            let value = match method {
                SumMethod::Sieve => summator.oracle(*kind, *x)?,
                SumMethod::Fast => summator.fast(*kind, *x)?,
            };
            let record = SummatoryRecord::new(&value, timing(config, start));
            match config.format {
                Format::Json => writeln!(out, "{}", record.to_json())?,
                Format::Csv => SummatoryRecord::write_csv(&[record], out)?,
            }
            Ok(())
        }
        RunCommand::Verify { identity, limit } => {
            let report = verify(*identity, *limit, &config.sieve)?;
            match config.format {
                Format::Json => {
                    let mut v = serde_json::to_value(&report).expect("report serializes");
                    v["summary"] = report.summary().into();
                    writeln!(out, "{v}")?;
                }
                Format::Csv => {
                    writeln!(out, "identity,limit,checked,passed,status")?;
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        identity.name(),
                        limit,
                        report.checked,
                        report.passed,
                        if report.ok() { "ok" } else { "failed" }
                    )?;
                }
            }
            if report.ok() {
                Ok(())
            } else {
                Err(CliError::Compute(format!(
                    "{} {}",
                    identity.name(),
                    report.summary()
                )))
            }
        }
        RunCommand::Envelope {
            claim,
            x_min,
            x_max,
            points,
        } => {
            let xs = geometric_grid(*x_min, *x_max, *points)?;
            let report = envelope_with(*claim, &xs, &config.sieve)?;
            match config.format {
                Format::Json => writeln!(out, "{}", report.to_json())?,
                Format::Csv => report.write_csv(out)?,
            }
            Ok(())
        }
        RunCommand::Fit {
            x_min,
            x_max,
            points,
        } => {
            let xs = geometric_grid(*x_min, *x_max, *points)?;
            let samples = xs
                .iter()
                .map(|&x| Ok((x, summator.mean_square(x)?.value as f64)))
                .collect::<Result<Vec<_>, divsq_core::Error>>()?;
            let report = fit_log_poly(&samples)?;
            match config.format {
                Format::Json => writeln!(out, "{}", report.to_json())?,
                Format::Csv => report.write_csv(out)?,
            }
            Ok(())
        }
        RunCommand::Bench { suite, baseline } => {
            bench(config, &summator, *suite, baseline.as_deref(), out)
        }
    }
}

fn timing(config: &RunConfig, start: Instant) -> Option<f64> {
    (!config.deterministic).then(|| start.elapsed().as_secs_f64() * 1e3)
}

fn emit_sieve(
    config: &RunConfig,
    kind: ArithmeticKind,
    limit: u64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    // Tables past the threshold are streamed one segment at a time.
    let streamed = limit > config.sieve.segment_threshold;
    match config.format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            if streamed {
                for segment in SegmentedSieve::new(kind, limit, &config.sieve)? {
                    let segment = segment?;
                    write_csv_rows(segment.start, &segment.values, out)?;
                }
            } else {
                write_csv_rows(1, sieve(kind, limit, &config.sieve)?.values(), out)?;
            }
        }
        Format::Json => {
            write!(
                out,
                "{{\"function\":\"{kind}\",\"limit\":{limit},\"values\":["
            )?;
            let mut first = true;
            let mut write_values = |values: &TableValues, out: &mut dyn Write| -> io::Result<()> {
                for v in values.iter() {
                    if !first {
                        out.write_all(b",")?;
                    }
                    first = false;
                    write!(out, "\"{v}\"")?;
                }
                Ok(())
            };
            if streamed {
                for segment in SegmentedSieve::new(kind, limit, &config.sieve)? {
                    write_values(&segment?.values, out)?;
                }
            } else {
                write_values(sieve(kind, limit, &config.sieve)?.values(), out)?;
            }
            writeln!(out, "]}}")?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BenchRow {
    #[serde(flatten)]
    record: SummatoryRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget_ms: Option<f64>,
}

#[derive(Serialize)]
struct BenchReport {
    suite: &'static str,
    results: Vec<BenchRow>,
    ok: bool,
    failures: Vec<String>,
}

fn bench_cases(suite: Suite) -> (&'static str, [(u64, Option<f64>); 3]) {
    match suite {
        Suite::Hyperbola => (
            "hyperbola",
            [
                (100_000_000, None),
                (1_000_000_000, None),
                (10_000_000_000, Some(1_000.0)),
            ],
        ),
        Suite::D4 => (
            "d4",
            [
                (10_000_000, None),
                (100_000_000, None),
                (1_000_000_000, None),
            ],
        ),
        Suite::S => (
            "s",
            [
                (10_000_000, None),
                (100_000_000, None),
                (1_000_000_000, Some(60_000.0)),
            ],
        ),
    }
}

fn load_baseline(path: &Path) -> Result<Vec<(u64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read baseline {}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("baseline {} is not JSON: {e}", path.display())))?;
    let rows = v["results"]
        .as_array()
        .ok_or_else(|| CliError::Usage("baseline has no `results` array".to_string()))?;
    Ok(rows
        .iter()
        .filter_map(|r| Some((r["x"].as_u64()?, r["elapsed_ms"].as_f64()?)))
        .collect())
}

fn bench(
    config: &RunConfig,
    summator: &Summator,
    suite: Suite,
    baseline: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let baseline = baseline.map(load_baseline).transpose()?.unwrap_or_default();
    let (name, cases) = bench_cases(suite);
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (x, budget_ms) in cases {
        let start = Instant::now();
        let value: SummatoryValue = match suite {
            Suite::Hyperbola => summator.hyperbola(x)?,
            Suite::D4 => summator.d4(x)?,
            Suite::S => summator.mean_square(x)?,
        };
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        if let Some(budget) = budget_ms {
            if elapsed > budget {
                failures.push(format!("x={x}: {elapsed:.1} ms exceeds budget {budget} ms"));
            }
        }
        if let Some(&(_, base)) = baseline.iter().find(|(bx, _)| *bx == x) {
            if elapsed > 2.0 * base.max(BENCH_NOISE_FLOOR_MS) {
                failures.push(format!(
                    "x={x}: {elapsed:.1} ms is more than 2x baseline {base:.1} ms"
                ));
            }
        }
        results.push(BenchRow {
            record: SummatoryRecord::new(&value, (!config.deterministic).then_some(elapsed)),
            budget_ms,
        });
    }
    let ok = failures.is_empty();
    let report = BenchReport {
        suite: name,
        results,
        ok,
        failures: failures.clone(),
    };
    match config.format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        )?,
        Format::Csv => {
            let records: Vec<SummatoryRecord> =
                report.results.into_iter().map(|r| r.record).collect();
            SummatoryRecord::write_csv(&records, out)?;
        }
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Compute(format!(
            "bench {name} regressed: {}",
            failures.join("; ")
        )))
    }
}
