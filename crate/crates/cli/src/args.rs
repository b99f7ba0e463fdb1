use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divsq_core::analysis::Claim;
use divsq_core::sieve::verify::Identity;
use divsq_core::sieve::{ArithmeticKind, SieveConfig};

/// Environment variable that may override the default memory cap (bytes).
pub const MEMORY_CAP_ENV: &str = "DIVSQ_MEMORY_CAP";

#[derive(Debug, Parser)]
#[command(
    name = "divsq",
    version,
    about = "Exact and asymptotic divisor-function statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Memory cap in bytes for tables and caches (overrides DIVSQ_MEMORY_CAP).
    #[arg(long, global = true)]
    memory_cap: Option<u64>,

    /// Omit timing fields so identical runs produce identical bytes.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SumMethod {
    Sieve,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Hyperbola,
    D4,
    S,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate mu, d, dk:K or d2 on 1..=limit.
    Sieve {
        #[arg(long)]
        limit: u64,
        #[arg(long = "fn")]
        function: String,
    },
    /// Exact summatory value at x.
    Sum {
        #[arg(long)]
        x: u64,
        #[arg(long = "fn")]
        function: String,
        #[arg(long, value_enum, default_value_t = SumMethod::Fast)]
        method: SumMethod,
    },
    /// Check an identity pointwise for every n <= limit.
    Verify {
        #[arg(long)]
        identity: String,
        #[arg(long)]
        limit: u64,
    },
    /// Sample an error envelope on a geometric grid.
    Envelope {
        #[arg(long)]
        claim: String,
        #[arg(long)]
        xmin: u64,
        #[arg(long)]
        xmax: u64,
        #[arg(long)]
        points: usize,
    },
    /// Fit x(a3 ln^3 x + a2 ln^2 x + a1 ln x + a0) to exact S(x).
    Fit {
        #[arg(long)]
        xmin: u64,
        #[arg(long)]
        xmax: u64,
        #[arg(long)]
        points: usize,
    },
    /// Time the fast paths against fixed budgets.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Earlier `bench` JSON output; runs more than 2x slower than it fail.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: RunCommand,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub sieve: SieveConfig,
    pub deterministic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunCommand {
    Sieve {
        kind: ArithmeticKind,
        limit: u64,
    },
    Sum {
        kind: ArithmeticKind,
        x: u64,
        method: SumMethod,
    },
    Verify {
        identity: Identity,
        limit: u64,
    },
    Envelope {
        claim: Claim,
        x_min: u64,
        x_max: u64,
        points: usize,
    },
    Fit {
        x_min: u64,
        x_max: u64,
        points: usize,
    },
    Bench {
        suite: Suite,
        baseline: Option<PathBuf>,
    },
}

pub enum ParseOutcome {
    /// Help or version was printed.
    Exit(ExitCode),
    Usage(String),
}

pub fn parse<I, T>(args: I) -> Result<RunConfig, ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return Err(ParseOutcome::Exit(ExitCode::SUCCESS));
            }
            let first = e
                .to_string()
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ")
                .to_string();
            return Err(ParseOutcome::Usage(first));
        }
    };
    validate(cli).map_err(ParseOutcome::Usage)
}

fn positive(v: u64, name: &str) -> Result<u64, String> {
    if v == 0 {
        Err(format!("--{name} must be at least 1"))
    } else {
        Ok(v)
    }
}

fn grid(x_min: u64, x_max: u64, points: usize) -> Result<(u64, u64, usize), String> {
    if x_min < 2 {
        return Err("--xmin must be at least 2".to_string());
    }
    if x_max <= x_min {
        return Err("--xmax must exceed --xmin".to_string());
    }
    if points < 2 {
        return Err("--points must be at least 2".to_string());
    }
    Ok((x_min, x_max, points))
}

fn validate(cli: Cli) -> Result<RunConfig, String> {
    let command = match cli.command {
        Command::Sieve { limit, function } => RunCommand::Sieve {
            kind: function
                .parse()
                .map_err(|e: divsq_core::Error| e.to_string())?,
            limit: positive(limit, "limit")?,
        },
        Command::Sum {
            x,
            function,
            method,
        } => {
            let kind: ArithmeticKind = function
                .parse()
                .map_err(|e: divsq_core::Error| e.to_string())?;
            if kind == ArithmeticKind::Mobius {
                return Err("--fn for sum must be d, dk:K or d2".to_string());
            }
            RunCommand::Sum {
                kind,
                x: positive(x, "x")?,
                method,
            }
        }
        Command::Verify { identity, limit } => RunCommand::Verify {
            identity: identity
                .parse()
                .map_err(|e: divsq_core::Error| e.to_string())?,
            limit: positive(limit, "limit")?,
        },
        Command::Envelope {
            claim,
            xmin,
            xmax,
            points,
        } => {
            let (x_min, x_max, points) = grid(xmin, xmax, points)?;
            RunCommand::Envelope {
                claim: claim
                    .parse()
                    .map_err(|e: divsq_core::Error| e.to_string())?,
                x_min,
                x_max,
                points,
            }
        }
        Command::Fit { xmin, xmax, points } => {
            let (x_min, x_max, points) = grid(xmin, xmax, points)?;
            RunCommand::Fit {
                x_min,
                x_max,
                points,
            }
        }
        Command::Bench { suite, baseline } => RunCommand::Bench { suite, baseline },
    };

    let env_cap = match std::env::var(MEMORY_CAP_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<u64>()
                .map_err(|_| format!("{MEMORY_CAP_ENV} must be a byte count, got `{v}`"))?,
        ),
        Err(_) => None,
    };
    let mut sieve = SieveConfig::default();
    if let Some(cap) = cli.output.memory_cap.or(env_cap) {
        sieve = sieve.with_memory_cap(cap);
    }
    Ok(RunConfig {
        command,
        format: cli.output.format,
        out: cli.output.out,
        sieve,
        deterministic: cli.output.deterministic,
    })
}
