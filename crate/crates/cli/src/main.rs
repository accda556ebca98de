use std::io::{self, BufWriter, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use upsilon_core::enumerate::{format_ratio, ratio_to_f64, ExpectationTable};
use upsilon_core::stats::{
    compare_variance_to_reference, format_decimal, reference_variance_slope,
};
use upsilon_core::{
    compare_to_reference, count_substs, count_terms, export_report, nested_free_fraction,
    normalize, parse_term, run_experiment, sample_term, ExportFormat, Measure, ParamKind, Report,
    RewriteError, Rng, Strategy, Tolerance,
};

mod verify;

#[derive(Parser)]
#[command(
    name = "upsilon",
    version,
    about = "Counting, sampling and rewriting lambda-upsilon terms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print "n,count" rows for sizes 0..=N.
    Count {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_size: u64,
        #[arg(long, value_enum, default_value_t = Kind::Term)]
        kind: Kind,
    },
    /// Draw uniform random terms of a given size.
    Sample {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Normalise a term given with --term or on stdin.
    Normalize {
        #[arg(long, default_value = "full")]
        strategy: Strategy,
        #[arg(long, default_value_t = 100_000)]
        max_steps: u64,
        /// Also print the reduction trace as JSON.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        term: Option<String>,
    },
    /// Sample statistics compared against exact and limit values.
    Stats {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated parameters; all of them by default.
        #[arg(long, value_delimiter = ',')]
        params: Vec<Measure>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Exact expected value of a parameter over all terms of a size.
    Expect {
        #[arg(long)]
        param: ParamKind,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
    },
    /// Run a built-in verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Term,
    Subst,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

enum Failure {
    /// Exit 1: the command ran but the result is a failure.
    Check(String),
    /// Exit 2: bad input.
    Usage(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Check(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("upsilon: {msg}");
        return ExitCode::from(2);
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out).and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            let _ = out.flush();
            eprintln!("upsilon: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("upsilon: {msg}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("UPSILON_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("UPSILON_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Count { max_size, kind } => {
            writeln!(out, "n,count")?;
            for n in 0..=max_size as usize {
                let c = match kind {
                    Kind::Term => count_terms(n),
                    Kind::Subst => count_substs(n),
                };
                writeln!(out, "{n},{c}")?;
            }
        }
        Command::Sample {
            size,
            count,
            seed,
            format,
        } => {
            let terms: Vec<String> = (0..count)
                .map(|i| {
                    sample_term(size as usize, &mut Rng::stream(seed, i))
                        .expect("size is positive")
                        .to_string()
                })
                .collect();
            match format {
                Format::Text => {
                    for t in terms {
                        writeln!(out, "{t}")?;
                    }
                }
                Format::Json => {
                    serde_json::to_writer_pretty(&mut *out, &terms).map_err(io::Error::from)?;
                    writeln!(out)?;
                }
            }
        }
        Command::Normalize {
            strategy,
            max_steps,
            trace,
            term,
        } => {
            let text = match term {
                Some(t) => t,
                None => {
                    let mut buf = String::new();
                    io::stdin().read_to_string(&mut buf)?;
                    buf
                }
            };
            let text = text.trim();
            if text.is_empty() {
                return Err(Failure::Usage("no term given (use --term or stdin)".into()));
            }
            let t = parse_term(text).map_err(|e| Failure::Usage(e.to_string()))?;
            let (result, exhausted) = match normalize(&t, strategy, max_steps) {
                Ok(n) => (n, false),
                Err(RewriteError::BudgetExceeded(partial)) => (*partial, true),
                Err(e) => return Err(Failure::Check(e.to_string())),
            };
            writeln!(out, "{}", result.term)?;
            if trace {
                serde_json::to_writer_pretty(&mut *out, &result.trace.to_json())
                    .map_err(io::Error::from)?;
                writeln!(out)?;
            }
            if exhausted {
                return Err(Failure::Check(format!(
                    "step budget of {max_steps} exhausted; printed the partial result"
                )));
            }
            eprintln!("{} steps", result.trace.len());
        }
        Command::Stats {
            size,
            samples,
            seed,
            params,
            format,
        } => {
            let params = if params.is_empty() {
                Measure::ALL.to_vec()
            } else {
                params
            };
            let reports = stats(size as usize, samples, seed, &params)?;
            let format = match format {
                ReportFormat::Json => ExportFormat::Json,
                ReportFormat::Csv => ExportFormat::Csv,
            };
            export_report(&reports, format, &mut *out)
                .map_err(|e| Failure::Check(e.to_string()))?;
        }
        Command::Expect { param, size } => {
            let e = upsilon_core::expected_param_exact(param, size as usize);
            writeln!(out, "{}", format_ratio(&e))?;
            writeln!(out, "{}", format_decimal(ratio_to_f64(&e)))?;
        }
        Command::Verify { suite, max_size } => {
            if suite != verify::Suite::Catalan && max_size > verify::EXHAUSTIVE_LIMIT {
                return Err(Failure::Usage(format!(
                    "--max-size above {} is not supported for exhaustive suites",
                    verify::EXHAUSTIVE_LIMIT
                )));
            }
            let outcome = verify::run(suite, max_size);
            for f in &outcome.failures {
                writeln!(out, "FAIL {f}")?;
            }
            let verdict = if outcome.failures.is_empty() {
                "ok"
            } else {
                "FAILED"
            };
            writeln!(
                out,
                "{suite:?} up to size {max_size}: {} checks, {} failures: {verdict}",
                outcome.checks,
                outcome.failures.len()
            )?;
            if !outcome.failures.is_empty() {
                return Err(Failure::Check("verification failed".into()));
            }
        }
    }
    Ok(())
}

/// Means are compared with the exact finite-size values (3 standard errors);
/// redex variances with the limit slope times `n` (15% relative).
fn stats(n: usize, m: u64, seed: u64, params: &[Measure]) -> Result<Vec<Report>, Failure> {
    let summaries =
        run_experiment(n, m, seed, params).map_err(|e| Failure::Usage(e.to_string()))?;
    let table = ExpectationTable::<num_bigint::BigInt>::new(n);
    let mean_tol = Tolerance::StandardErrors(3.0);
    Ok(summaries
        .into_iter()
        .map(|s| {
            let mut comparisons = Vec::new();
            let exact_mean = match s.param {
                Measure::Param(p) => table.expected(p, n),
                Measure::NestedFraction => rational_one() - nested_free_fraction(n),
            };
            let mut c = compare_to_reference(&s, ratio_to_f64(&exact_mean), mean_tol);
            c.label = "exact mean".into();
            comparisons.push(c);
            if let Measure::Param(ParamKind::Redex(kind)) = s.param {
                let reference = ratio_to_f64(&reference_variance_slope(kind)) * n as f64;
                let mut c = compare_variance_to_reference(&s, reference, Tolerance::Relative(0.15));
                c.label = "limit variance slope times n".into();
                comparisons.push(c);
            }
            Report {
                summary: s,
                comparisons,
            }
        })
        .collect())
}

fn rational_one() -> num_rational::BigRational {
    num_rational::BigRational::from_integer(1.into())
}
