//! `hlkit`: compute Hall-Littlewood polynomials and run the verification
//! suites from the command line.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or
//! domain errors, 3 when the enumeration budget runs out.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hlkit::bijection::bijection_report_sampled;
use hlkit::formulas::{
    compression_report, compute, cross_check, level_check, segment_report, specialization_check, table_rows,
};
use hlkit::walks::DEFAULT_BUDGET;
use hlkit::{Budget, HlError, Method, Partition, Report, Sampling};

const DEFAULT_SEED: u64 = 20240601;

#[derive(Parser, Debug)]
#[command(name = "hlkit", version, about = "Exact type A Hall-Littlewood P and Q polynomials")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunConfig {
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Maximum number of enumerated items (default: $HLKIT_BUDGET, else 10^7).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute one polynomial.
    Compute {
        #[arg(value_enum)]
        method: MethodArg,
        #[command(flatten)]
        target: Target,
    },
    /// Number of fillings and compression factor for the five reference instances.
    Table,
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Comma list of parts. `cross` and `specialize` sweep every
    /// partition with at most n-1 parts and size up to --max-size when it
    /// is omitted; `segments` uses it for the last identity.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    max_size: usize,
    /// Check only this many randomly chosen elements per side (bijection).
    #[arg(long)]
    sample: Option<usize>,
}

#[derive(Args, Debug)]
struct Target {
    /// Comma list of parts; the empty string is the zero partition.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    #[arg(long)]
    n: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    PAlcove,
    PFillings,
    QHhl,
    PFromQ,
    Schur,
    Monomial,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::PAlcove => Method::PAlcove,
            MethodArg::PFillings => Method::PFillings,
            MethodArg::QHhl => Method::QHhl,
            MethodArg::PFromQ => Method::PFromQ,
            MethodArg::Schur => Method::Schur,
            MethodArg::Monomial => Method::Monomial,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Compress,
    Bijection,
    Cross,
    Specialize,
    Levels,
    Segments,
}

enum Failure {
    Verification,
    Lib(HlError),
    Io(io::Error),
}

impl From<HlError> for Failure {
    fn from(e: HlError) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn budget_limit(flag: Option<u64>) -> Result<u64, HlError> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("HLKIT_BUDGET") {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(b) if b >= 1 => Ok(b),
            _ => Err(HlError::Parse(format!("HLKIT_BUDGET must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn sweep(n: usize, max_size: usize) -> Vec<Partition> {
    (0..=max_size).flat_map(|s| Partition::all_of_size(s, n.saturating_sub(1))).collect()
}

fn emit_json(out: &mut impl Write, v: &serde_json::Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)
}

fn run_compute(
    run: &RunConfig,
    method: Method,
    t: &Target,
    budget: &Budget,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let lambda: Partition = t.lambda.parse()?;
    let res = compute(method, &lambda, t.n, budget)?;
    match run.output {
        Output::Json => emit_json(out, &res.to_json())?,
        Output::Text => {
            eprintln!("{method} lambda=({lambda}) n={}: {} terms", t.n, res.term_count);
            writeln!(out, "{}", res.poly)?;
        }
    }
    Ok(())
}

fn run_table(run: &RunConfig, budget: &Budget, out: &mut impl Write) -> Result<(), Failure> {
    let rows = table_rows(budget)?;
    match run.output {
        Output::Json => {
            emit_json(out, &serde_json::json!({ "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>() }))?
        }
        Output::Text => {
            writeln!(out, "{:<10} {:>2} {:>7} {:>9} {:>14} {:>5}", "lambda", "n", "t", "pairs", "c exact", "c")?;
            for r in &rows {
                let (p, q) = r.factor.reduced();
                let lambda = format!("({})", r.lambda.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
                writeln!(
                    out,
                    "{:<10} {:>2} {:>7} {:>9} {:>14} {:>5}",
                    lambda,
                    r.n,
                    r.fillings,
                    r.factor.pairs,
                    format!("{p}/{q}"),
                    r.factor.rounded()
                )?;
            }
        }
    }
    Ok(())
}

fn run_verify(run: &RunConfig, args: &VerifyArgs, budget: &Budget, out: &mut impl Write) -> Result<(), Failure> {
    let VerifyArgs { suite, n, max_size, sample, .. } = *args;
    let lambda: Option<Partition> = args.lambda.as_deref().map(str::parse).transpose()?;
    let need =
        || lambda.clone().ok_or_else(|| HlError::Domain(format!("verify {suite:?} needs --lambda").to_lowercase()));
    let sampling = sample.map(|size| Sampling { size, seed: run.seed });
    let reports: Vec<Report> = match suite {
        Suite::Compress => vec![compression_report(&need()?, n, budget)?],
        Suite::Bijection => vec![bijection_report_sampled(&need()?, n, sampling, budget)?],
        Suite::Levels => vec![level_check(&need()?, n, budget)?],
        Suite::Segments => vec![segment_report(n, lambda.as_slice())?],
        Suite::Cross | Suite::Specialize => {
            let targets = match &lambda {
                Some(l) => vec![l.clone()],
                None => sweep(n, max_size),
            };
            let check = if suite == Suite::Cross { cross_check } else { specialization_check };
            targets.iter().map(|l| check(l, n, budget)).collect::<Result<_, _>>()?
        }
    };
    let passed = reports.iter().all(Report::passed);
    match run.output {
        Output::Json => emit_json(
            out,
            &serde_json::json!({
                "seed": run.seed,
                "passed": passed,
                "reports": reports.iter().map(Report::to_json).collect::<Vec<_>>(),
            }),
        )?,
        Output::Text => {
            writeln!(out, "seed={}", run.seed)?;
            for r in &reports {
                writeln!(out, "{}", r.summary())?;
                for f in &r.failures {
                    writeln!(out, "  {}: {}", f.message, f.witness)?;
                }
            }
        }
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.run.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .map_err(|e| HlError::Domain(format!("cannot size the thread pool: {e}")))?;
    }
    let budget = Budget::new(budget_limit(cli.run.budget)?);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Compute { method, target } => run_compute(&cli.run, (*method).into(), target, &budget, &mut out),
        Command::Table => run_table(&cli.run, &budget, &mut out),
        Command::Verify(args) => run_verify(&cli.run, args, &budget, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                HlError::BudgetExceeded { .. } => 3,
                HlError::Inconsistent(_) => 1,
                _ => 2,
            })
        }
    }
}
